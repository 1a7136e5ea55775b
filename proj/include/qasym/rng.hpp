#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace qasym {

std::uint64_t splitmix64(std::uint64_t x);

/// Hash (seed, salt...) to an independent-looking 64-bit seed. Order matters.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> salt);

/// Generator for the substream labelled by `salt` under `seed`.
std::mt19937_64 substream(std::uint64_t seed, std::initializer_list<std::uint64_t> salt);

}  // namespace qasym
