#pragma once

#include <cstddef>
#include <functional>

namespace qasym {

/// Runs body(0..count-1) on up to `threads` workers (static striding).
/// The first exception thrown by any worker is rethrown after all join.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace qasym
