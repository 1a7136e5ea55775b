#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qasym {

/// Exit codes: 0 ok, 2 bad parameters / input, 1 numerical or domain failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace qasym
