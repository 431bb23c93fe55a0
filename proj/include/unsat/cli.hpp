#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace unsat {

// Exit codes: 0 success, 1 usage/parse/IO error, 2 size-guard violation,
// 3 FINDING encountered under --strict-findings.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err,
            std::istream& in);

}  // namespace unsat
