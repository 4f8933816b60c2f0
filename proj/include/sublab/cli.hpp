#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sublab::cli {

/// Entry point of the sublab command. Exit codes: 0 success, 1 runtime failure, 2 bad
/// command line or configuration.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sublab::cli
