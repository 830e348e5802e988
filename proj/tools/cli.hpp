#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace xfode::cli {

/// Runs the xfode command line. Returns 0 on success, 1 on usage errors
/// (after printing help) and 2 on runtime failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace xfode::cli
