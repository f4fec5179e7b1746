#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace harvest {

/// Entry point of the `harvest` command. `args` excludes the program name.
/// Returns the process exit code: 0 success, 1 numerical or I/O failure
/// (including failed `verify` checks), 2 invalid usage or input.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace harvest
