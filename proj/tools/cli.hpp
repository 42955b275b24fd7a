#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace edda::cli {

// Runs the `edda` command line. args[0] is the program name. Returns the
// process exit code: 0 on success, 1 when a command fails, and the parser's
// code for usage errors. Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace edda::cli
