#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hlasso::cli {

enum ExitCode : int {
    ok = 0,
    input_error = 1,
    not_converged = 2,
};

/// Runs the command line; argv[0] is the program name. Artifacts go to the
/// --out path (or `out` when the path is "-"), messages go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace hlasso::cli
