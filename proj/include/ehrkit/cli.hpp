#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ehrkit::cli {

// Runs one batch command. `args` holds the arguments after the program name.
// Results go to `out` (JSON by default), diagnostics to `err` only.
// Exit codes: 0 success, 1 usage error, 2 data error.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace ehrkit::cli
