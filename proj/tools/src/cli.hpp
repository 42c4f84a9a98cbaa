#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace slicedot::cli {

/// Parses argv-style arguments, runs the selected command and returns the
/// process exit code. JSON goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace slicedot::cli
