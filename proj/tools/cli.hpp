#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pclust::cli {

/// Runs one command line. `args` excludes the program name.
/// Returns 0 on success, 1 on data or estimation failures, 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace pclust::cli
