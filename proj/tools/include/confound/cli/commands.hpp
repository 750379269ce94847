#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace confound::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitNumericalFailure = 3;

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. Reports and tables go to `out` unless --out is given;
/// verdicts and diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace confound::cli
