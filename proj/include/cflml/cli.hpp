#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cflml {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitTrainingFailure = 2;

/// Entry point of the `cflml` tool: `train`, `eval` and `bench` subcommands. `args[0]` is
/// the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cflml
