#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "frameflow/config.hpp"

namespace frameflow {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumeric = 4;

struct RunOptions {
  ConfigFile config;
  std::optional<std::uint64_t> seed;   // overrides config seeds when set
  int workers = 1;
};

int cmd_render(const RunOptions& opts);
int cmd_flow(const RunOptions& opts);
int cmd_generate(const RunOptions& opts);
int cmd_train(const RunOptions& opts);
int cmd_estimate(const RunOptions& opts);
int cmd_analyze(const RunOptions& opts);

// Parses argv, loads the config, applies overrides, dispatches, and maps
// errors to exit codes (0 ok, 2 config, 3 io, 4 numerical).
int run_cli(int argc, const char* const* argv);

}  // namespace frameflow
