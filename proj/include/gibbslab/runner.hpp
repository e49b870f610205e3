#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "gibbslab/errors.hpp"

namespace gibbslab {

inline constexpr const char* kVersion = "0.1.0";

struct RunOptions {
  std::string subcommand;  // exact, sample, blockcoef, bootstrap, fit, verify
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::string> fit_input;
  std::string suite = "gaussian";
};

/// 2 config or usage, 3 model, 4 numerical, 5 io.
int exit_code(ErrorKind kind);

/// Runs one experiment and writes its tables plus manifest.csv into the
/// output directory. Diagnostics go to stderr; returns the process exit code
/// (0 ok, 1 failed verification).
int run_experiment(const RunOptions& options);

}  // namespace gibbslab
