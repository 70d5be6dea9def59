#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "poropinn/gradcheck.hpp"

namespace poropinn::cli {

// Exit codes are part of the command-line contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

inline constexpr const char* kOutputEnvVar = "POROPINN_OUT";
inline constexpr const char* kLogFile = "train_log.csv";
inline constexpr const char* kCheckpointFile = "checkpoint.txt";
inline constexpr const char* kEchoFile = "config.echo.cfg";
inline constexpr const char* kSliceFile = "slice.csv";
inline constexpr const char* kProfileFile = "profile.csv";
inline constexpr const char* kNormsFile = "norms.txt";

struct CommonOptions {
  std::optional<std::string> config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
};

struct TrainOptions {
  CommonOptions common;
  std::string mode = "standard";
  bool gradcheck = false;
};

struct EvalOptions {
  CommonOptions common;
  std::string checkpoint;
  std::optional<double> slice_t;
  std::optional<double> profile_x;
};

struct GradcheckOptions {
  CommonOptions common;
  std::size_t n_samples = 100;
};

struct DataOptions {
  CommonOptions common;
  std::string mode = "standard";
};

/// Trains in the selected mode and writes the log CSV, the final checkpoint
/// and the echoed config into the output directory.
int cmd_train(const TrainOptions& opts, std::ostream& out, std::ostream& err);

/// Writes the slice CSV, profile CSV and norms report for a checkpoint.
int cmd_eval(const EvalOptions& opts, std::ostream& out, std::ostream& err);

/// Derivative, parameter-gradient and manufactured-identity conformance.
/// `eval` is injectable so tests can hand in a deliberately broken evaluator.
int cmd_gradcheck(const GradcheckOptions& opts, std::ostream& out, std::ostream& err,
                  const DerivEvaluator& eval = forward_with_derivs);

/// Exports the labeled training data and collocation points as CSV.
int cmd_data(const DataOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace poropinn::cli
