#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "poropinn/net_core.hpp"
#include "poropinn/poroelastic_pde.hpp"
#include "poropinn/sampling.hpp"

namespace poropinn {

struct LossBreakdown {
  double mse_u = 0.0;
  double mse_v = 0.0;
  double mse_p = 0.0;
  double mse_f = 0.0;
  double mse_g = 0.0;
  double mse_h = 0.0;
  double data = 0.0;
  double physics = 0.0;
  double total = 0.0;

  bool operator==(const LossBreakdown&) const = default;
};

struct DataTerms {
  double mse_u = 0.0;
  double mse_v = 0.0;
  double mse_p = 0.0;
};

struct PhysicsTerms {
  double mse_f = 0.0;
  double mse_g = 0.0;
  double mse_h = 0.0;
};

/// Non-owning view of labeled points.
struct DataBatch {
  std::span<const SpacetimePoint> points;
  std::span<const FieldValues> targets;

  static DataBatch of(const LabeledSet& set) { return {set.points, set.targets}; }
  std::size_t size() const { return points.size(); }
};

DataTerms data_loss(const MlpParams& params, const DataBatch& batch);

/// Mean squared (residual - manufactured source) over the collocation points.
PhysicsTerms physics_loss(const MlpParams& params, std::span<const SpacetimePoint> colloc,
                          const SolutionParams& sp);

LossBreakdown total_loss(const MlpParams& params, const DataBatch& batch,
                         std::span<const SpacetimePoint> colloc, const SolutionParams& sp);

/// Value-only counterpart of loss_and_gradient (same empty-collocation rule).
LossBreakdown batch_loss(const MlpParams& params, const DataBatch& batch,
                         std::span<const SpacetimePoint> colloc, const SolutionParams& sp);

struct LossAndGradient {
  LossBreakdown losses;
  ParamGradient gradient;
};

/// Batch objective used by the trainers. An empty collocation span drops the
/// physics terms (they are reported as zero).
LossAndGradient loss_and_gradient(const MlpParams& params, const DataBatch& batch,
                                  std::span<const SpacetimePoint> colloc, const SolutionParams& sp);

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  ParamBlocks first_moment;
  ParamBlocks second_moment;
  std::uint64_t step_count = 0;

  AdamState() = default;
  explicit AdamState(const LayerSpec& spec) : first_moment(spec), second_moment(spec) {}

  bool operator==(const AdamState&) const = default;
};

void adam_step(MlpParams& params, const ParamGradient& grad, AdamState& state, double learning_rate,
               const AdamHyper& hyper = {});

struct CurriculumConfig {
  int n_intervals = 10;
  int epochs_per_interval = 300;
  CurriculumMode mode = CurriculumMode::kIncremental;
  std::size_t ic_subsample = 0;
};

struct TrainConfig {
  GridSpec grid;
  LayerSpec net;
  int epochs = 3000;
  std::size_t batch_size = 256;
  double learning_rate = 1e-3;
  std::size_t colloc_total = 1000;
  std::optional<CurriculumConfig> curriculum;
  std::uint64_t seed = 0;
  AdamHyper adam;
  SolutionParams solution;
  LhsJitter lhs_jitter = LhsJitter::kUniform;
  /// When false, wall_millis is logged as 0 so logs are byte-reproducible.
  bool record_wall_clock = true;
  /// Number of initial optimizer steps whose gradient is checked against
  /// central differences before being applied.
  int gradcheck_steps = 0;
};

void validate(const TrainConfig& cfg);

struct TrainingLogRecord {
  int epoch = 0;
  std::optional<int> interval;
  LossBreakdown losses;
  std::int64_t wall_millis = 0;
};

using LogObserver = std::function<void(const TrainingLogRecord&)>;

struct TrainResult {
  MlpParams params;
  AdamState adam;
  std::vector<TrainingLogRecord> log;
  /// PDE-residual evaluations performed by optimizer steps, one entry per epoch.
  std::vector<std::size_t> residual_evals_per_epoch;
};

/// Whole-domain training on all initial/boundary data and one collocation set.
/// The observer sees every log record as soon as it is produced, so a caller
/// still holds the partial log if training aborts with NumericError.
TrainResult train_standard(const TrainConfig& cfg, const LogObserver& observer = {});

/// Interval-by-interval training; parameters and Adam state carry across stages.
TrainResult train_curriculum(const TrainConfig& cfg, const LogObserver& observer = {});

inline constexpr const char* kLogCsvHeader =
    "epoch,interval,mse_u,mse_v,mse_p,mse_f,mse_g,mse_h,data,physics,total,wall_ms";

std::string format_log_row(const TrainingLogRecord& record);

struct Checkpoint {
  MlpParams params;
  std::optional<AdamState> adam;
};

inline constexpr const char* kCheckpointHeader = "POROPINN-CKPT v1";

void write_checkpoint(std::ostream& os, const MlpParams& params, const AdamState* state);
Checkpoint read_checkpoint(std::istream& is);

void save_checkpoint(const MlpParams& params, const AdamState* state, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace poropinn
