#include <chrono>
#include <cmath>

#include <fmt/format.h>

#include "poropinn/errors.hpp"
#include "poropinn/gradcheck.hpp"
#include "poropinn/random.hpp"
#include "poropinn/training.hpp"

namespace poropinn {

void validate(const TrainConfig& cfg) {
  validate(cfg.grid);
  validate(cfg.net);
  validate(cfg.solution);
  if (cfg.epochs < 0) throw ConfigError("train.epochs must be non-negative");
  if (cfg.batch_size == 0) throw ConfigError("train.batch_size must be positive");
  if (!(cfg.learning_rate > 0.0) || !std::isfinite(cfg.learning_rate)) {
    throw ConfigError("train.learning_rate must be a positive finite number");
  }
  if (cfg.colloc_total == 0) throw ConfigError("train.colloc_total must be positive");
  if (!(cfg.adam.beta1 >= 0.0 && cfg.adam.beta1 < 1.0) || !(cfg.adam.beta2 >= 0.0 && cfg.adam.beta2 < 1.0)) {
    throw ConfigError("adam betas must lie in [0, 1)");
  }
  if (!(cfg.adam.epsilon > 0.0)) throw ConfigError("adam.epsilon must be positive");
  if (cfg.gradcheck_steps < 0) throw ConfigError("gradcheck step count must be non-negative");
  if (cfg.curriculum) {
    const auto& cur = *cfg.curriculum;
    if (cur.n_intervals < 1) throw ConfigError("curriculum.n_intervals must be positive");
    if (cur.epochs_per_interval < 0) throw ConfigError("curriculum.epochs_per_interval must be non-negative");
    if (cur.n_intervals > cfg.grid.nt - 1) {
      throw ConfigError(fmt::format("curriculum.n_intervals ({}) exceeds grid.nt - 1 ({}); every interval needs a time level",
                                    cur.n_intervals, cfg.grid.nt - 1));
    }
    if (cfg.colloc_total % static_cast<std::size_t>(cur.n_intervals) != 0) {
      throw ConfigError(fmt::format("train.colloc_total ({}) must be divisible by curriculum.n_intervals ({})",
                                    cfg.colloc_total, cur.n_intervals));
    }
  }
}

std::string format_log_row(const TrainingLogRecord& r) {
  const auto& l = r.losses;
  return fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}", r.epoch,
                     r.interval ? std::to_string(*r.interval) : std::string(), l.mse_u, l.mse_v, l.mse_p,
                     l.mse_f, l.mse_g, l.mse_h, l.data, l.physics, l.total, r.wall_millis);
}

namespace {

using Clock = std::chrono::steady_clock;

// Mutable state owned by one training run.
struct Session {
  const TrainConfig& cfg;
  const LogObserver& observer;
  TrainResult result;
  Rng shuffle_rng;
  Clock::time_point start = Clock::now();
  int epoch = 0;
  int gradchecks_left = 0;

  Session(const TrainConfig& c, const LogObserver& obs)
      : cfg(c),
        observer(obs),
        shuffle_rng(c.seed + seed_offset::kShuffle),
        gradchecks_left(c.gradcheck_steps) {
    result.params = init_params(cfg.net, cfg.seed + seed_offset::kInit);
    result.adam = AdamState(cfg.net);
  }

  std::int64_t wall_millis() const {
    if (!cfg.record_wall_clock) return 0;
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
  }

  void spot_check(const DataBatch& batch, std::span<const SpacetimePoint> colloc) {
    if (gradchecks_left <= 0) return;
    --gradchecks_left;
    const auto probe = check_param_gradient(result.params, batch, colloc, cfg.solution);
    if (probe.worst > GradcheckTolerances{}.gradient) {
      throw CheckFailure(fmt::format("gradient check failed at epoch {}: relative error {:.3g} at {}", epoch,
                                     probe.worst, probe.where));
    }
  }

  // Trains `epochs` epochs on one data/collocation pair and logs the full-set
  // loss after each epoch.
  void run_stage(const LabeledSet& data, const CollocationSet& colloc, int epochs, std::optional<int> interval) {
    const std::size_t n = data.size();
    const std::size_t nc = colloc.size();
    const std::size_t batches = (n + cfg.batch_size - 1) / cfg.batch_size;
    std::vector<SpacetimePoint> batch_points, batch_colloc;
    std::vector<FieldValues> batch_targets;

    for (int e = 0; e < epochs; ++e) {
      ++epoch;
      const auto order = shuffle_rng.permutation(n);
      const auto colloc_order = shuffle_rng.permutation(nc);
      std::size_t residual_evals = 0;
      for (std::size_t b = 0; b < batches; ++b) {
        batch_points.clear();
        batch_targets.clear();
        batch_colloc.clear();
        const std::size_t lo = b * cfg.batch_size;
        const std::size_t hi = std::min(n, lo + cfg.batch_size);
        for (std::size_t i = lo; i < hi; ++i) {
          batch_points.push_back(data.points[order[i]]);
          batch_targets.push_back(data.targets[order[i]]);
        }
        // Collocation points are split evenly across the epoch's batches.
        for (std::size_t i = b * nc / batches; i < (b + 1) * nc / batches; ++i) {
          batch_colloc.push_back(colloc.points[colloc_order[i]]);
        }
        const DataBatch batch{batch_points, batch_targets};
        spot_check(batch, batch_colloc);
        const auto lg = loss_and_gradient(result.params, batch, batch_colloc, cfg.solution);
        residual_evals += batch_colloc.size();
        adam_step(result.params, lg.gradient, result.adam, cfg.learning_rate, cfg.adam);
      }

      TrainingLogRecord record{epoch, interval,
                               total_loss(result.params, DataBatch::of(data), colloc.points, cfg.solution),
                               wall_millis()};
      result.log.push_back(record);
      result.residual_evals_per_epoch.push_back(residual_evals);
      if (observer) observer(record);
      if (!std::isfinite(record.losses.total)) {
        throw NumericError(fmt::format("non-finite total loss at epoch {}", epoch));
      }
    }
  }
};

}  // namespace

TrainResult train_standard(const TrainConfig& cfg, const LogObserver& observer) {
  validate(cfg);
  if (cfg.curriculum) throw ConfigError("train_standard called with a curriculum configuration");
  Session session(cfg, observer);
  LabeledSet data = extract_ic(cfg.grid, cfg.solution);
  data.append(extract_bc(cfg.grid, cfg.solution));
  const CollocationSet colloc =
      lhs_sample(cfg.colloc_total, Box::unit(), cfg.seed + seed_offset::kCollocation, cfg.lhs_jitter);
  session.run_stage(data, colloc, cfg.epochs, std::nullopt);
  return std::move(session.result);
}

TrainResult train_curriculum(const TrainConfig& cfg, const LogObserver& observer) {
  validate(cfg);
  if (!cfg.curriculum) throw ConfigError("train_curriculum needs a curriculum section");
  const auto& cur = *cfg.curriculum;
  Session session(cfg, observer);
  const auto schedule = build_schedule(cfg.grid, cfg.solution, cur.n_intervals,
                                       cfg.colloc_total / static_cast<std::size_t>(cur.n_intervals), cur.mode,
                                       cfg.seed + seed_offset::kCollocation, {cur.ic_subsample, cfg.lhs_jitter});
  for (int i = 0; i < cur.n_intervals; ++i) {
    session.run_stage(schedule.stage_data(i), schedule.stage_colloc(i), cur.epochs_per_interval, i);
  }
  return std::move(session.result);
}

}  // namespace poropinn
