#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "poropinn/net_core.hpp"
#include "poropinn/poroelastic_pde.hpp"

namespace poropinn {

/// Points per axis of the uniform space-time grid on [0,1]^3, endpoints included.
struct GridSpec {
  int nx = 50;
  int nz = 50;
  int nt = 50;

  bool operator==(const GridSpec&) const = default;
};

void validate(const GridSpec& gs);

/// i-th of n uniformly spaced values on [0,1]; exact at both ends.
double grid_coordinate(int i, int n);

/// Row-major grid: t outermost, then z, x innermost.
std::vector<SpacetimePoint> make_grid(const GridSpec& gs);

enum class SetKind { kInitial, kBoundary, kMixed };

struct LabeledSet {
  std::vector<SpacetimePoint> points;
  std::vector<FieldValues> targets;
  SetKind kind = SetKind::kMixed;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  void append(const LabeledSet& other);
};

LabeledSet extract_ic(const GridSpec& gs, const SolutionParams& sp);

/// Every spatial-boundary grid point at every time level, t = 0 included, so
/// the t = 0 edge points appear in both this set and the initial set.
LabeledSet extract_bc(const GridSpec& gs, const SolutionParams& sp);

struct AxisRange {
  double lo = 0.0;
  double hi = 1.0;
};

struct Box {
  std::array<AxisRange, 3> axes{};  // x, z, t

  static Box unit() { return {}; }
  static Box time_slab(double t_lo, double t_hi) { return {{AxisRange{}, AxisRange{}, AxisRange{t_lo, t_hi}}}; }
};

enum class LhsJitter { kUniform, kCentered };

struct CollocationSet {
  std::vector<SpacetimePoint> points;
  double t_lo = 0.0;
  double t_hi = 1.0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Latin hypercube design: each axis range is cut into n equal strata and
/// every stratum holds exactly one sample.
CollocationSet lhs_sample(std::size_t n, const Box& box, std::uint64_t seed,
                          LhsJitter jitter = LhsJitter::kUniform);

/// Index of the stratum containing `value` when `range` is cut into n pieces.
std::size_t lhs_stratum(double value, const AxisRange& range, std::size_t n);

enum class CurriculumMode { kIncremental, kCumulative };

struct CurriculumSchedule {
  int n_intervals = 0;
  std::vector<double> edges;
  std::vector<LabeledSet> per_interval_data;
  std::vector<CollocationSet> per_interval_colloc;
  CurriculumMode mode = CurriculumMode::kIncremental;

  /// Training data for stage i: interval i alone, or intervals 0..i when cumulative.
  LabeledSet stage_data(int stage) const;
  CollocationSet stage_colloc(int stage) const;
};

struct ScheduleOptions {
  /// 0 keeps every initial-condition point; otherwise a uniform random subset
  /// of this size is attached to interval 0.
  std::size_t ic_subsample = 0;
  LhsJitter jitter = LhsJitter::kUniform;
};

/// Interval owning grid time level k: intervals are (i/n, (i+1)/n], with t = 0
/// assigned to interval 0.
int interval_of_level(int level, int nt, int n_intervals);

/// Interval i receives collocation points drawn with seed + i.
CurriculumSchedule build_schedule(const GridSpec& gs, const SolutionParams& sp, int n_intervals,
                                  std::size_t colloc_per_interval, CurriculumMode mode,
                                  std::uint64_t seed, const ScheduleOptions& options = {});

void write_csv(std::ostream& os, const LabeledSet& set);
void write_csv(std::ostream& os, const CollocationSet& set);

}  // namespace poropinn
