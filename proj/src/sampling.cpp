#include "poropinn/sampling.hpp"

#include <algorithm>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "poropinn/errors.hpp"
#include "poropinn/random.hpp"

namespace poropinn {

void validate(const GridSpec& gs) {
  if (gs.nx < 2 || gs.nz < 2 || gs.nt < 2) {
    throw ConfigError(fmt::format("grid needs at least 2 points per axis (got {}x{}x{})", gs.nx,
                                  gs.nz, gs.nt));
  }
}

double grid_coordinate(int i, int n) { return static_cast<double>(i) / static_cast<double>(n - 1); }

std::vector<SpacetimePoint> make_grid(const GridSpec& gs) {
  validate(gs);
  std::vector<SpacetimePoint> grid;
  grid.reserve(static_cast<std::size_t>(gs.nx) * gs.nz * gs.nt);
  for (int k = 0; k < gs.nt; ++k) {
    for (int j = 0; j < gs.nz; ++j) {
      for (int i = 0; i < gs.nx; ++i) {
        grid.push_back({grid_coordinate(i, gs.nx), grid_coordinate(j, gs.nz), grid_coordinate(k, gs.nt)});
      }
    }
  }
  return grid;
}

void LabeledSet::append(const LabeledSet& other) {
  if (empty()) {
    kind = other.kind;
  } else if (!other.empty() && kind != other.kind) {
    kind = SetKind::kMixed;
  }
  points.insert(points.end(), other.points.begin(), other.points.end());
  targets.insert(targets.end(), other.targets.begin(), other.targets.end());
}

namespace {

void add_labeled(LabeledSet& set, const SpacetimePoint& q, const SolutionParams& sp) {
  set.points.push_back(q);
  set.targets.push_back(analytic_solution(q, sp));
}

// Spatial boundary points of time level k in grid order.
void append_boundary_level(LabeledSet& set, const GridSpec& gs, int k, const SolutionParams& sp) {
  const double t = grid_coordinate(k, gs.nt);
  for (int j = 0; j < gs.nz; ++j) {
    for (int i = 0; i < gs.nx; ++i) {
      if (i == 0 || i == gs.nx - 1 || j == 0 || j == gs.nz - 1) {
        add_labeled(set, {grid_coordinate(i, gs.nx), grid_coordinate(j, gs.nz), t}, sp);
      }
    }
  }
}

}  // namespace

LabeledSet extract_ic(const GridSpec& gs, const SolutionParams& sp) {
  validate(gs);
  LabeledSet set;
  set.kind = SetKind::kInitial;
  for (int j = 0; j < gs.nz; ++j) {
    for (int i = 0; i < gs.nx; ++i) {
      add_labeled(set, {grid_coordinate(i, gs.nx), grid_coordinate(j, gs.nz), 0.0}, sp);
    }
  }
  return set;
}

LabeledSet extract_bc(const GridSpec& gs, const SolutionParams& sp) {
  validate(gs);
  LabeledSet set;
  set.kind = SetKind::kBoundary;
  for (int k = 0; k < gs.nt; ++k) append_boundary_level(set, gs, k, sp);
  return set;
}

std::size_t lhs_stratum(double value, const AxisRange& range, std::size_t n) {
  const double u = (value - range.lo) / (range.hi - range.lo);
  const auto k = static_cast<std::size_t>(std::max(0.0, u * static_cast<double>(n)));
  return std::min(k, n - 1);
}

CollocationSet lhs_sample(std::size_t n, const Box& box, std::uint64_t seed, LhsJitter jitter) {
  if (n == 0) throw UsageError("lhs_sample needs at least one point");
  for (const auto& r : box.axes) {
    if (!(r.hi > r.lo)) throw UsageError("lhs_sample needs non-empty axis ranges");
  }
  Rng rng(seed);
  std::vector<std::array<double, 3>> coords(n);
  const double dn = static_cast<double>(n);
  for (int axis = 0; axis < 3; ++axis) {
    const auto& r = box.axes[axis];
    const auto strata = rng.permutation(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double offset = jitter == LhsJitter::kCentered ? 0.5 : rng.uniform01();
      const double k = static_cast<double>(strata[i]);
      // Clamp into the stratum: rounding in lo + w*(k+u)/n may land on its upper edge.
      const double lo = r.lo + (r.hi - r.lo) * (k / dn);
      double v = r.lo + (r.hi - r.lo) * ((k + offset) / dn);
      while (v > lo && lhs_stratum(v, r, n) > strata[i]) v = std::nextafter(v, lo);
      while (lhs_stratum(v, r, n) < strata[i]) v = std::nextafter(v, r.hi);
      coords[i][axis] = v;
    }
  }
  CollocationSet set;
  set.t_lo = box.axes[kT].lo;
  set.t_hi = box.axes[kT].hi;
  set.points.reserve(n);
  for (const auto& c : coords) set.points.push_back({c[0], c[1], c[2]});
  return set;
}

int interval_of_level(int level, int nt, int n_intervals) {
  if (level <= 0) return 0;
  const long long span = nt - 1;
  // smallest i with level * n <= (i + 1) * (nt - 1)
  const long long num = static_cast<long long>(level) * n_intervals;
  return static_cast<int>((num + span - 1) / span - 1);
}

LabeledSet CurriculumSchedule::stage_data(int stage) const {
  if (mode == CurriculumMode::kIncremental) return per_interval_data.at(stage);
  LabeledSet set;
  for (int i = 0; i <= stage; ++i) set.append(per_interval_data.at(i));
  return set;
}

CollocationSet CurriculumSchedule::stage_colloc(int stage) const {
  if (mode == CurriculumMode::kIncremental) return per_interval_colloc.at(stage);
  CollocationSet set;
  set.t_lo = per_interval_colloc.at(0).t_lo;
  set.t_hi = per_interval_colloc.at(stage).t_hi;
  for (int i = 0; i <= stage; ++i) {
    const auto& pts = per_interval_colloc.at(i).points;
    set.points.insert(set.points.end(), pts.begin(), pts.end());
  }
  return set;
}

CurriculumSchedule build_schedule(const GridSpec& gs, const SolutionParams& sp, int n_intervals,
                                  std::size_t colloc_per_interval, CurriculumMode mode,
                                  std::uint64_t seed, const ScheduleOptions& options) {
  validate(gs);
  if (n_intervals < 1) throw ConfigError("curriculum needs at least one interval");
  if (n_intervals > gs.nt - 1) {
    throw ConfigError(fmt::format(
        "{} intervals cannot each own a time level of a {}-level grid; need n_intervals <= nt - 1",
        n_intervals, gs.nt));
  }
  if (colloc_per_interval == 0) throw ConfigError("collocation points per interval must be positive");

  CurriculumSchedule schedule;
  schedule.n_intervals = n_intervals;
  schedule.mode = mode;
  for (int i = 0; i <= n_intervals; ++i) {
    schedule.edges.push_back(static_cast<double>(i) / static_cast<double>(n_intervals));
  }
  schedule.per_interval_data.resize(n_intervals);
  for (auto& set : schedule.per_interval_data) set.kind = SetKind::kBoundary;

  LabeledSet ic = extract_ic(gs, sp);
  if (options.ic_subsample > 0 && options.ic_subsample < ic.size()) {
    Rng rng(seed + 0x9E3779B97F4A7C15ULL);
    auto order = rng.permutation(ic.size());
    order.resize(options.ic_subsample);
    std::sort(order.begin(), order.end());
    LabeledSet sub;
    sub.kind = SetKind::kInitial;
    for (std::size_t idx : order) {
      sub.points.push_back(ic.points[idx]);
      sub.targets.push_back(ic.targets[idx]);
    }
    ic = std::move(sub);
  }
  schedule.per_interval_data[0].append(ic);

  for (int k = 0; k < gs.nt; ++k) {
    LabeledSet level;
    level.kind = SetKind::kBoundary;
    append_boundary_level(level, gs, k, sp);
    schedule.per_interval_data[interval_of_level(k, gs.nt, n_intervals)].append(level);
  }

  for (int i = 0; i < n_intervals; ++i) {
    schedule.per_interval_colloc.push_back(
        lhs_sample(colloc_per_interval, Box::time_slab(schedule.edges[i], schedule.edges[i + 1]),
                   seed + static_cast<std::uint64_t>(i), options.jitter));
  }
  return schedule;
}

void write_csv(std::ostream& os, const LabeledSet& set) {
  os << "x,z,t,u,v,p\n";
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& q = set.points[i];
    const auto& f = set.targets[i];
    fmt::print(os, "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", q.x, q.z, q.t, f.u, f.v, f.p);
  }
}

void write_csv(std::ostream& os, const CollocationSet& set) {
  os << "x,z,t\n";
  for (const auto& q : set.points) fmt::print(os, "{:.17g},{:.17g},{:.17g}\n", q.x, q.z, q.t);
}

}  // namespace poropinn
