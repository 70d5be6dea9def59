#include "poropinn/eval_report.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "poropinn/errors.hpp"

namespace poropinn {

namespace {

constexpr double kNormFloor = 1e-12;

// Accumulates squared error, squared reference and max-abs error per field.
struct NormAccumulator {
  std::array<double, 3> err2{};
  std::array<double, 3> ref2{};
  ErrorNorms norms{};

  void add(const FieldValues& exact, const FieldValues& pred) {
    for (int f = 0; f < 3; ++f) {
      const double e = pred[f] - exact[f];
      err2[f] += e * e;
      ref2[f] += exact[f] * exact[f];
      norms[f].max_abs = std::max(norms[f].max_abs, std::abs(e));
    }
  }

  ErrorNorms finish() const {
    ErrorNorms out = norms;
    for (int f = 0; f < 3; ++f) out[f].rel_l2 = std::sqrt(err2[f]) / std::max(std::sqrt(ref2[f]), kNormFloor);
    return out;
  }
};

}  // namespace

Predictor network_predictor(const MlpParams& params) {
  return [&params](const SpacetimePoint& q) { return forward(params, q); };
}

Predictor analytic_predictor(const SolutionParams& sp) {
  return [sp](const SpacetimePoint& q) { return analytic_solution(q, sp); };
}

FieldSlice field_slice(const Predictor& predict, double t_value, int nx, int nz, const SolutionParams& sp) {
  if (nx < 2 || nz < 2) throw UsageError("field_slice needs at least 2 points per axis");
  FieldSlice slice;
  slice.t_value = t_value;
  slice.nx = nx;
  slice.nz = nz;
  const std::size_t n = static_cast<std::size_t>(nx) * nz;
  for (int f = 0; f < 3; ++f) {
    for (auto* arr : {&slice.analytic[f], &slice.predicted[f], &slice.abs_error[f]}) {
      arr->nx = nx;
      arr->nz = nz;
      arr->values.resize(n);
    }
  }
  for (int iz = 0; iz < nz; ++iz) {
    for (int ix = 0; ix < nx; ++ix) {
      const SpacetimePoint q{grid_coordinate(ix, nx), grid_coordinate(iz, nz), t_value};
      const FieldValues exact = analytic_solution(q, sp);
      const FieldValues pred = predict(q);
      const std::size_t k = static_cast<std::size_t>(iz) * nx + ix;
      for (int f = 0; f < 3; ++f) {
        slice.analytic[f].values[k] = exact[f];
        slice.predicted[f].values[k] = pred[f];
        slice.abs_error[f].values[k] = std::abs(exact[f] - pred[f]);
      }
    }
  }
  return slice;
}

FieldSlice field_slice(const MlpParams& params, double t_value, int nx, int nz, const SolutionParams& sp) {
  return field_slice(network_predictor(params), t_value, nx, nz, sp);
}

std::vector<double> default_profile_times() {
  std::vector<double> times;
  for (int i = 0; i <= 10; ++i) times.push_back(static_cast<double>(i) / 10.0);
  return times;
}

ProfileTable profile(const Predictor& predict, double x_value, std::span<const double> times, int nz,
                     const SolutionParams& sp) {
  if (nz < 2) throw UsageError("profile needs at least 2 points along z");
  ProfileTable table;
  table.x_value = x_value;
  table.times.assign(times.begin(), times.end());
  std::sort(table.times.begin(), table.times.end());
  for (double t : table.times) {
    for (int iz = 0; iz < nz; ++iz) {
      const SpacetimePoint q{x_value, grid_coordinate(iz, nz), t};
      table.rows.push_back({q.z, t, analytic_solution(q, sp), predict(q)});
    }
  }
  return table;
}

ProfileTable profile(const MlpParams& params, double x_value, std::span<const double> times, int nz,
                     const SolutionParams& sp) {
  return profile(network_predictor(params), x_value, times, nz, sp);
}

ErrorNorms error_norms(const Predictor& predict, const GridSpec& gs, const SolutionParams& sp) {
  NormAccumulator acc;
  for (const auto& q : make_grid(gs)) acc.add(analytic_solution(q, sp), predict(q));
  return acc.finish();
}

ErrorNorms error_norms(const MlpParams& params, const GridSpec& gs, const SolutionParams& sp) {
  return error_norms(network_predictor(params), gs, sp);
}

ErrorNorms slice_errors(const FieldSlice& slice) {
  NormAccumulator acc;
  const std::size_t n = slice.analytic[0].values.size();
  for (std::size_t k = 0; k < n; ++k) {
    acc.add({slice.analytic[kU].values[k], slice.analytic[kV].values[k], slice.analytic[kP].values[k]},
            {slice.predicted[kU].values[k], slice.predicted[kV].values[k], slice.predicted[kP].values[k]});
  }
  return acc.finish();
}

std::string format_coordinate(double value) {
  if (value == std::floor(value) && std::abs(value) < 1e15) return fmt::format("{:.1f}", value);
  return fmt::format("{}", value);
}

void write_slice_csv(std::ostream& os, const FieldSlice& slice) {
  fmt::print(os, "# t={}\n", format_coordinate(slice.t_value));
  os << "x,z,u_exact,v_exact,p_exact,u_pred,v_pred,p_pred\n";
  for (int iz = 0; iz < slice.nz; ++iz) {
    for (int ix = 0; ix < slice.nx; ++ix) {
      fmt::print(os, "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", grid_coordinate(ix, slice.nx),
                 grid_coordinate(iz, slice.nz), slice.analytic[kU].at(ix, iz), slice.analytic[kV].at(ix, iz),
                 slice.analytic[kP].at(ix, iz), slice.predicted[kU].at(ix, iz), slice.predicted[kV].at(ix, iz),
                 slice.predicted[kP].at(ix, iz));
    }
  }
}

void write_profile_csv(std::ostream& os, const ProfileTable& table) {
  os << "z,t,u_exact,u_pred,v_exact,v_pred,p_exact,p_pred\n";
  for (const auto& r : table.rows) {
    fmt::print(os, "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.z, r.t, r.exact.u,
               r.predicted.u, r.exact.v, r.predicted.v, r.exact.p, r.predicted.p);
  }
}

void write_norms(std::ostream& os, std::span<const NormsEntry> entries) {
  constexpr const char* names[3] = {"u", "v", "p"};
  os << "scope,field,rel_l2,max_abs\n";
  for (const auto& e : entries) {
    for (int f = 0; f < 3; ++f) {
      fmt::print(os, "{},{},{:.17g},{:.17g}\n", e.scope, names[f], e.norms[f].rel_l2, e.norms[f].max_abs);
    }
  }
}

}  // namespace poropinn
