#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "poropinn/net_core.hpp"
#include "poropinn/poroelastic_pde.hpp"
#include "poropinn/sampling.hpp"

namespace poropinn {

using Predictor = std::function<FieldValues(const SpacetimePoint&)>;

Predictor network_predictor(const MlpParams& params);
Predictor analytic_predictor(const SolutionParams& sp);

/// nx-by-nz array over the uniform spatial grid, x fastest.
struct SpatialField {
  int nx = 0;
  int nz = 0;
  std::vector<double> values;

  double at(int ix, int iz) const { return values[static_cast<std::size_t>(iz) * nx + ix]; }
};

struct FieldSlice {
  double t_value = 0.0;
  int nx = 0;
  int nz = 0;
  std::array<SpatialField, 3> analytic;
  std::array<SpatialField, 3> predicted;
  std::array<SpatialField, 3> abs_error;
};

FieldSlice field_slice(const Predictor& predict, double t_value, int nx, int nz, const SolutionParams& sp);
FieldSlice field_slice(const MlpParams& params, double t_value, int nx, int nz, const SolutionParams& sp);

struct ProfileRow {
  double z = 0.0;
  double t = 0.0;
  FieldValues exact;
  FieldValues predicted;
};

/// Rows ordered by t, then z, both ascending.
struct ProfileTable {
  double x_value = 0.0;
  std::vector<double> times;
  std::vector<ProfileRow> rows;
};

/// 0.0, 0.1, ..., 1.0
std::vector<double> default_profile_times();

ProfileTable profile(const Predictor& predict, double x_value, std::span<const double> times, int nz,
                     const SolutionParams& sp);
ProfileTable profile(const MlpParams& params, double x_value, std::span<const double> times, int nz,
                     const SolutionParams& sp);

struct FieldError {
  double rel_l2 = 0.0;
  double max_abs = 0.0;
};

using ErrorNorms = std::array<FieldError, 3>;

/// Relative L2 (denominator floored at 1e-12) and max-abs error per field over
/// the full space-time grid.
ErrorNorms error_norms(const Predictor& predict, const GridSpec& gs, const SolutionParams& sp);
ErrorNorms error_norms(const MlpParams& params, const GridSpec& gs, const SolutionParams& sp);

/// Same norms restricted to one time slice.
ErrorNorms slice_errors(const FieldSlice& slice);

void write_slice_csv(std::ostream& os, const FieldSlice& slice);
void write_profile_csv(std::ostream& os, const ProfileTable& table);
/// One block of norms labelled by where they were measured ("grid", "t=1.0").
struct NormsEntry {
  std::string scope;
  ErrorNorms norms;
};
/// CSV with columns scope,field,rel_l2,max_abs.
void write_norms(std::ostream& os, std::span<const NormsEntry> entries);

/// Formats a selector value for file headers: 0.5 -> "0.5", 1 -> "1.0".
std::string format_coordinate(double value);

}  // namespace poropinn
