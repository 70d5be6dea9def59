#pragma once

#include "poropinn/net_core.hpp"

namespace poropinn {

/// Shape parameters of the manufactured solution plus the Lamé ratio
/// parameter eta = 1 + lambda/mu.
struct SolutionParams {
  double alpha = 0.5;
  double beta = 2.0;
  double delta = 1.0;
  double eps = 1.0;
  double zeta = 1.5;
  double eta = 2.5;

  bool operator==(const SolutionParams&) const = default;
};

void validate(const SolutionParams& sp);

/// Dimensional material constants used for (re)scaling.
struct MaterialParams {
  double lambda_lame = 0.0;
  double mu_lame = 1.0;
  double k_hydraulic = 1.0;
  double gamma_f = 1.0;
  double l_ref = 1.0;
};

void validate(const MaterialParams& mat);

double eta_from_lame(double lambda_lame, double mu_lame);

struct ScaledState {
  SpacetimePoint point;
  FieldValues fields;
};

/// x = x'/l, z = z'/l, u = u'/l, v = v'/l, t = (lambda+2mu) k/(gamma_f l^2) t',
/// p = p'/(lambda+2mu).
ScaledState nondimensionalize(const SpacetimePoint& point_dim, const FieldValues& fields_dim,
                              const MaterialParams& mat);
ScaledState redimensionalize(const SpacetimePoint& point, const FieldValues& fields,
                             const MaterialParams& mat);

FieldValues analytic_solution(const SpacetimePoint& q, const SolutionParams& sp);

/// Closed-form value, Jacobian and Hessians of the manufactured solution.
DerivBundle analytic_bundle(const SpacetimePoint& q, const SolutionParams& sp);

// Nondimensional governing-equation residuals evaluated on a derivative bundle.
double residual_f(const DerivBundle& b, double eta);
double residual_g(const DerivBundle& b, double eta);
double residual_h(const DerivBundle& b);

// Source terms that the manufactured solution leaves in each equation.
double source_ru(const SpacetimePoint& q, const SolutionParams& sp);
double source_rv(const SpacetimePoint& q, const SolutionParams& sp);
double source_rp(const SpacetimePoint& q, const SolutionParams& sp);

}  // namespace poropinn
