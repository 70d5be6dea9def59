#include "poropinn/poroelastic_pde.hpp"

#include <cmath>

#include "poropinn/errors.hpp"

namespace poropinn {

void validate(const SolutionParams& sp) {
  for (double v : {sp.alpha, sp.beta, sp.delta, sp.eps, sp.zeta, sp.eta}) {
    if (!std::isfinite(v)) throw ParameterError("solution parameters must be finite");
  }
}

void validate(const MaterialParams& mat) {
  if (!std::isfinite(mat.lambda_lame)) throw ParameterError("lambda must be finite");
  if (!(mat.mu_lame > 0.0)) throw ParameterError("mu must be positive");
  if (!(mat.k_hydraulic > 0.0)) throw ParameterError("hydraulic conductivity must be positive");
  if (!(mat.gamma_f > 0.0)) throw ParameterError("fluid unit weight must be positive");
  if (!(mat.l_ref > 0.0)) throw ParameterError("reference length must be positive");
}

double eta_from_lame(double lambda_lame, double mu_lame) {
  if (!(mu_lame > 0.0)) throw ParameterError("mu must be positive");
  return 1.0 + lambda_lame / mu_lame;
}

namespace {

double time_scale(const MaterialParams& mat) {
  return (mat.lambda_lame + 2.0 * mat.mu_lame) * mat.k_hydraulic / (mat.gamma_f * mat.l_ref * mat.l_ref);
}

}  // namespace

ScaledState nondimensionalize(const SpacetimePoint& point_dim, const FieldValues& fields_dim,
                              const MaterialParams& mat) {
  validate(mat);
  const double l = mat.l_ref;
  const double modulus = mat.lambda_lame + 2.0 * mat.mu_lame;
  return {{point_dim.x / l, point_dim.z / l, time_scale(mat) * point_dim.t},
          {fields_dim.u / l, fields_dim.v / l, fields_dim.p / modulus}};
}

ScaledState redimensionalize(const SpacetimePoint& point, const FieldValues& fields,
                             const MaterialParams& mat) {
  validate(mat);
  const double l = mat.l_ref;
  const double modulus = mat.lambda_lame + 2.0 * mat.mu_lame;
  return {{point.x * l, point.z * l, point.t / time_scale(mat)},
          {fields.u * l, fields.v * l, fields.p * modulus}};
}

FieldValues analytic_solution(const SpacetimePoint& q, const SolutionParams& sp) {
  const auto [x, z, t] = q;
  return {x * (1.0 - std::exp(-sp.alpha * z)) * t * std::exp(-sp.delta * t),
          (1.0 - std::exp(-sp.beta * z)) * t * t * std::exp(-sp.eps * t),
          3.0 * z * (1.0 - z) * std::exp(-sp.zeta * t)};
}

DerivBundle analytic_bundle(const SpacetimePoint& q, const SolutionParams& sp) {
  const auto [x, z, t] = q;
  const double ea = std::exp(-sp.alpha * z);
  const double eb = std::exp(-sp.beta * z);
  const double ed = std::exp(-sp.delta * t);
  const double ee = std::exp(-sp.eps * t);
  const double ez = std::exp(-sp.zeta * t);

  // u = x * A(z) * T(t) with A = 1 - e^{-alpha z}, T = t e^{-delta t}
  const double A = 1.0 - ea, Az = sp.alpha * ea, Azz = -sp.alpha * sp.alpha * ea;
  const double T = t * ed, Tt = (1.0 - sp.delta * t) * ed, Ttt = sp.delta * (sp.delta * t - 2.0) * ed;
  // v = B(z) * S(t) with B = 1 - e^{-beta z}, S = t^2 e^{-eps t}
  const double B = 1.0 - eb, Bz = sp.beta * eb, Bzz = -sp.beta * sp.beta * eb;
  const double S = t * t * ee, St = t * (2.0 - sp.eps * t) * ee;
  const double Stt = (2.0 - 4.0 * sp.eps * t + sp.eps * sp.eps * t * t) * ee;
  // p = 3 Z(z) E(t) with Z = z(1 - z), E = e^{-zeta t}
  const double Z = z * (1.0 - z), Zz = 1.0 - 2.0 * z, Zzz = -2.0;
  const double E = ez, Et = -sp.zeta * ez, Ett = sp.zeta * sp.zeta * ez;

  DerivBundle b;
  b.point = q;
  b.value = {x * A * T, B * S, 3.0 * Z * E};

  b.jacobian[kU] = {A * T, x * Az * T, x * A * Tt};
  b.jacobian[kV] = {0.0, Bz * S, B * St};
  b.jacobian[kP] = {0.0, 3.0 * Zz * E, 3.0 * Z * Et};

  auto& hu = b.hessians[kU];
  hu[kX] = {0.0, Az * T, A * Tt};
  hu[kZ] = {Az * T, x * Azz * T, x * Az * Tt};
  hu[kT] = {A * Tt, x * Az * Tt, x * A * Ttt};

  auto& hv = b.hessians[kV];
  hv[kX] = {0.0, 0.0, 0.0};
  hv[kZ] = {0.0, Bzz * S, Bz * St};
  hv[kT] = {0.0, Bz * St, B * Stt};

  auto& hp = b.hessians[kP];
  hp[kX] = {0.0, 0.0, 0.0};
  hp[kZ] = {0.0, 3.0 * Zzz * E, 3.0 * Zz * Et};
  hp[kT] = {0.0, 3.0 * Zz * Et, 3.0 * Z * Ett};
  return b;
}

double residual_f(const DerivBundle& b, double eta) {
  const auto& hu = b.hessians[kU];
  const auto& hv = b.hessians[kV];
  return (eta + 1.0) * hu[kX][kX] + hu[kZ][kZ] + eta * hv[kX][kZ] + (eta + 1.0) * b.jacobian[kP][kX];
}

double residual_g(const DerivBundle& b, double eta) {
  const auto& hu = b.hessians[kU];
  const auto& hv = b.hessians[kV];
  return hv[kX][kX] + (eta + 1.0) * hv[kZ][kZ] + eta * hu[kX][kZ] + (eta + 1.0) * b.jacobian[kP][kZ];
}

double residual_h(const DerivBundle& b) {
  const auto& hp = b.hessians[kP];
  return b.hessians[kU][kT][kX] + b.hessians[kV][kT][kZ] - hp[kX][kX] - hp[kZ][kZ];
}

// The sources are the expanded form of the factored residuals: multiplying
// out the shared exponential keeps every exponent non-positive on the domain.
double source_ru(const SpacetimePoint& q, const SolutionParams& sp) {
  return -sp.alpha * sp.alpha * q.t * q.x * std::exp(-sp.alpha * q.z) * std::exp(-sp.delta * q.t);
}

double source_rv(const SpacetimePoint& q, const SolutionParams& sp) {
  const auto [x, z, t] = q;
  (void)x;
  const double eta1 = sp.eta + 1.0;
  return sp.alpha * sp.eta * t * std::exp(-sp.alpha * z) * std::exp(-sp.delta * t) -
         sp.beta * sp.beta * eta1 * t * t * std::exp(-sp.beta * z) * std::exp(-sp.eps * t) +
         3.0 * eta1 * (1.0 - 2.0 * z) * std::exp(-sp.zeta * t);
}

double source_rp(const SpacetimePoint& q, const SolutionParams& sp) {
  const auto [x, z, t] = q;
  (void)x;
  return sp.beta * t * (2.0 - sp.eps * t) * std::exp(-sp.beta * z) * std::exp(-sp.eps * t) +
         (1.0 - std::exp(-sp.alpha * z)) * (1.0 - sp.delta * t) * std::exp(-sp.delta * t) +
         6.0 * std::exp(-sp.zeta * t);
}

}  // namespace poropinn
