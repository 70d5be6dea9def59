#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "poropinn/net_core.hpp"
#include "poropinn/poroelastic_pde.hpp"
#include "poropinn/training.hpp"

namespace poropinn {

// Finite-difference conformance checks shared by the CLI and the trainer's
// optional gradient spot-check.

/// Largest error seen by a check and where it occurred.
struct ErrorProbe {
  double worst = 0.0;
  std::string where;
  std::size_t compared = 0;

  void record(double error, const std::function<std::string()>& location);
};

using DerivEvaluator = std::function<DerivBundle(const MlpParams&, const SpacetimePoint&)>;

/// Jacobian and Hessian of `eval` against central differences of forward():
/// step 1e-4 for first derivatives, 1e-3 for second. Errors are normalized
/// by 1 + |finite-difference value|.
struct InputDerivErrors {
  ErrorProbe jacobian;
  ErrorProbe hessian;
};
InputDerivErrors check_input_derivatives(const MlpParams& params, std::span<const SpacetimePoint> points,
                                         const DerivEvaluator& eval);

/// loss_and_gradient against central differences of the same batch objective
/// over every parameter. The differenced loss is evaluated in long double by
/// an independent jet implementation so rounding stays far below the
/// tolerance. Entries where both values are below `floor` are skipped.
ErrorProbe check_param_gradient(const MlpParams& params, const DataBatch& batch,
                                std::span<const SpacetimePoint> colloc, const SolutionParams& sp,
                                double step = 1e-6, double floor = 1e-10);

/// |f(analytic) - r_u|, |g(analytic) - r_v|, |h(analytic) - r_p| (absolute).
ErrorProbe check_residual_identity(std::span<const SpacetimePoint> points, const SolutionParams& sp);

struct GradcheckTolerances {
  double jacobian = 1e-6;
  double hessian = 1e-5;
  double gradient = 1e-5;
  double residual = 1e-10;
};

struct GradcheckReport {
  ErrorProbe jacobian;
  ErrorProbe hessian;
  ErrorProbe gradient;
  ErrorProbe residual;

  bool passed(const GradcheckTolerances& tol = {}) const {
    return jacobian.worst <= tol.jacobian && hessian.worst <= tol.hessian &&
           gradient.worst <= tol.gradient && residual.worst <= tol.residual;
  }
};

struct GradcheckPlan {
  LayerSpec net;
  SolutionParams solution;
  std::size_t derivative_samples = 100;
  std::size_t gradient_batches = 1;
  std::size_t batch_points = 16;
  std::size_t residual_points = 1000;
  std::uint64_t seed = 0;
};

/// Runs all three suites on freshly initialized random networks.
GradcheckReport run_gradcheck(const GradcheckPlan& plan, const DerivEvaluator& eval = forward_with_derivs);

double relative_error(double actual, double reference);

}  // namespace poropinn
