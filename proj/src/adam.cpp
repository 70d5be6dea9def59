#include <cmath>

#include "poropinn/errors.hpp"
#include "poropinn/training.hpp"

namespace poropinn {

void adam_step(MlpParams& params, const ParamGradient& grad, AdamState& state, double learning_rate,
               const AdamHyper& hyper) {
  if (!params.same_shape(grad) || !params.same_shape(state.first_moment) ||
      !params.same_shape(state.second_moment)) {
    throw UsageError("adam_step: parameter, gradient and moment shapes differ");
  }
  state.step_count += 1;
  const double step = static_cast<double>(state.step_count);
  const double correction1 = 1.0 - std::pow(hyper.beta1, step);
  const double correction2 = 1.0 - std::pow(hyper.beta2, step);

  auto theta = params.values();
  const auto g = grad.values();
  auto m = state.first_moment.values();
  auto v = state.second_moment.values();
  for (std::size_t i = 0; i < theta.size(); ++i) {
    m[i] = hyper.beta1 * m[i] + (1.0 - hyper.beta1) * g[i];
    v[i] = hyper.beta2 * v[i] + (1.0 - hyper.beta2) * g[i] * g[i];
    const double m_hat = m[i] / correction1;
    const double v_hat = v[i] / correction2;
    theta[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + hyper.epsilon);
  }
}

}  // namespace poropinn
