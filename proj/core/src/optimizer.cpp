#include "wrobust/optimizer.hpp"

#include <cmath>

#include "wrobust/errors.hpp"

namespace wrobust {

void rmsprop_step(RmsPropState& state, std::span<double> params,
                  std::span<const double> grads, const RmsPropConfig& cfg,
                  StepDirection direction) {
  if (params.size() != grads.size())
    throw InvalidInputError("rmsprop_step: parameter/gradient shape mismatch");
  if (state.v.empty()) state.v.assign(params.size(), 0.0);
  if (state.v.size() != params.size())
    throw InvalidInputError("rmsprop_step: state shape mismatch");

  const double sign = direction == StepDirection::Ascent ? 1.0 : -1.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.v[i] = cfg.decay * state.v[i] + (1.0 - cfg.decay) * g * g;
    params[i] += sign * cfg.lr * g / (std::sqrt(state.v[i]) + cfg.eps);
  }
}

int batch_size_for(int n) {
  if (n < 1) throw InvalidInputError("batch_size_for: n must be positive");
  if (n < 1000) return 32;
  if (n <= 5000) return 128;
  return 256;
}

}  // namespace wrobust
