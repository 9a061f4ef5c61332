#pragma once

#include <span>
#include <vector>

namespace wrobust {

enum class StepDirection { Ascent, Descent };

struct RmsPropConfig {
  double lr = 0.005;
  double decay = 0.9;
  double eps = 1e-8;
};

/// Squared-gradient accumulator for one parameter tensor.
struct RmsPropState {
  std::vector<double> v;
};

/// v <- decay·v + (1-decay)·g² ; params <- params ± lr·g/(√v + eps).
/// The state is sized on first use and must keep matching afterwards.
void rmsprop_step(RmsPropState& state, std::span<double> params,
                  std::span<const double> grads, const RmsPropConfig& cfg,
                  StepDirection direction);

/// Minibatch size schedule: 32 up to n < 1000, 128 for 1000 <= n <= 5000,
/// 256 beyond.
int batch_size_for(int n);

}  // namespace wrobust
