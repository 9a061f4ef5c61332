#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wrobust/discriminator.hpp"
#include "wrobust/generators.hpp"
#include "wrobust/matrix.hpp"
#include "wrobust/optimizer.hpp"

namespace wrobust {

struct TrainConfig {
  int iters = 2000;
  int critic_steps_per_iter = 1;
  int gen_steps_per_iter = 1;
  double lr = 0.005;
  double rms_decay = 0.9;
  double rms_eps = 1e-8;
  int batch = 0;  // 0 -> batch_size_for(n)
  std::uint64_t seed = 0;
  ParamSpace param_space = Unbounded{};
  int eval_every = 50;
  /// Return the iterate with the smallest evaluated critic objective instead
  /// of the final one.
  bool best_trace = false;
  int checkpoint_every = 0;  // 0 disables checkpoints
  std::string checkpoint_dir;
};

struct TrainReport {
  Estimate estimate;
  std::vector<std::pair<int, double>> objective_trace;  // (iteration, value)
  double final_ipm = 0.0;
  double wall_time = 0.0;  // seconds; excluded from determinism comparisons
  std::uint64_t seed = 0;
  int iters = 0;
};

/// Alternating adversarial training: per iteration the critic ascends the
/// empirical advantage E_data f - E_gen f over fresh minibatches and is
/// projected feasible, then the generator ascends E_gen f through the critic's
/// input gradients and is projected onto its parameter space. Fully
/// deterministic given (data, net0, gen0, cfg).
TrainReport train(const Matrix& data, const DiscriminatorNet& net0,
                  const GeneratorModel& gen0, const TrainConfig& cfg);

/// E over data rows of f minus E over m_gen fresh generator draws of f; a
/// lower bound on the restricted-class IPM for the fixed critic.
double evaluate_ipm(const DiscriminatorNet& net, const Matrix& data,
                    const GeneratorModel& g, int m_gen, RngStream& rng);

/// Full training snapshot: parameters, optimizer accumulators, and the rng
/// cursor positions needed for bit-exact resume.
struct Checkpoint {
  int iteration = 0;
  DiscriminatorNet net;
  GeneratorModel gen;
  std::vector<RmsPropState> net_opt;
  std::vector<RmsPropState> gen_opt;
  RngStream::State batch_rng;
  RngStream::State noise_rng;
};

void save_checkpoint(const Checkpoint& ck, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

/// Continues a checkpointed run to cfg.iters; with an unchanged cfg the
/// result is bit-identical to the uninterrupted run.
TrainReport train_resume(const Matrix& data, const Checkpoint& ck,
                         const TrainConfig& cfg);

}  // namespace wrobust
