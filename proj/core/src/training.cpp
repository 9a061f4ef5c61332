#include "wrobust/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>

#include "wrobust/errors.hpp"

namespace wrobust {

namespace {

// Stream-id registry for one training run; all randomness derives from
// cfg.seed through these.
constexpr std::uint64_t kBatchStream = 0xB17C401ULL;
constexpr std::uint64_t kNoiseStream = 0xB17C402ULL;
constexpr std::uint64_t kEvalStream = 0xB17C403ULL;
constexpr std::uint64_t kIpmStream = 0xB17C404ULL;

double mean(const Vector& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void add_into(std::vector<double>& acc, const std::vector<double>& other) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += other[i];
}

void step_net(DiscriminatorNet& net, const BackwardResult& g1,
              const BackwardResult& g2, std::vector<RmsPropState>& opt,
              const RmsPropConfig& rms) {
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    std::vector<double> gw = g1.params[l].w.storage();
    add_into(gw, g2.params[l].w.storage());
    rmsprop_step(opt[2 * l], net.layers[l].w.storage(), gw, rms,
                 StepDirection::Ascent);
    if (!net.layers[l].b.empty()) {
      std::vector<double> gb = g1.params[l].b;
      add_into(gb, g2.params[l].b);
      rmsprop_step(opt[2 * l + 1], net.layers[l].b, gb, rms,
                   StepDirection::Ascent);
    }
  }
  ++net.revision;
}

void step_generator(GeneratorModel& gen, const GenGrads& grads,
                    std::vector<RmsPropState>& opt, const RmsPropConfig& rms) {
  std::visit(
      [&](auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LocationModel>) {
          rmsprop_step(opt[0], m.theta, grads.theta, rms, StepDirection::Ascent);
        } else if constexpr (std::is_same_v<T, CovarianceModel>) {
          rmsprop_step(opt[0], m.a.storage(), grads.a.storage(), rms,
                       StepDirection::Ascent);
        } else if constexpr (std::is_same_v<T, RegressionModel>) {
          rmsprop_step(opt[0], m.beta, grads.beta, rms, StepDirection::Ascent);
        } else {
          if (m.learn_theta)
            rmsprop_step(opt[0], m.theta, grads.theta, rms, StepDirection::Ascent);
          if (m.learn_a)
            rmsprop_step(opt[1], m.a.storage(), grads.a.storage(), rms,
                         StepDirection::Ascent);
        }
      },
      gen);
}

Matrix gather_rows(const Matrix& data, const std::vector<int>& idx) {
  Matrix out(static_cast<int>(idx.size()), data.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    auto src = data.row(idx[i]);
    auto dst = out.row(static_cast<int>(i));
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return out;
}

std::vector<int> choose_without_replacement(int n, int k, RngStream& rng) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

TrainReport train_impl(const Matrix& data, DiscriminatorNet net,
                       GeneratorModel gen, const TrainConfig& cfg,
                       int start_iter, std::vector<RmsPropState> net_opt,
                       std::vector<RmsPropState> gen_opt, RngStream batch_rng,
                       RngStream noise_rng) {
  const auto t0 = std::chrono::steady_clock::now();
  if (data.rows() < 1) throw InvalidInputError("train: empty data");
  if (data.cols() != net.input_dim())
    throw InvalidInputError("train: data/net dimension mismatch");
  if (data.cols() != output_dim(gen))
    throw InvalidInputError("train: data/generator dimension mismatch");
  if (cfg.iters < 1 || cfg.critic_steps_per_iter < 1 ||
      cfg.gen_steps_per_iter < 1 || cfg.eval_every < 1 || cfg.lr <= 0.0)
    throw InvalidInputError("train: config values must be positive");

  const int n = data.rows();
  const int b = cfg.batch > 0 ? cfg.batch : batch_size_for(n);
  const RmsPropConfig rms{cfg.lr, cfg.rms_decay, cfg.rms_eps};

  // Fixed evaluation fixtures, rebuilt identically from the seed on resume.
  RngStream eval_rng(cfg.seed, kEvalStream);
  const int eval_n = std::min(n, 512);
  const Matrix eval_x = gather_rows(data, choose_without_replacement(n, eval_n, eval_rng));
  const NoiseCache eval_noise = draw_noise(gen, eval_n, eval_rng);

  TrainReport report;
  report.seed = cfg.seed;
  report.iters = cfg.iters;

  double best_val = std::numeric_limits<double>::infinity();
  GeneratorModel best_gen = gen;

  const Vector up_pos(b, 1.0 / b);
  const Vector up_neg(b, -1.0 / b);

  for (int it = start_iter; it < cfg.iters; ++it) {
    for (int s = 0; s < cfg.critic_steps_per_iter; ++s) {
      std::vector<int> idx(b);
      for (int i = 0; i < b; ++i)
        idx[i] = static_cast<int>(batch_rng.below(static_cast<std::uint64_t>(n)));
      const Matrix xd = gather_rows(data, idx);
      const Matrix xg = gen_sample(gen, b, noise_rng);
      ForwardCache cd, cg;
      const Vector fd = forward(net, xd, &cd);
      const Vector fg = forward(net, xg, &cg);
      const double obj = mean(fd) - mean(fg);
      if (!std::isfinite(obj))
        throw TrainingDivergedError(
            "train: critic objective non-finite at iteration " + std::to_string(it), it);
      const BackwardResult gd = backward(net, cd, up_pos);
      const BackwardResult gg = backward(net, cg, up_neg);
      step_net(net, gd, gg, net_opt, rms);
      project(net);
    }

    for (int s = 0; s < cfg.gen_steps_per_iter; ++s) {
      const NoiseCache nc = draw_noise(gen, b, noise_rng);
      const Matrix xg = apply_generator(gen, nc);
      ForwardCache cg;
      const Vector fg = forward(net, xg, &cg);
      if (!std::isfinite(mean(fg)))
        throw TrainingDivergedError(
            "train: generator objective non-finite at iteration " + std::to_string(it), it);
      const BackwardResult bg = backward(net, cg, up_pos);
      const GenGrads ggr = pullback_grads(gen, nc, bg.inputs);
      step_generator(gen, ggr, gen_opt, rms);
      project_params(gen, cfg.param_space);
    }

    const int done = it + 1;
    if (done % cfg.eval_every == 0 || done == cfg.iters || it == start_iter) {
      const Vector fd = forward(net, eval_x);
      const Vector fg = forward(net, apply_generator(gen, eval_noise));
      const double val = mean(fd) - mean(fg);
      if (!std::isfinite(val))
        throw TrainingDivergedError(
            "train: evaluation objective non-finite at iteration " + std::to_string(it), it);
      if (report.objective_trace.empty() ||
          report.objective_trace.back().first != done)
        report.objective_trace.emplace_back(done, val);
      if (val < best_val) {
        best_val = val;
        if (cfg.best_trace) best_gen = gen;
      }
    }

    if (cfg.checkpoint_every > 0 && done % cfg.checkpoint_every == 0) {
      Checkpoint ck{done, net, gen, net_opt, gen_opt, batch_rng.state(),
                    noise_rng.state()};
      char name[32];
      std::snprintf(name, sizeof name, "ckpt_%06d.txt", done);
      std::filesystem::create_directories(cfg.checkpoint_dir);
      save_checkpoint(ck, (std::filesystem::path(cfg.checkpoint_dir) / name).string());
    }
  }

  const GeneratorModel& final_gen = cfg.best_trace ? best_gen : gen;
  report.estimate = extract_estimate(final_gen);
  RngStream ipm_rng(cfg.seed, kIpmStream);
  report.final_ipm = evaluate_ipm(net, data, final_gen, 4096, ipm_rng);
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace

TrainReport train(const Matrix& data, const DiscriminatorNet& net0,
                  const GeneratorModel& gen0, const TrainConfig& cfg) {
  DiscriminatorNet net = net0;
  project(net);
  std::vector<RmsPropState> net_opt(2 * net.layers.size());
  std::vector<RmsPropState> gen_opt(2);
  return train_impl(data, std::move(net), gen0, cfg, 0, std::move(net_opt),
                    std::move(gen_opt), RngStream(cfg.seed, kBatchStream),
                    RngStream(cfg.seed, kNoiseStream));
}

TrainReport train_resume(const Matrix& data, const Checkpoint& ck,
                         const TrainConfig& cfg) {
  if (ck.iteration >= cfg.iters)
    throw InvalidInputError("train_resume: checkpoint is at or past cfg.iters");
  RngStream batch_rng(0, 0), noise_rng(0, 0);
  batch_rng.restore(ck.batch_rng);
  noise_rng.restore(ck.noise_rng);
  return train_impl(data, ck.net, ck.gen, cfg, ck.iteration, ck.net_opt,
                    ck.gen_opt, std::move(batch_rng), std::move(noise_rng));
}

double evaluate_ipm(const DiscriminatorNet& net, const Matrix& data,
                    const GeneratorModel& g, int m_gen, RngStream& rng) {
  if (m_gen < 1) throw InvalidInputError("evaluate_ipm: m_gen must be positive");
  if (data.cols() != net.input_dim() || data.cols() != output_dim(g))
    throw InvalidInputError("evaluate_ipm: dimension mismatch");
  const Vector fd = forward(net, data);
  const Vector fg = forward(net, gen_sample(g, m_gen, rng));
  return mean(fd) - mean(fg);
}

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void save_generator(const GeneratorModel& g, std::ostream& out) {
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LocationModel>) {
          out << "generator location " << m.theta.size() << '\n';
          for (std::size_t j = 0; j < m.theta.size(); ++j)
            out << (j ? " " : "") << fmt17(m.theta[j]);
          out << '\n';
        } else if constexpr (std::is_same_v<T, CovarianceModel>) {
          out << "generator covariance " << m.a.rows() << '\n';
          for (int i = 0; i < m.a.rows(); ++i) {
            for (int j = 0; j < m.a.cols(); ++j)
              out << (j ? " " : "") << fmt17(m.a(i, j));
            out << '\n';
          }
        } else if constexpr (std::is_same_v<T, RegressionModel>) {
          out << "generator regression " << m.beta.size() << '\n';
          for (std::size_t j = 0; j < m.beta.size(); ++j)
            out << (j ? " " : "") << fmt17(m.beta[j]);
          out << '\n';
        } else {
          out << "generator elliptical " << m.theta.size() << ' '
              << (m.learn_theta ? 1 : 0) << ' ' << (m.learn_a ? 1 : 0) << ' '
              << m.xi.p << ' ' << fmt17(m.xi.scale) << '\n';
          for (std::size_t j = 0; j < m.theta.size(); ++j)
            out << (j ? " " : "") << fmt17(m.theta[j]);
          out << '\n';
          for (int i = 0; i < m.a.rows(); ++i) {
            for (int j = 0; j < m.a.cols(); ++j)
              out << (j ? " " : "") << fmt17(m.a(i, j));
            out << '\n';
          }
        }
      },
      g);
}

GeneratorModel load_generator(std::istream& in) {
  std::string key, kind;
  in >> key >> kind;
  if (key != "generator") throw IoError("load_checkpoint: expected generator");
  if (kind == "location") {
    std::size_t p = 0;
    in >> p;
    LocationModel m;
    m.theta.resize(p);
    for (double& x : m.theta) in >> x;
    return m;
  }
  if (kind == "covariance") {
    int p = 0;
    in >> p;
    CovarianceModel m;
    m.a = Matrix(p, p);
    for (double& x : m.a.storage()) in >> x;
    return m;
  }
  if (kind == "regression") {
    std::size_t p = 0;
    in >> p;
    RegressionModel m;
    m.beta.resize(p);
    for (double& x : m.beta) in >> x;
    return m;
  }
  if (kind == "elliptical") {
    std::size_t p = 0;
    int lt = 1, la = 1;
    EllipticalLocModel m;
    in >> p >> lt >> la >> m.xi.p >> m.xi.scale;
    m.learn_theta = lt != 0;
    m.learn_a = la != 0;
    m.theta.resize(p);
    for (double& x : m.theta) in >> x;
    m.a = Matrix(static_cast<int>(p), static_cast<int>(p));
    for (double& x : m.a.storage()) in >> x;
    return m;
  }
  throw IoError("load_checkpoint: unknown generator kind '" + kind + "'");
}

void save_opt(const std::vector<RmsPropState>& opt, const char* tag,
              std::ostream& out) {
  out << "opt " << tag << ' ' << opt.size() << '\n';
  for (const RmsPropState& s : opt) {
    out << s.v.size();
    for (double x : s.v) out << ' ' << fmt17(x);
    out << '\n';
  }
}

std::vector<RmsPropState> load_opt(const char* tag, std::istream& in) {
  std::string key, got;
  std::size_t count = 0;
  in >> key >> got >> count;
  if (key != "opt" || got != tag) throw IoError("load_checkpoint: expected opt block");
  std::vector<RmsPropState> opt(count);
  for (RmsPropState& s : opt) {
    std::size_t len = 0;
    in >> len;
    s.v.resize(len);
    for (double& x : s.v) in >> x;
  }
  return opt;
}

void save_rng(const RngStream::State& s, const char* tag, std::ostream& out) {
  out << "rng " << tag << ' ' << s.seed << ' ' << s.stream << ' ' << s.block
      << ' ' << s.buf_pos << ' ' << (s.has_spare ? 1 : 0) << ' '
      << fmt17(s.spare) << '\n';
}

RngStream::State load_rng(const char* tag, std::istream& in) {
  std::string key, got;
  RngStream::State s;
  int has_spare = 0;
  in >> key >> got >> s.seed >> s.stream >> s.block >> s.buf_pos >> has_spare >>
      s.spare;
  if (key != "rng" || got != tag) throw IoError("load_checkpoint: expected rng block");
  s.has_spare = has_spare != 0;
  return s;
}

}  // namespace

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_checkpoint: cannot open '" + path + "'");
  out << "wrobustckpt 1\n";
  out << "iteration " << ck.iteration << '\n';
  save_net(ck.net, out);
  save_generator(ck.gen, out);
  save_opt(ck.net_opt, "net", out);
  save_opt(ck.gen_opt, "gen", out);
  save_rng(ck.batch_rng, "batch", out);
  save_rng(ck.noise_rng, "noise", out);
  if (!out) throw IoError("save_checkpoint: write failed for '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_checkpoint: cannot open '" + path + "'");
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "wrobustckpt" || version != 1)
    throw IoError("load_checkpoint: unrecognized header");
  Checkpoint ck;
  std::string key;
  in >> key >> ck.iteration;
  if (key != "iteration") throw IoError("load_checkpoint: expected iteration");
  ck.net = load_net(in);
  ck.gen = load_generator(in);
  ck.net_opt = load_opt("net", in);
  ck.gen_opt = load_opt("gen", in);
  ck.batch_rng = load_rng("batch", in);
  ck.noise_rng = load_rng("noise", in);
  if (!in) throw IoError("load_checkpoint: truncated file");
  return ck;
}

}  // namespace wrobust
