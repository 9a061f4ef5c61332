#include "wrobust/generators.hpp"

#include <cmath>

#include "wrobust/errors.hpp"
#include "wrobust/kernels.hpp"

namespace wrobust {

int output_dim(const GeneratorModel& g) {
  return std::visit(
      [](const auto& m) -> int {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LocationModel>)
          return static_cast<int>(m.theta.size());
        else if constexpr (std::is_same_v<T, CovarianceModel>)
          return m.a.rows();
        else if constexpr (std::is_same_v<T, RegressionModel>)
          return static_cast<int>(m.beta.size()) + 1;
        else
          return static_cast<int>(m.theta.size());
      },
      g);
}

namespace {

void sphere_row(std::span<double> out, RngStream& rng) {
  for (;;) {
    for (double& x : out) x = rng.gaussian();
    const double n = l2_norm(out);
    if (n > 1e-300) {
      for (double& x : out) x /= n;
      return;
    }
  }
}

void check_noise(const GeneratorModel& g, const NoiseCache& noise) {
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LocationModel>) {
          if (noise.z.cols() != static_cast<int>(m.theta.size()) || noise.z.rows() < 1)
            throw InvalidStateError("generator: noise cache does not match model");
        } else if constexpr (std::is_same_v<T, CovarianceModel>) {
          if (noise.z.cols() != m.a.cols() || noise.z.rows() < 1)
            throw InvalidStateError("generator: noise cache does not match model");
        } else if constexpr (std::is_same_v<T, RegressionModel>) {
          if (noise.z.cols() != static_cast<int>(m.beta.size()) + 1 || noise.z.rows() < 1)
            throw InvalidStateError("generator: noise cache does not match model");
        } else {
          if (noise.u.cols() != m.a.cols() || noise.u.rows() < 1 ||
              noise.xi.size() != static_cast<std::size_t>(noise.u.rows()))
            throw InvalidStateError("generator: noise cache does not match model");
        }
      },
      g);
}

}  // namespace

NoiseCache draw_noise(const GeneratorModel& g, int m, RngStream& rng) {
  if (m < 1) throw InvalidInputError("draw_noise: m must be positive");
  NoiseCache noise;
  std::visit(
      [&](const auto& model) {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, LocationModel>) {
          noise.z = Matrix(m, static_cast<int>(model.theta.size()));
          for (double& x : noise.z.storage()) x = rng.gaussian();
        } else if constexpr (std::is_same_v<T, CovarianceModel>) {
          noise.z = Matrix(m, model.a.cols());
          for (double& x : noise.z.storage()) x = rng.gaussian();
        } else if constexpr (std::is_same_v<T, RegressionModel>) {
          noise.z = Matrix(m, static_cast<int>(model.beta.size()) + 1);
          for (double& x : noise.z.storage()) x = rng.gaussian();
        } else {
          const int p = model.a.cols();
          noise.u = Matrix(m, p);
          noise.xi = Vector(m);
          for (int i = 0; i < m; ++i) {
            sphere_row(noise.u.row(i), rng);
            noise.xi[i] = xi_draw(model.xi, rng);
          }
        }
      },
      g);
  return noise;
}

Matrix apply_generator(const GeneratorModel& g, const NoiseCache& noise) {
  check_noise(g, noise);
  return std::visit(
      [&](const auto& model) -> Matrix {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, LocationModel>) {
          Matrix out = noise.z;
          for (int i = 0; i < out.rows(); ++i) {
            auto r = out.row(i);
            for (int j = 0; j < out.cols(); ++j) r[j] += model.theta[j];
          }
          return out;
        } else if constexpr (std::is_same_v<T, CovarianceModel>) {
          return matmul_nt(noise.z, model.a);  // rows are A·z_i
        } else if constexpr (std::is_same_v<T, RegressionModel>) {
          const int p = static_cast<int>(model.beta.size());
          Matrix out = noise.z;
          for (int i = 0; i < out.rows(); ++i) {
            auto r = out.row(i);
            r[p] = dot(std::span<const double>(r.data(), p), model.beta) + noise.z(i, p);
          }
          return out;
        } else {
          const int p = model.a.rows();
          Matrix out(noise.u.rows(), p);
          for (int i = 0; i < out.rows(); ++i) {
            auto r = out.row(i);
            auto u = noise.u.row(i);
            for (int j = 0; j < p; ++j)
              r[j] = model.theta[j] + noise.xi[i] * dot(model.a.row(j), u);
          }
          return out;
        }
      },
      g);
}

Matrix gen_sample(const GeneratorModel& g, int m, RngStream& rng,
                  NoiseCache* noise_out) {
  NoiseCache noise = draw_noise(g, m, rng);
  Matrix out = apply_generator(g, noise);
  if (noise_out) *noise_out = std::move(noise);
  return out;
}

GenGrads pullback_grads(const GeneratorModel& g, const NoiseCache& noise,
                        const Matrix& input_grads) {
  check_noise(g, noise);
  if (input_grads.rows() != noise.rows() || input_grads.cols() != output_dim(g))
    throw InvalidStateError("pullback_grads: input gradient shape mismatch");

  GenGrads grads;
  std::visit(
      [&](const auto& model) {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, LocationModel>) {
          grads.theta = Vector(model.theta.size(), 0.0);
          for (int i = 0; i < input_grads.rows(); ++i) {
            auto r = input_grads.row(i);
            for (std::size_t j = 0; j < grads.theta.size(); ++j) grads.theta[j] += r[j];
          }
        } else if constexpr (std::is_same_v<T, CovarianceModel>) {
          // dS/dA = Σ_i g_i z_iᵀ
          grads.a = matmul_tn(input_grads, noise.z);
        } else if constexpr (std::is_same_v<T, RegressionModel>) {
          const int p = static_cast<int>(model.beta.size());
          grads.beta = Vector(p, 0.0);
          for (int i = 0; i < input_grads.rows(); ++i) {
            const double gy = input_grads(i, p);
            auto x = noise.z.row(i);
            for (int j = 0; j < p; ++j) grads.beta[j] += gy * x[j];
          }
        } else {
          const int p = model.a.rows();
          grads.theta = Vector(p, 0.0);
          grads.a = Matrix(p, p, 0.0);
          for (int i = 0; i < input_grads.rows(); ++i) {
            auto gi = input_grads.row(i);
            auto ui = noise.u.row(i);
            const double xi = noise.xi[i];
            for (int j = 0; j < p; ++j) {
              grads.theta[j] += gi[j];
              const double gx = xi * gi[j];
              auto arow = grads.a.row(j);
              for (int l = 0; l < p; ++l) arow[l] += gx * ui[l];
            }
          }
        }
      },
      g);
  return grads;
}

void project_params(GeneratorModel& g, const ParamSpace& space) {
  std::visit(
      [&](const auto& sp) {
        using S = std::decay_t<decltype(sp)>;
        if constexpr (std::is_same_v<S, Unbounded>) {
          return;
        } else if constexpr (std::is_same_v<S, CovBand>) {
          if (sp.m1 <= 0.0 || sp.m1 > sp.m2)
            throw InvalidInputError("project_params: need 0 < m1 <= m2");
          Matrix* a = nullptr;
          if (auto* cov = std::get_if<CovarianceModel>(&g)) a = &cov->a;
          else if (auto* ell = std::get_if<EllipticalLocModel>(&g)) a = &ell->a;
          else
            throw InvalidInputError("project_params: CovBand needs a scatter factor");
          const Matrix sigma = matmul_nt(*a, *a);
          *a = symmetric_sqrt(eigen_clamp(sigma, sp.m1, sp.m2));
        } else {
          auto* reg = std::get_if<RegressionModel>(&g);
          if (!reg) throw InvalidInputError("project_params: BetaBall needs a regression model");
          if (sp.b1 <= 0.0) throw InvalidInputError("project_params: b1 must be positive");
          double n = l2_norm(reg->beta);
          if (n > sp.b1) {
            const double s = sp.b1 / n;
            for (double& x : reg->beta) x *= s;
            for (int guard = 0; guard < 8 && l2_norm(reg->beta) > sp.b1; ++guard)
              for (double& x : reg->beta) x *= 1.0 - 0x1.0p-48;
          }
        }
      },
      space);
}

Estimate extract_estimate(const GeneratorModel& g) {
  Estimate est;
  std::visit(
      [&](const auto& model) {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, LocationModel>) {
          est.kind = Estimate::Kind::Location;
          est.vec = model.theta;
        } else if constexpr (std::is_same_v<T, CovarianceModel>) {
          est.kind = Estimate::Kind::Covariance;
          est.mat = matmul_nt(model.a, model.a);
        } else if constexpr (std::is_same_v<T, RegressionModel>) {
          est.kind = Estimate::Kind::Regression;
          est.vec = model.beta;
        } else {
          // theta is the estimand; the scatter rides along for covariance use.
          est.kind = Estimate::Kind::Location;
          est.vec = model.theta;
          est.mat = matmul_nt(model.a, model.a);
        }
      },
      g);
  return est;
}

Matrix scatter_estimate(const GeneratorModel& g) {
  if (const auto* cov = std::get_if<CovarianceModel>(&g))
    return matmul_nt(cov->a, cov->a);
  if (const auto* ell = std::get_if<EllipticalLocModel>(&g))
    return matmul_nt(ell->a, ell->a);
  throw InvalidInputError("scatter_estimate: model has no scatter factor");
}

}  // namespace wrobust
