#include "wrobust/distributions.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <span>

#include "wrobust/errors.hpp"

namespace wrobust {

namespace {

constexpr double kPi = 3.14159265358979323846;

double cauchy_draw(RngStream& rng) { return std::tan(kPi * (rng.uniform_open() - 0.5)); }

double gumbel_draw(RngStream& rng) { return -std::log(-std::log(rng.uniform_open())); }

void sphere_draw(std::span<double> out, RngStream& rng) {
  for (;;) {
    for (double& x : out) x = rng.gaussian();
    const double n = l2_norm(out);
    if (n > 1e-300) {
      for (double& x : out) x /= n;
      return;
    }
  }
}

void draw_row(const DistributionSpec& spec, std::span<double> out, RngStream& rng) {
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, StdGaussian>) {
          for (double& x : out) x = rng.gaussian();
        } else if constexpr (std::is_same_v<T, GaussianSpec>) {
          Vector z(d.cov_factor.cols());
          for (double& x : z) x = rng.gaussian();
          for (int j = 0; j < static_cast<int>(out.size()); ++j) {
            out[j] = d.mean[j] + dot(d.cov_factor.row(j), z);
          }
        } else if constexpr (std::is_same_v<T, IsoCauchy>) {
          for (double& x : out) x = cauchy_draw(rng);
        } else if constexpr (std::is_same_v<T, IsoHalfCauchy>) {
          for (double& x : out) x = std::fabs(cauchy_draw(rng));
        } else if constexpr (std::is_same_v<T, IsoGumbel>) {
          for (double& x : out) x = gumbel_draw(rng);
        } else if constexpr (std::is_same_v<T, SphereUniform>) {
          sphere_draw(out, rng);
        } else if constexpr (std::is_same_v<T, EllipticalSpec>) {
          Vector u(d.a.cols());
          sphere_draw(u, rng);
          const double xi = xi_draw(d.xi, rng);
          for (int j = 0; j < static_cast<int>(out.size()); ++j) {
            out[j] = d.theta[j] + xi * dot(d.a.row(j), u);
          }
        }
      },
      spec);
}

void validate(const DistributionSpec& spec) {
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, GaussianSpec>) {
          if (d.cov_factor.rows() != static_cast<int>(d.mean.size()))
            throw InvalidInputError("sample: cov_factor rows must match mean dim");
          if (!all_finite(d.mean) || !d.cov_factor.all_finite())
            throw InvalidInputError("sample: non-finite Gaussian parameters");
        } else if constexpr (std::is_same_v<T, EllipticalSpec>) {
          if (d.a.rows() != d.a.cols() ||
              d.a.rows() != static_cast<int>(d.theta.size()))
            throw InvalidInputError("sample: elliptical A must be square and match theta");
          if (d.xi.p < 1 || d.xi.scale <= 0.0)
            throw InvalidInputError("sample: invalid radial law");
        } else {
          if (d.p < 1) throw InvalidInputError("sample: dimension must be positive");
        }
      },
      spec);
}

}  // namespace

double xi_draw(const XiSpec& xi, RngStream& rng) {
  double s = 0.0;
  for (int i = 0; i < xi.p; ++i) {
    const double z = rng.gaussian();
    s += z * z;
  }
  return xi.scale * std::sqrt(s);
}

int dim(const DistributionSpec& spec) {
  return std::visit(
      [](const auto& d) -> int {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, GaussianSpec>) {
          return static_cast<int>(d.mean.size());
        } else if constexpr (std::is_same_v<T, EllipticalSpec>) {
          return static_cast<int>(d.theta.size());
        } else {
          return d.p;
        }
      },
      spec);
}

Matrix sample(const DistributionSpec& spec, int n, RngStream& rng) {
  if (n < 1) throw InvalidInputError("sample: n must be positive");
  validate(spec);
  const int p = dim(spec);
  Matrix out(n, p);
  for (int i = 0; i < n; ++i) draw_row(spec, out.row(i), rng);
  return out;
}

Matrix sample_contaminated(const ContaminationSpec& spec, int n, RngStream& rng) {
  if (n < 1) throw InvalidInputError("sample_contaminated: n must be positive");
  return std::visit(
      [&](const auto& c) -> Matrix {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, MixtureContamination>) {
          validate(c.base);
          validate(c.outlier);
          if (dim(c.base) != dim(c.outlier))
            throw InvalidInputError("sample_contaminated: component dims differ");
          if (c.alpha < 0.0 || c.alpha > 1.0)
            throw InvalidInputError("sample_contaminated: alpha must lie in [0, 1]");
          // alpha 0 and 1 reduce to the pure component streams.
          if (c.alpha == 0.0) return sample(c.base, n, rng);
          if (c.alpha == 1.0) return sample(c.outlier, n, rng);
          const int p = dim(c.base);
          Matrix out(n, p);
          for (int i = 0; i < n; ++i) {
            const bool outlier = rng.uniform() < c.alpha;
            draw_row(outlier ? c.outlier : c.base, out.row(i), rng);
          }
          return out;
        } else {
          validate(c.base);
          if (static_cast<int>(c.delta.size()) != dim(c.base))
            throw InvalidInputError("sample_contaminated: delta dim mismatch");
          if (!all_finite(c.delta))
            throw InvalidInputError("sample_contaminated: delta must be finite");
          Matrix out = sample(c.base, n, rng);
          for (int i = 0; i < n; ++i) {
            auto r = out.row(i);
            for (int j = 0; j < out.cols(); ++j) r[j] += c.delta[j];
          }
          return out;
        }
      },
      spec);
}

Matrix sample_regression(const RegressionSpec& spec, int n, RngStream& rng) {
  if (n < 1) throw InvalidInputError("sample_regression: n must be positive");
  validate(spec.x_dist);
  validate(spec.noise_outlier);
  const int p = dim(spec.x_dist);
  if (static_cast<int>(spec.beta.size()) != p)
    throw InvalidInputError("sample_regression: beta dim must match x dim");
  if (dim(spec.noise_outlier) != 1)
    throw InvalidInputError("sample_regression: noise_outlier must be one-dimensional");
  if (spec.alpha < 0.0 || spec.alpha > 1.0)
    throw InvalidInputError("sample_regression: alpha must lie in [0, 1]");

  Matrix out(n, p + 1);
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    auto r = out.row(i);
    draw_row(spec.x_dist, r.subspan(0, p), rng);
    bool outlier = false;
    if (spec.alpha == 1.0) outlier = true;
    else if (spec.alpha > 0.0) outlier = rng.uniform() < spec.alpha;
    if (outlier) {
      draw_row(spec.noise_outlier, std::span<double>(&z, 1), rng);
    } else {
      z = spec.zero_clean_noise ? 0.0 : rng.gaussian();
    }
    r[p] = dot(std::span<const double>(r.data(), p), spec.beta) + z;
  }
  return out;
}

ContaminationSpec preset_model(const std::string& name, int p, const Vector& theta) {
  if (p < 1) throw InvalidInputError("preset_model: p must be positive");
  if (static_cast<int>(theta.size()) != p)
    throw InvalidInputError("preset_model: theta dim must equal p");
  GaussianSpec base{theta, Matrix::identity(p)};
  if (name == "M1")
    return MixtureContamination{base, IsoCauchy{p}, 0.1};
  if (name == "M2")
    return MixtureContamination{base, GaussianSpec{Vector(p, 2.0), Matrix::identity(p)}, 0.1};
  if (name == "M3")
    return MixtureContamination{base, IsoGumbel{p}, 0.1};
  throw InvalidInputError("preset_model: unknown model name '" + name + "'");
}

namespace {

double sigmoid_prime(double u) {
  const double s = 1.0 / (1.0 + std::exp(-u));
  return s * (1.0 - s);
}

// E[sigmoid'(Z)] for Z ~ N(0,1), by trapezoid rule.
double gaussian_sigmoid_mass() {
  static const double value = [] {
    const double h = 1.0 / 1024.0;
    double acc = 0.0;
    for (double z = -12.0; z <= 12.0; z += h) {
      const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi);
      acc += sigmoid_prime(z) * phi * h;
    }
    return acc;
  }();
  return value;
}

// Cached unit-scale draws of S = v·(ξU) for a given p, shared across calls.
const std::vector<double>& unit_radial_draws(int p) {
  static std::mutex mu;
  static std::map<int, std::vector<double>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(p);
  if (it != cache.end()) return it->second;

  RngStream rng(0xca11b8a7e5ULL, static_cast<std::uint64_t>(p));
  std::vector<double> draws(1000000);
  Vector u(p);
  const XiSpec unit = XiSpec::chi(p);
  for (double& s : draws) {
    sphere_draw(u, rng);
    s = xi_draw(unit, rng) * u[0];
  }
  return cache.emplace(p, std::move(draws)).first->second;
}

}  // namespace

double radial_sigmoid_mass(const XiSpec& xi) {
  const auto& draws = unit_radial_draws(xi.p);
  double acc = 0.0;
  for (double s : draws) acc += sigmoid_prime(xi.scale * s);
  return acc / static_cast<double>(draws.size());
}

double radial_scale_calibration(const XiSpec& xi) {
  static std::mutex mu;
  static std::map<int, double> unit_cache;  // calibration of chi(p) at scale 1

  double unit_c;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = unit_cache.find(xi.p);
    if (it != unit_cache.end()) {
      unit_c = it->second;
    } else {
      const auto& draws = unit_radial_draws(xi.p);
      const double target = gaussian_sigmoid_mass();
      // E[sigmoid'(c·S)] is decreasing in c; bisect on the cached draws.
      double lo = 1e-6, hi = 1e6;
      for (int iter = 0; iter < 200; ++iter) {
        const double mid = std::sqrt(lo * hi);
        double acc = 0.0;
        for (double s : draws) acc += sigmoid_prime(mid * s);
        acc /= static_cast<double>(draws.size());
        (acc > target ? lo : hi) = mid;
        if (hi / lo < 1.0 + 1e-12) break;
      }
      unit_c = std::sqrt(lo * hi);
      unit_cache.emplace(xi.p, unit_c);
    }
  }
  // Calibration scales inversely with the law's own scale.
  return unit_c / xi.scale;
}

EllipticalSpec normalize_radial(const EllipticalSpec& spec) {
  const double c = radial_scale_calibration(spec.xi);
  EllipticalSpec out = spec;
  out.xi = spec.xi.scaled(c);
  out.a = (1.0 / c) * spec.a;
  return out;
}

}  // namespace wrobust
