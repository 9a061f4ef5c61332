#pragma once

#include <string>
#include <variant>

#include "wrobust/matrix.hpp"
#include "wrobust/rng.hpp"

namespace wrobust {

/// Radial law: scale · ‖N(0, I_p)‖₂ (the chi law matching a p-dimensional
/// Gaussian). Rescalings compose, so scaled variants stay in this form.
struct XiSpec {
  int p = 1;
  double scale = 1.0;

  static XiSpec chi(int p) { return XiSpec{p, 1.0}; }
  XiSpec scaled(double c) const { return XiSpec{p, scale * c}; }
};

double xi_draw(const XiSpec& xi, RngStream& rng);

struct StdGaussian {
  int p = 1;
};

/// mean + cov_factor · z with z ~ N(0, I).
struct GaussianSpec {
  Vector mean;
  Matrix cov_factor;
};

/// i.i.d. standard Cauchy per coordinate.
struct IsoCauchy {
  int p = 1;
};

/// i.i.d. |standard Cauchy| per coordinate (half-Cauchy).
struct IsoHalfCauchy {
  int p = 1;
};

/// i.i.d. standard Gumbel (location 0, scale 1) per coordinate.
struct IsoGumbel {
  int p = 1;
};

struct SphereUniform {
  int p = 1;
};

/// theta + ξ·A·U with U uniform on the unit sphere.
struct EllipticalSpec {
  Vector theta;
  XiSpec xi;
  Matrix a;
};

using DistributionSpec =
    std::variant<StdGaussian, GaussianSpec, IsoCauchy, IsoHalfCauchy, IsoGumbel,
                 SphereUniform, EllipticalSpec>;

int dim(const DistributionSpec& spec);

/// (1-alpha)·base + alpha·outlier mixture; rows drawn independently.
struct MixtureContamination {
  DistributionSpec base;
  DistributionSpec outlier;
  double alpha = 0.0;
};

/// Adds a fixed offset to every base draw, realizing W₁ ≤ ‖delta‖₂ exactly.
struct DeterministicShift {
  DistributionSpec base;
  Vector delta;
};

using ContaminationSpec = std::variant<MixtureContamination, DeterministicShift>;

struct RegressionSpec {
  Vector beta;
  DistributionSpec x_dist;
  DistributionSpec noise_outlier;  // one-dimensional
  double alpha = 0.0;
  bool zero_clean_noise = false;  // test hook: clean noise forced to 0
};

Matrix sample(const DistributionSpec& spec, int n, RngStream& rng);
Matrix sample_contaminated(const ContaminationSpec& spec, int n, RngStream& rng);
/// Rows are (x, y) with y in the last column.
Matrix sample_regression(const RegressionSpec& spec, int n, RngStream& rng);

/// The perturbation presets used throughout the experiments:
///   M1 = 0.9·N(theta, I) + 0.1·IsoCauchy
///   M2 = 0.9·N(theta, I) + 0.1·N(2·𝟙, I)
///   M3 = 0.9·N(theta, I) + 0.1·IsoGumbel
ContaminationSpec preset_model(const std::string& name, int p, const Vector& theta);

/// E[sigmoid'(S)] for S = v·(ξU), estimated once by Monte Carlo and cached
/// per (p, scale). Linear in nothing but handy for calibration below.
double radial_sigmoid_mass(const XiSpec& xi);

/// Scale factor c such that the rescaled radial law c·ξ has the same
/// E[sigmoid'(S)] as the Gaussian-equivalent radial law. chi(p) maps to
/// c = 1 up to Monte Carlo error.
double radial_scale_calibration(const XiSpec& xi);

/// Canonical representative of the (ξ, A) equivalence class: ξ scaled by the
/// calibration factor, A divided by it. The sampled distribution is unchanged.
EllipticalSpec normalize_radial(const EllipticalSpec& spec);

}  // namespace wrobust
