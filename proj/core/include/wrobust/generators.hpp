#pragma once

#include <variant>

#include "wrobust/distributions.hpp"
#include "wrobust/matrix.hpp"
#include "wrobust/rng.hpp"

namespace wrobust {

/// g(Z) = theta + Z, Z ~ N(0, I_p).
struct LocationModel {
  Vector theta;
};

/// g(Z) = A·Z; AAᵀ is the covariance estimate.
struct CovarianceModel {
  Matrix a;
};

/// g(X, Z) = (X, Xᵀβ + Z), (X, Z) ~ N(0, I_{p+1}).
struct RegressionModel {
  Vector beta;
};

/// g(ξ, U) = theta + ξ·A·U with ξ from a fixed radial law.
struct EllipticalLocModel {
  Vector theta;
  Matrix a;
  XiSpec xi;
  bool learn_theta = true;
  bool learn_a = true;
};

using GeneratorModel =
    std::variant<LocationModel, CovarianceModel, RegressionModel, EllipticalLocModel>;

int output_dim(const GeneratorModel& g);

/// Reference noise for one batch. With the noise frozen, apply_generator is a
/// deterministic differentiable map of the parameters.
struct NoiseCache {
  Matrix z;   // gaussian block (location/covariance: m×p; regression: m×(p+1))
  Matrix u;   // sphere rows for the elliptical model
  Vector xi;  // radial draws for the elliptical model
  int rows() const { return z.rows() > 0 ? z.rows() : u.rows(); }
};

NoiseCache draw_noise(const GeneratorModel& g, int m, RngStream& rng);
Matrix apply_generator(const GeneratorModel& g, const NoiseCache& noise);
Matrix gen_sample(const GeneratorModel& g, int m, RngStream& rng,
                  NoiseCache* noise_out = nullptr);

/// Parameter gradients of Σ_i upstream-weighted f over a generated batch,
/// given the critic's input gradients for that batch.
struct GenGrads {
  Vector theta;
  Matrix a;
  Vector beta;
};

GenGrads pullback_grads(const GeneratorModel& g, const NoiseCache& noise,
                        const Matrix& input_grads);

struct Unbounded {};
/// Eigenvalues of AAᵀ clamped into [m1, m2]; A becomes the symmetric root.
struct CovBand {
  double m1 = 0.0;
  double m2 = 1.0;
};
/// β rescaled onto the ball of radius b1.
struct BetaBall {
  double b1 = 1.0;
};

using ParamSpace = std::variant<Unbounded, CovBand, BetaBall>;

void project_params(GeneratorModel& g, const ParamSpace& space);

struct Estimate {
  enum class Kind { Location, Covariance, Regression };
  Kind kind = Kind::Location;
  Vector vec;  // theta or beta
  Matrix mat;  // AAᵀ for covariance estimates
};

/// theta for location models, AAᵀ for the covariance model, beta for
/// regression.
Estimate extract_estimate(const GeneratorModel& g);

/// AAᵀ for any model carrying a scatter factor.
Matrix scatter_estimate(const GeneratorModel& g);

}  // namespace wrobust
