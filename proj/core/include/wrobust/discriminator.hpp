#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "wrobust/matrix.hpp"
#include "wrobust/rng.hpp"

namespace wrobust {

enum class Activation { Sigmoid, ReLU, Ramp, Identity };

double apply_activation(Activation a, double u);
/// Derivative with respect to the pre-activation. The ReLU subgradient at 0
/// is 0; the ramp kinks at ±1/2 likewise take 0.
double activation_grad(Activation a, double u);

struct RowL2Ball {
  double bound = 1.0;
};
struct RowL2Sparse {
  double bound = 1.0;
  int k = 1;
};
struct RowL2Banded {
  double bound = 1.0;
  int width = 1;
};
struct RowL1Ball {};  // unit budget

using RowConstraint = std::variant<RowL2Ball, RowL2Sparse, RowL2Banded, RowL1Ball>;

struct DenseLayer {
  Matrix w;  // d_out × d_in
  Vector b;  // empty when the layer carries no bias
  Activation activation = Activation::ReLU;
  RowConstraint constraint = RowL1Ball{};
};

struct NetVariant {
  enum class Kind { Dense, Sparse, Banded, Elliptical };
  Kind kind = Kind::Dense;
  int param = 0;  // k for Sparse, window width for Banded

  static NetVariant dense() { return {Kind::Dense, 0}; }
  static NetVariant sparse(int k) { return {Kind::Sparse, k}; }
  static NetVariant banded(int width) { return {Kind::Banded, width}; }
  static NetVariant elliptical() { return {Kind::Elliptical, 0}; }
};

/// Layered critic. First layer is sigmoid (ramp for the elliptical variant)
/// with row-norm budget B; hidden layers are ReLU and the single-output last
/// layer is linear, both with unit L1 row budgets. After project(), a
/// sigmoid-first net is (B/4)-Lipschitz and |f(x) - f(y)| <= 2 everywhere.
struct DiscriminatorNet {
  std::vector<DenseLayer> layers;
  double budget = 1.0;  // B
  NetVariant variant;
  std::uint64_t revision = 0;  // bumped whenever parameters change

  int input_dim() const { return layers.empty() ? 0 : layers.front().w.cols(); }
  int depth() const { return static_cast<int>(layers.size()); }
};

/// Builds a projected-feasible net. Empty `hidden_widths` selects the default
/// architecture p -> ceil(p/2) -> ceil(p/4) -> 1. Weights are Gaussian with
/// std 1/sqrt(d_in), biases zero, then projected.
DiscriminatorNet build_discriminator(int p, double budget,
                                     std::vector<int> hidden_widths,
                                     NetVariant variant, RngStream& rng);

struct ForwardCache {
  std::uint64_t net_revision = 0;
  Matrix input;
  std::vector<Matrix> pre;   // z_l per layer
  std::vector<Matrix> post;  // activation(z_l) per layer
};

/// Evaluates f on each row of x. Pass a cache to enable backward().
Vector forward(const DiscriminatorNet& net, const Matrix& x,
               ForwardCache* cache = nullptr);

struct LayerGrads {
  Matrix w;
  Vector b;
};

struct BackwardResult {
  std::vector<LayerGrads> params;
  Matrix inputs;  // n × p, gradient of Σ_j upstream_j·f(x_j) per input row
};

BackwardResult backward(const DiscriminatorNet& net, const ForwardCache& cache,
                        const Vector& upstream);

/// Truncation projection applied row by row; see project_row(). Idempotent
/// bit-for-bit. Biases are untouched.
void project(DiscriminatorNet& net);
DiscriminatorNet projected(DiscriminatorNet net);

void project_row(std::span<double> row, const RowConstraint& c);

/// Max |f(x)-f(y)| / ‖x-y‖₂ over `trials` sampled pairs, alternating near
/// and far pairs.
double audit_lipschitz(const DiscriminatorNet& net, int trials, RngStream& rng);

void save_net(const DiscriminatorNet& net, std::ostream& out);
DiscriminatorNet load_net(std::istream& in);
void save_net(const DiscriminatorNet& net, const std::string& path);
DiscriminatorNet load_net(const std::string& path);

}  // namespace wrobust
