#include "wrobust/discriminator.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wrobust/errors.hpp"
#include "wrobust/kernels.hpp"

namespace wrobust {

double apply_activation(Activation a, double u) {
  switch (a) {
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-u));
    case Activation::ReLU: return u > 0.0 ? u : 0.0;
    case Activation::Ramp: return 2.0 * std::max(std::min(u + 0.5, 1.0), 0.0);
    case Activation::Identity: return u;
  }
  return u;
}

double activation_grad(Activation a, double u) {
  switch (a) {
    case Activation::Sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-u));
      return s * (1.0 - s);
    }
    case Activation::ReLU: return u > 0.0 ? 1.0 : 0.0;
    case Activation::Ramp: return (u > -0.5 && u < 0.5) ? 2.0 : 0.0;
    case Activation::Identity: return 1.0;
  }
  return 0.0;
}

DiscriminatorNet build_discriminator(int p, double budget,
                                     std::vector<int> hidden_widths,
                                     NetVariant variant, RngStream& rng) {
  if (p < 1) throw InvalidInputError("build_discriminator: p must be positive");
  if (budget <= 0.0) throw InvalidInputError("build_discriminator: budget must be positive");
  if (hidden_widths.empty()) {
    hidden_widths = {(p + 1) / 2, (p + 3) / 4};
  }
  for (int w : hidden_widths)
    if (w < 1) throw InvalidInputError("build_discriminator: widths must be positive");
  if (variant.kind == NetVariant::Kind::Sparse &&
      (variant.param < 1 || variant.param > p))
    throw InvalidInputError("build_discriminator: sparse k out of range");
  if (variant.kind == NetVariant::Kind::Banded &&
      (variant.param < 1 || variant.param > p))
    throw InvalidInputError("build_discriminator: banded width out of range");

  RowConstraint first;
  Activation first_act = Activation::Sigmoid;
  switch (variant.kind) {
    case NetVariant::Kind::Dense: first = RowL2Ball{budget}; break;
    case NetVariant::Kind::Sparse: first = RowL2Sparse{budget, variant.param}; break;
    case NetVariant::Kind::Banded: first = RowL2Banded{budget, variant.param}; break;
    case NetVariant::Kind::Elliptical:
      first = RowL2Ball{budget};
      first_act = Activation::Ramp;
      break;
  }

  DiscriminatorNet net;
  net.budget = budget;
  net.variant = variant;

  std::vector<int> dims;
  dims.push_back(p);
  for (int w : hidden_widths) dims.push_back(w);
  dims.push_back(1);

  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    DenseLayer layer;
    const int d_in = dims[l];
    const int d_out = dims[l + 1];
    layer.w = Matrix(d_out, d_in);
    const double std_in = 1.0 / std::sqrt(static_cast<double>(d_in));
    for (double& x : layer.w.storage()) x = std_in * rng.gaussian();
    if (l == 0) {
      layer.b = Vector(d_out, 0.0);
      layer.activation = first_act;
      layer.constraint = first;
    } else if (l + 2 < dims.size()) {
      layer.activation = Activation::ReLU;
      layer.constraint = RowL1Ball{};
    } else {
      layer.activation = Activation::Identity;
      layer.constraint = RowL1Ball{};
    }
    net.layers.push_back(std::move(layer));
  }
  project(net);
  return net;
}

Vector forward(const DiscriminatorNet& net, const Matrix& x, ForwardCache* cache) {
  if (net.layers.empty()) throw InvalidInputError("forward: empty net");
  if (x.cols() != net.input_dim())
    throw InvalidInputError("forward: input dim mismatch");

  if (cache) {
    cache->net_revision = net.revision;
    cache->input = x;
    cache->pre.clear();
    cache->post.clear();
  }

  const int n = x.rows();
  Matrix a = x;
  for (const DenseLayer& layer : net.layers) {
    const int d_out = layer.w.rows();
    Matrix z(n, d_out);
    for (int i = 0; i < n; ++i) {
      auto zi = z.row(i);
      auto ai = a.row(i);
      for (int j = 0; j < d_out; ++j) {
        double u = dot(layer.w.row(j), ai);
        if (!layer.b.empty()) u += layer.b[j];
        zi[j] = u;
      }
    }
    Matrix act(n, d_out);
    for (std::size_t i = 0; i < z.storage().size(); ++i)
      act.storage()[i] = apply_activation(layer.activation, z.storage()[i]);
    if (cache) {
      cache->pre.push_back(z);
      cache->post.push_back(act);
    }
    a = std::move(act);
  }

  Vector out(n);
  for (int i = 0; i < n; ++i) out[i] = a(i, 0);
  return out;
}

BackwardResult backward(const DiscriminatorNet& net, const ForwardCache& cache,
                        const Vector& upstream) {
  if (cache.net_revision != net.revision)
    throw InvalidStateError("backward: cache is stale for this net");
  const int n = cache.input.rows();
  if (static_cast<int>(upstream.size()) != n)
    throw InvalidInputError("backward: upstream size mismatch");
  const int depth = net.depth();
  if (static_cast<int>(cache.pre.size()) != depth)
    throw InvalidStateError("backward: cache layer count mismatch");

  BackwardResult res;
  res.params.resize(depth);

  // delta = dS/dz_l for the current layer, starting from the output.
  Matrix delta(n, 1);
  for (int i = 0; i < n; ++i)
    delta(i, 0) = upstream[i] * activation_grad(net.layers[depth - 1].activation,
                                                cache.pre[depth - 1](i, 0));

  for (int l = depth - 1; l >= 0; --l) {
    const DenseLayer& layer = net.layers[l];
    const Matrix& a_prev = (l == 0) ? cache.input : cache.post[l - 1];
    res.params[l].w = matmul_tn(delta, a_prev);
    if (!layer.b.empty()) {
      res.params[l].b = Vector(layer.w.rows(), 0.0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < layer.w.rows(); ++j) res.params[l].b[j] += delta(i, j);
    }
    // dS/da_{l-1} = delta · W_l, then chain through the previous activation.
    Matrix da = matmul(delta, layer.w);
    if (l == 0) {
      res.inputs = std::move(da);
    } else {
      const Matrix& z_prev = cache.pre[l - 1];
      for (std::size_t i = 0; i < da.storage().size(); ++i)
        da.storage()[i] *= activation_grad(net.layers[l - 1].activation,
                                           z_prev.storage()[i]);
      delta = std::move(da);
    }
  }
  return res;
}

namespace {

// Scales `row` so its norm (given by `norm_fn`) is at most `bound`, exactly.
// The shrink loop guards against the rescaled norm rounding above the bound;
// one extra pass makes the row strictly feasible and further applications
// no-ops, which is what gives bit-exact idempotence.
template <typename NormFn>
void clamp_norm(std::span<double> row, double bound, NormFn norm_fn) {
  double n = norm_fn(row);
  if (n <= bound) return;
  const double s = bound / n;
  for (double& x : row) x *= s;
  for (int guard = 0; guard < 8 && norm_fn(row) > bound; ++guard) {
    constexpr double shrink = 1.0 - 0x1.0p-48;
    for (double& x : row) x *= shrink;
  }
}

double span_l2(std::span<double> r) { return l2_norm(r); }
double span_l1(std::span<double> r) { return l1_norm(r); }

}  // namespace

void project_row(std::span<double> row, const RowConstraint& c) {
  std::visit(
      [&](const auto& cc) {
        using T = std::decay_t<decltype(cc)>;
        if constexpr (std::is_same_v<T, RowL2Ball>) {
          clamp_norm(row, cc.bound, span_l2);
        } else if constexpr (std::is_same_v<T, RowL2Sparse>) {
          const int len = static_cast<int>(row.size());
          if (cc.k < len) {
            Vector v(row.begin(), row.end());
            const std::vector<int> keep = top_k_indices(v, cc.k);
            std::size_t ki = 0;
            for (int j = 0; j < len; ++j) {
              if (ki < keep.size() && keep[ki] == j) ++ki;
              else row[j] = 0.0;
            }
          }
          clamp_norm(row, cc.bound, span_l2);
        } else if constexpr (std::is_same_v<T, RowL2Banded>) {
          const int len = static_cast<int>(row.size());
          if (cc.width < len) {
            // Window of `width` contiguous entries with the largest retained
            // L2 mass; ties resolve to the lowest start index.
            int best_start = 0;
            double best_mass = -1.0;
            for (int s = 0; s + cc.width <= len; ++s) {
              double mass = 0.0;
              for (int j = s; j < s + cc.width; ++j) mass += row[j] * row[j];
              if (mass > best_mass) {
                best_mass = mass;
                best_start = s;
              }
            }
            for (int j = 0; j < len; ++j)
              if (j < best_start || j >= best_start + cc.width) row[j] = 0.0;
          }
          clamp_norm(row, cc.bound, span_l2);
        } else {
          clamp_norm(row, 1.0, span_l1);
        }
      },
      c);
}

void project(DiscriminatorNet& net) {
  for (DenseLayer& layer : net.layers)
    for (int i = 0; i < layer.w.rows(); ++i)
      project_row(layer.w.row(i), layer.constraint);
  ++net.revision;
}

DiscriminatorNet projected(DiscriminatorNet net) {
  project(net);
  return net;
}

double audit_lipschitz(const DiscriminatorNet& net, int trials, RngStream& rng) {
  if (trials < 1) throw InvalidInputError("audit_lipschitz: trials must be positive");
  const int p = net.input_dim();
  Matrix xs(trials, p);
  Matrix ys(trials, p);
  for (int t = 0; t < trials; ++t) {
    auto x = xs.row(t);
    auto y = ys.row(t);
    for (int j = 0; j < p; ++j) x[j] = 2.0 * rng.gaussian();
    if (t % 2 == 0) {
      for (int j = 0; j < p; ++j) y[j] = x[j] + 0.01 * rng.gaussian();
    } else {
      for (int j = 0; j < p; ++j) y[j] = 3.0 * rng.gaussian();
    }
  }
  const Vector fx = forward(net, xs);
  const Vector fy = forward(net, ys);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    double d2 = 0.0;
    for (int j = 0; j < p; ++j) {
      const double d = xs(t, j) - ys(t, j);
      d2 += d * d;
    }
    const double dist = std::sqrt(d2);
    if (dist < 1e-12) continue;
    worst = std::max(worst, std::fabs(fx[t] - fy[t]) / dist);
  }
  return worst;
}

namespace {

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::Sigmoid: return "sigmoid";
    case Activation::ReLU: return "relu";
    case Activation::Ramp: return "ramp";
    case Activation::Identity: return "identity";
  }
  return "?";
}

Activation activation_from(const std::string& s) {
  if (s == "sigmoid") return Activation::Sigmoid;
  if (s == "relu") return Activation::ReLU;
  if (s == "ramp") return Activation::Ramp;
  if (s == "identity") return Activation::Identity;
  throw IoError("load_net: unknown activation '" + s + "'");
}

const char* variant_name(NetVariant::Kind k) {
  switch (k) {
    case NetVariant::Kind::Dense: return "dense";
    case NetVariant::Kind::Sparse: return "sparse";
    case NetVariant::Kind::Banded: return "banded";
    case NetVariant::Kind::Elliptical: return "elliptical";
  }
  return "?";
}

NetVariant::Kind variant_from(const std::string& s) {
  if (s == "dense") return NetVariant::Kind::Dense;
  if (s == "sparse") return NetVariant::Kind::Sparse;
  if (s == "banded") return NetVariant::Kind::Banded;
  if (s == "elliptical") return NetVariant::Kind::Elliptical;
  throw IoError("load_net: unknown variant '" + s + "'");
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_constraint(std::ostream& out, const RowConstraint& c) {
  std::visit(
      [&](const auto& cc) {
        using T = std::decay_t<decltype(cc)>;
        if constexpr (std::is_same_v<T, RowL2Ball>)
          out << "l2ball " << fmt17(cc.bound);
        else if constexpr (std::is_same_v<T, RowL2Sparse>)
          out << "l2sparse " << fmt17(cc.bound) << ' ' << cc.k;
        else if constexpr (std::is_same_v<T, RowL2Banded>)
          out << "l2banded " << fmt17(cc.bound) << ' ' << cc.width;
        else
          out << "l1ball";
      },
      c);
}

RowConstraint read_constraint(std::istream& in) {
  std::string tag;
  in >> tag;
  if (tag == "l2ball") {
    RowL2Ball c;
    in >> c.bound;
    return c;
  }
  if (tag == "l2sparse") {
    RowL2Sparse c;
    in >> c.bound >> c.k;
    return c;
  }
  if (tag == "l2banded") {
    RowL2Banded c;
    in >> c.bound >> c.width;
    return c;
  }
  if (tag == "l1ball") return RowL1Ball{};
  throw IoError("load_net: unknown constraint '" + tag + "'");
}

}  // namespace

void save_net(const DiscriminatorNet& net, std::ostream& out) {
  out << "wrobustnet 1\n";
  out << "variant " << variant_name(net.variant.kind) << ' ' << net.variant.param
      << '\n';
  out << "budget " << fmt17(net.budget) << '\n';
  out << "layers " << net.depth() << '\n';
  for (const DenseLayer& layer : net.layers) {
    out << "layer " << layer.w.rows() << ' ' << layer.w.cols() << ' '
        << activation_name(layer.activation) << ' ';
    write_constraint(out, layer.constraint);
    out << " bias " << (layer.b.empty() ? 0 : 1) << '\n';
    for (int i = 0; i < layer.w.rows(); ++i) {
      auto r = layer.w.row(i);
      for (int j = 0; j < layer.w.cols(); ++j)
        out << (j ? " " : "") << fmt17(r[j]);
      out << '\n';
    }
    if (!layer.b.empty()) {
      for (std::size_t j = 0; j < layer.b.size(); ++j)
        out << (j ? " " : "") << fmt17(layer.b[j]);
      out << '\n';
    }
  }
  if (!out) throw IoError("save_net: write failed");
}

DiscriminatorNet load_net(std::istream& in) {
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "wrobustnet" || version != 1)
    throw IoError("load_net: unrecognized net file header");
  DiscriminatorNet net;
  std::string key, vname;
  in >> key >> vname >> net.variant.param;
  if (key != "variant") throw IoError("load_net: expected variant");
  net.variant.kind = variant_from(vname);
  in >> key >> net.budget;
  if (key != "budget") throw IoError("load_net: expected budget");
  int depth = 0;
  in >> key >> depth;
  if (key != "layers" || depth < 1) throw IoError("load_net: expected layers");
  for (int l = 0; l < depth; ++l) {
    std::string act;
    int d_out = 0, d_in = 0, has_bias = 0;
    in >> key >> d_out >> d_in >> act;
    if (key != "layer" || d_out < 1 || d_in < 1)
      throw IoError("load_net: malformed layer header");
    DenseLayer layer;
    layer.activation = activation_from(act);
    layer.constraint = read_constraint(in);
    in >> key >> has_bias;
    if (key != "bias") throw IoError("load_net: expected bias flag");
    layer.w = Matrix(d_out, d_in);
    for (double& x : layer.w.storage()) in >> x;
    if (has_bias) {
      layer.b = Vector(d_out);
      for (double& x : layer.b) in >> x;
    }
    net.layers.push_back(std::move(layer));
  }
  if (!in) throw IoError("load_net: truncated net file");
  return net;
}

void save_net(const DiscriminatorNet& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_net: cannot open '" + path + "'");
  save_net(net, out);
}

DiscriminatorNet load_net(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_net: cannot open '" + path + "'");
  return load_net(in);
}

}  // namespace wrobust
