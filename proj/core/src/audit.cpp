#include "wrobust/audit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <numeric>
#include <ostream>

#include "wrobust/discriminator.hpp"
#include "wrobust/errors.hpp"
#include "wrobust/generators.hpp"
#include "wrobust/metrics.hpp"
#include "wrobust/rng.hpp"

namespace wrobust {

namespace {

constexpr double kFdStep = 1e-5;
constexpr double kGradTol = 1e-4;

double rel_err(double a, double b) {
  return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-6});
}

double weighted_sum(const DiscriminatorNet& net, const Matrix& x, const Vector& u) {
  const Vector f = forward(net, x);
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += u[i] * f[i];
  return s;
}

NetVariant variant_for(int i, int p) {
  switch (i % 4) {
    case 0: return NetVariant::dense();
    case 1: return NetVariant::sparse(std::max(1, p / 2));
    case 2: return NetVariant::banded(std::max(1, p / 2));
    default: return NetVariant::elliptical();
  }
}

DiscriminatorNet random_net(int p, double budget, int hidden, RngStream& rng,
                            NetVariant variant) {
  std::vector<int> widths;
  for (int h = 0; h < hidden; ++h)
    widths.push_back(std::max(1, p / (2 << h)));
  return build_discriminator(p, budget, widths, variant, rng);
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

// ---- gradients ----------------------------------------------------------

double net_param_grad_error(DiscriminatorNet& net, const Matrix& x, const Vector& u) {
  ForwardCache cache;
  forward(net, x, &cache);
  const BackwardResult analytic = backward(net, cache, u);
  double worst = 0.0;

  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    auto& w = net.layers[l].w.storage();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double keep = w[i];
      w[i] = keep + kFdStep;
      ++net.revision;
      const double hi = weighted_sum(net, x, u);
      w[i] = keep - kFdStep;
      ++net.revision;
      const double lo = weighted_sum(net, x, u);
      w[i] = keep;
      ++net.revision;
      const double fd = (hi - lo) / (2.0 * kFdStep);
      worst = std::max(worst, rel_err(analytic.params[l].w.storage()[i], fd));
    }
    for (std::size_t i = 0; i < net.layers[l].b.size(); ++i) {
      const double keep = net.layers[l].b[i];
      net.layers[l].b[i] = keep + kFdStep;
      ++net.revision;
      const double hi = weighted_sum(net, x, u);
      net.layers[l].b[i] = keep - kFdStep;
      ++net.revision;
      const double lo = weighted_sum(net, x, u);
      net.layers[l].b[i] = keep;
      ++net.revision;
      const double fd = (hi - lo) / (2.0 * kFdStep);
      worst = std::max(worst, rel_err(analytic.params[l].b[i], fd));
    }
  }
  return worst;
}

double net_input_grad_error(const DiscriminatorNet& net, Matrix x, const Vector& u) {
  ForwardCache cache;
  forward(net, x, &cache);
  const BackwardResult analytic = backward(net, cache, u);
  double worst = 0.0;
  for (int i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < x.cols(); ++j) {
      const double keep = x(i, j);
      x(i, j) = keep + kFdStep;
      const double hi = weighted_sum(net, x, u);
      x(i, j) = keep - kFdStep;
      const double lo = weighted_sum(net, x, u);
      x(i, j) = keep;
      const double fd = (hi - lo) / (2.0 * kFdStep);
      worst = std::max(worst, rel_err(analytic.inputs(i, j), fd));
    }
  }
  return worst;
}

double gen_objective(const DiscriminatorNet& net, const GeneratorModel& g,
                     const NoiseCache& noise, const Vector& u) {
  return weighted_sum(net, apply_generator(g, noise), u);
}

double generator_grad_error(const DiscriminatorNet& net, GeneratorModel g,
                            const NoiseCache& noise, const Vector& u) {
  ForwardCache cache;
  forward(net, apply_generator(g, noise), &cache);
  const BackwardResult back = backward(net, cache, u);
  const GenGrads analytic = pullback_grads(g, noise, back.inputs);

  double worst = 0.0;
  auto probe = [&](double* param, double analytic_g) {
    const double keep = *param;
    *param = keep + kFdStep;
    const double hi = gen_objective(net, g, noise, u);
    *param = keep - kFdStep;
    const double lo = gen_objective(net, g, noise, u);
    *param = keep;
    const double fd = (hi - lo) / (2.0 * kFdStep);
    worst = std::max(worst, rel_err(analytic_g, fd));
  };

  std::visit(
      [&](auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LocationModel>) {
          for (std::size_t j = 0; j < m.theta.size(); ++j)
            probe(&m.theta[j], analytic.theta[j]);
        } else if constexpr (std::is_same_v<T, CovarianceModel>) {
          for (std::size_t j = 0; j < m.a.storage().size(); ++j)
            probe(&m.a.storage()[j], analytic.a.storage()[j]);
        } else if constexpr (std::is_same_v<T, RegressionModel>) {
          for (std::size_t j = 0; j < m.beta.size(); ++j)
            probe(&m.beta[j], analytic.beta[j]);
        } else {
          for (std::size_t j = 0; j < m.theta.size(); ++j)
            probe(&m.theta[j], analytic.theta[j]);
          for (std::size_t j = 0; j < m.a.storage().size(); ++j)
            probe(&m.a.storage()[j], analytic.a.storage()[j]);
        }
      },
      g);
  return worst;
}

PropertyResult audit_gradients() {
  Timer timer;
  PropertyResult res{"gradients: analytic vs central differences", 0, 0.0,
                     kGradTol, false, 0.0};
  RngStream rng(0xAD17ULL, 1);

  // Discriminator parameter and input gradients across all variants.
  for (int i = 0; i < 20; ++i) {
    const int p = 3 + i % 5;
    DiscriminatorNet net = random_net(p, 0.5 + 0.25 * (i % 4), 1 + i % 2, rng,
                                      variant_for(i, p));
    const int n = 4;
    Matrix x(n, p);
    for (double& v : x.storage()) v = 1.5 * rng.gaussian();
    Vector u(n);
    for (double& v : u) v = 0.5 + rng.uniform();
    res.worst = std::max(res.worst, net_param_grad_error(net, x, u));
    res.worst = std::max(res.worst, net_input_grad_error(net, x, u));
    res.trials += 1;
  }

  // Generator pullbacks, all four variants.
  for (int i = 0; i < 10; ++i) {
    for (int variant = 0; variant < 4; ++variant) {
      GeneratorModel g;
      int out_dim = 0;
      if (variant == 0) {
        LocationModel m;
        m.theta = {0.3 * rng.gaussian(), 0.3 * rng.gaussian(), 0.3 * rng.gaussian()};
        out_dim = 3;
        g = m;
      } else if (variant == 1) {
        CovarianceModel m;
        m.a = Matrix(2, 2);
        for (double& v : m.a.storage()) v = 0.8 * rng.gaussian();
        m.a(0, 0) += 1.2;
        m.a(1, 1) += 1.2;
        out_dim = 2;
        g = m;
      } else if (variant == 2) {
        RegressionModel m;
        m.beta = Vector(4);
        for (double& v : m.beta) v = 0.4 * rng.gaussian();
        out_dim = 5;
        g = m;
      } else {
        EllipticalLocModel m;
        m.theta = Vector(3);
        for (double& v : m.theta) v = 0.3 * rng.gaussian();
        m.a = Matrix(3, 3);
        for (double& v : m.a.storage()) v = 0.5 * rng.gaussian();
        m.a(0, 0) += 1.0;
        m.a(1, 1) += 1.0;
        m.a(2, 2) += 1.0;
        m.xi = XiSpec::chi(3);
        out_dim = 3;
        g = m;
      }
      DiscriminatorNet net = random_net(out_dim, 1.0, 1, rng, NetVariant::dense());
      const int m_rows = 6;
      const NoiseCache noise = draw_noise(g, m_rows, rng);
      Vector u(m_rows);
      for (double& v : u) v = 0.5 + rng.uniform();
      res.worst = std::max(res.worst, generator_grad_error(net, g, noise, u));
      res.trials += 1;
    }
  }

  res.pass = res.worst < kGradTol;
  res.seconds = timer.seconds();
  return res;
}

// ---- lipschitz ----------------------------------------------------------

PropertyResult audit_lipschitz_suite() {
  Timer timer;
  PropertyResult res{"lipschitz: |f(x)-f(y)| <= (B/4)·dist and <= 2", 0, 0.0,
                     1e-9, false, 0.0};
  RngStream rng(0xAD17ULL, 2);
  double worst_ratio_excess = -1.0;
  double worst_bound_excess = -1.0;

  for (int i = 0; i < 100; ++i) {
    const int p = 2 + i % 19;
    const double budget = (i % 4 == 0) ? 0.5 : (i % 4 == 1) ? 1.0 : (i % 4 == 2) ? 2.0 : 4.0;
    const int hidden = i % 3;  // 0..2 hidden ReLU layers
    NetVariant variant = (i % 5 == 3) ? NetVariant::sparse(std::max(1, p / 2))
                                      : NetVariant::dense();
    DiscriminatorNet net = random_net(p, budget, hidden, rng, variant);

    const int pairs = 10000;
    Matrix xs(pairs, p), ys(pairs, p);
    for (int t = 0; t < pairs; ++t) {
      auto x = xs.row(t);
      auto y = ys.row(t);
      for (int j = 0; j < p; ++j) x[j] = 2.0 * rng.gaussian();
      if (t % 2 == 0)
        for (int j = 0; j < p; ++j) y[j] = x[j] + 0.01 * rng.gaussian();
      else
        for (int j = 0; j < p; ++j) y[j] = 3.0 * rng.gaussian();
    }
    const Vector fx = forward(net, xs);
    const Vector fy = forward(net, ys);
    for (int t = 0; t < pairs; ++t) {
      double d2 = 0.0;
      for (int j = 0; j < p; ++j) {
        const double d = xs(t, j) - ys(t, j);
        d2 += d * d;
      }
      const double dist = std::sqrt(d2);
      const double gap = std::fabs(fx[t] - fy[t]);
      if (dist > 1e-12)
        worst_ratio_excess = std::max(worst_ratio_excess, gap / dist - budget / 4.0);
      worst_bound_excess = std::max(worst_bound_excess, gap - 2.0);
    }
    res.trials += pairs;
  }

  res.worst = std::max(worst_ratio_excess, worst_bound_excess);
  res.pass = res.worst <= 1e-9;
  res.seconds = timer.seconds();
  return res;
}

// ---- projections --------------------------------------------------------

bool bit_equal(const Vector& a, const Vector& b) {
  return a.size() == b.size() &&
         (a.empty() ||
          std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

PropertyResult audit_projections() {
  Timer timer;
  PropertyResult res{"projections: bit-exact idempotence, exact feasibility", 0,
                     0.0, 0.0, true, 0.0};
  RngStream rng(0xAD17ULL, 3);

  for (int t = 0; t < 10000; ++t) {
    const int len = 1 + t % 40;
    const double scale = (t % 3 == 0) ? 0.1 : (t % 3 == 1) ? 1.0 : 10.0;
    Vector row(len);
    for (double& x : row) x = scale * rng.gaussian();
    const double bound = 0.5 + rng.uniform();

    RowConstraint constraints[4] = {
        RowL2Ball{bound},
        RowL2Sparse{bound, 1 + static_cast<int>(rng.below(len))},
        RowL2Banded{bound, 1 + static_cast<int>(rng.below(len))},
        RowL1Ball{}};
    for (const RowConstraint& c : constraints) {
      Vector once = row;
      project_row(once, c);
      Vector twice = once;
      project_row(twice, c);
      if (!bit_equal(once, twice)) res.pass = false;

      std::visit(
          [&](const auto& cc) {
            using T = std::decay_t<decltype(cc)>;
            if constexpr (std::is_same_v<T, RowL2Ball>) {
              if (l2_norm(once) > cc.bound) res.pass = false;
            } else if constexpr (std::is_same_v<T, RowL2Sparse>) {
              if (l2_norm(once) > cc.bound) res.pass = false;
              int nnz = 0;
              for (double x : once) nnz += x != 0.0;
              if (nnz > cc.k) res.pass = false;
            } else if constexpr (std::is_same_v<T, RowL2Banded>) {
              if (l2_norm(once) > cc.bound) res.pass = false;
              int first = -1, last = -1;
              for (int j = 0; j < len; ++j)
                if (once[j] != 0.0) {
                  if (first < 0) first = j;
                  last = j;
                }
              if (first >= 0 && last - first + 1 > cc.width) res.pass = false;
            } else {
              if (l1_norm(once) > 1.0) res.pass = false;
            }
          },
          c);
      res.trials += 1;
    }
  }

  // Whole-net projection idempotence, bit for bit.
  for (int i = 0; i < 20; ++i) {
    const int p = 2 + i % 12;
    DiscriminatorNet net = random_net(p, 1.0 + 0.5 * (i % 3), 1 + i % 2, rng,
                                      variant_for(i, p));
    for (DenseLayer& layer : net.layers)
      for (double& x : layer.w.storage()) x *= 1.0 + 2.0 * rng.uniform();
    DiscriminatorNet once = net;
    project(once);
    DiscriminatorNet twice = once;
    project(twice);
    for (std::size_t l = 0; l < once.layers.size(); ++l)
      if (!bit_equal(once.layers[l].w.storage(), twice.layers[l].w.storage()))
        res.pass = false;
    res.trials += 1;
  }

  res.seconds = timer.seconds();
  return res;
}

// ---- transport ----------------------------------------------------------

double w1_bruteforce(const Matrix& s1, const Matrix& s2) {
  const int n = s1.rows();
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double d2 = 0.0;
      for (int k = 0; k < s1.cols(); ++k) {
        const double d = s1(i, k) - s2(perm[i], k);
        d2 += d * d;
      }
      total += std::sqrt(d2);
    }
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(n);
}

PropertyResult audit_transport() {
  Timer timer;
  PropertyResult res{"transport: brute-force match, metric axioms, translation",
                     0, 0.0, 1e-9, false, 0.0};
  RngStream rng(0xAD17ULL, 4);
  double worst = 0.0;
  bool ok = true;

  // Exhaustive-permutation agreement for n <= 6 (tighter 1e-12 budget).
  for (int n = 2; n <= 6; ++n) {
    for (int rep = 0; rep < 20; ++rep) {
      const int p = 1 + rep % 3;
      Matrix s1(n, p), s2(n, p);
      for (double& x : s1.storage()) x = 2.0 * rng.gaussian();
      for (double& x : s2.storage()) x = 2.0 * rng.gaussian();
      const double err = std::fabs(w1_exact(s1, s2) - w1_bruteforce(s1, s2));
      worst = std::max(worst, err);
      ok = ok && err <= 1e-12;
      res.trials += 1;
    }
  }

  // Metric axioms on random triples.
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 16;
    const int p = 1 + rep % 4;
    Matrix a(n, p), b(n, p), c(n, p);
    for (double& x : a.storage()) x = rng.gaussian();
    for (double& x : b.storage()) x = rng.gaussian() + 0.5;
    for (double& x : c.storage()) x = 1.5 * rng.gaussian() - 0.25;
    const double ab = w1_exact(a, b);
    const double ba = w1_exact(b, a);
    const double ac = w1_exact(a, c);
    const double bc = w1_exact(b, c);
    const double err = std::max({std::fabs(ab - ba), ac - (ab + bc),
                                 std::fabs(w1_exact(a, a))});
    worst = std::max(worst, err);
    ok = ok && err <= 1e-9;
    res.trials += 1;
  }

  // Translation identity: w1(S, S + delta) = ‖delta‖.
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 32;
    const int p = 2 + rep % 3;
    Matrix s(n, p);
    for (double& x : s.storage()) x = rng.gaussian();
    Vector delta(p);
    for (double& x : delta) x = 0.3 * rng.gaussian();
    Matrix shifted = s;
    for (int i = 0; i < n; ++i) {
      auto r = shifted.row(i);
      for (int j = 0; j < p; ++j) r[j] += delta[j];
    }
    const double err = std::fabs(w1_exact(s, shifted) - l2_norm(delta));
    worst = std::max(worst, err);
    ok = ok && err <= 1e-9;
    res.trials += 1;
  }

  res.worst = worst;
  res.pass = ok;
  res.seconds = timer.seconds();
  return res;
}

// ---- duality -------------------------------------------------------------

PropertyResult audit_duality() {
  Timer timer;
  PropertyResult res{"duality: |Êf(S1)-Êf(S2)| <= (B/4)·w1_exact + 1e-9", 0,
                     0.0, 1e-9, false, 0.0};
  RngStream rng(0xAD17ULL, 5);
  double worst = -1.0;

  for (int i = 0; i < 50; ++i) {
    const int p = 2 + i % 9;
    const double budget = (i % 3 == 0) ? 0.5 : (i % 3 == 1) ? 1.0 : 3.0;
    DiscriminatorNet net = random_net(p, budget, 1 + i % 2, rng,
                                      (i % 4 == 3) ? NetVariant::sparse(std::max(1, p / 2))
                                                   : NetVariant::dense());
    const int n = 64;
    Matrix s1(n, p), s2(n, p);
    for (double& x : s1.storage()) x = rng.gaussian();
    const double shift = 0.5 * rng.gaussian();
    for (double& x : s2.storage()) x = rng.gaussian() + shift;

    const Vector f1 = forward(net, s1);
    const Vector f2 = forward(net, s2);
    const double m1 = std::accumulate(f1.begin(), f1.end(), 0.0) / n;
    const double m2 = std::accumulate(f2.begin(), f2.end(), 0.0) / n;
    const double gap = std::fabs(m1 - m2);
    const double bound = budget / 4.0 * w1_exact(s1, s2);
    worst = std::max(worst, gap - bound);
    res.trials += 1;
  }

  res.worst = worst;
  res.pass = worst <= 1e-9;
  res.seconds = timer.seconds();
  return res;
}

}  // namespace

bool AuditReport::all_pass() const {
  return std::all_of(results.begin(), results.end(),
                     [](const PropertyResult& r) { return r.pass; });
}

AuditReport run_audit_suite(const std::string& suite) {
  AuditReport report;
  const bool all = suite == "all";
  if (all || suite == "gradients") report.results.push_back(audit_gradients());
  if (all || suite == "lipschitz") report.results.push_back(audit_lipschitz_suite());
  if (all || suite == "projections") report.results.push_back(audit_projections());
  if (all || suite == "transport") report.results.push_back(audit_transport());
  if (all || suite == "duality") report.results.push_back(audit_duality());
  if (report.results.empty())
    throw InvalidInputError("run_audit_suite: unknown suite '" + suite + "'");
  return report;
}

void print_report(const AuditReport& report, std::ostream& out) {
  for (const PropertyResult& r : report.results) {
    char line[256];
    std::snprintf(line, sizeof line,
                  "%-4s %-58s trials=%-8ld worst=%-12.3g tol=%-8.1g (%.2fs)",
                  r.pass ? "PASS" : "FAIL", r.name.c_str(), r.trials, r.worst,
                  r.tolerance, r.seconds);
    out << line << '\n';
  }
}

}  // namespace wrobust
