#include "wrobust/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wrobust/errors.hpp"
#include "wrobust/rng.hpp"

namespace wrobust {

namespace {

void require_square(const Matrix& s, const char* op) {
  if (s.empty() || s.rows() != s.cols())
    throw InvalidInputError(std::string(op) + ": square matrix required");
}

double max_asymmetry(const Matrix& s) {
  double m = 0.0;
  for (int i = 0; i < s.rows(); ++i)
    for (int j = i + 1; j < s.cols(); ++j)
      m = std::max(m, std::fabs(s(i, j) - s(j, i)));
  return m;
}

}  // namespace

SpectralNormResult spectral_norm(const Matrix& m, double tol, int max_iter) {
  if (m.empty()) throw InvalidInputError("spectral_norm: empty matrix");
  if (tol <= 0.0) throw InvalidInputError("spectral_norm: tol must be positive");
  if (max_iter < 1) throw InvalidInputError("spectral_norm: max_iter must be positive");
  if (!m.all_finite()) throw InvalidInputError("spectral_norm: non-finite entries");

  // Fixed stream keeps the start vector (and hence the result) deterministic.
  RngStream rng(0x5eed5eed5eed5eedULL, 0x707e12ULL);
  Vector v(m.cols());
  for (double& x : v) x = rng.gaussian();
  double nv = l2_norm(v);
  if (nv == 0.0) v[0] = 1.0;
  else
    for (double& x : v) x /= nv;

  SpectralNormResult res;
  double prev = std::numeric_limits<double>::infinity();
  // Rayleigh estimates are nondecreasing, so a few confirmation iterations
  // after the tolerance first triggers only tighten the result.
  int confirm = -1;
  for (int it = 0; it < max_iter; ++it) {
    res.iterations = it + 1;
    const Vector mv = matvec(m, v);
    const double est = l2_norm(mv);
    res.value = est;
    if (est == 0.0) return res;
    if (confirm < 0 && std::fabs(est - prev) < tol) confirm = 20;
    prev = est;
    if (confirm >= 0 && confirm-- == 0) return res;

    Vector w = matvec_t(m, mv);
    const double nw = l2_norm(w);
    if (nw == 0.0) return res;
    for (std::size_t j = 0; j < w.size(); ++j) v[j] = w[j] / nw;
  }
  res.converged = (confirm >= 0);
  return res;
}

SymmetricEigen symmetric_eigen(const Matrix& s) {
  require_square(s, "symmetric_eigen");
  if (!s.all_finite()) throw InvalidInputError("symmetric_eigen: non-finite entries");
  const int n = s.rows();
  Matrix a = s;
  Matrix v = Matrix::identity(n);

  const double scale = std::max(1.0, max_abs(a));
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= 1e-14 * scale * n) break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;

        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  SymmetricEigen out;
  out.values.resize(n);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Vector diag(n);
  for (int i = 0; i < n; ++i) diag[i] = a(i, i);
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return diag[x] < diag[y]; });
  out.vectors = Matrix(n, n);
  for (int j = 0; j < n; ++j) {
    out.values[j] = diag[order[j]];
    for (int i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

Matrix cholesky(const Matrix& s) {
  require_square(s, "cholesky");
  if (!s.all_finite()) throw InvalidInputError("cholesky: non-finite entries");
  const int n = s.rows();
  Matrix l(n, n, 0.0);
  for (int j = 0; j < n; ++j) {
    double d = s(j, j);
    for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (d <= 0.0)
      throw NotPositiveDefiniteError(
          "cholesky: non-positive pivot at index " + std::to_string(j), j);
    l(j, j) = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      double x = s(i, j);
      for (int k = 0; k < j; ++k) x -= l(i, k) * l(j, k);
      l(i, j) = x / l(j, j);
    }
  }
  return l;
}

Matrix eigen_clamp(const Matrix& s, double lo, double hi) {
  require_square(s, "eigen_clamp");
  if (lo > hi) throw InvalidInputError("eigen_clamp: lo must not exceed hi");
  if (!s.all_finite()) throw InvalidInputError("eigen_clamp: non-finite entries");
  if (max_asymmetry(s) > 1e-9 * std::max(1.0, max_abs(s)))
    throw InvalidInputError("eigen_clamp: matrix is not symmetric");

  SymmetricEigen eig = symmetric_eigen(s);
  const int n = s.rows();
  Vector lam(n);
  for (int i = 0; i < n; ++i) lam[i] = std::clamp(eig.values[i], lo, hi);

  Matrix out(n, n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double x = 0.0;
      for (int k = 0; k < n; ++k) x += eig.vectors(i, k) * lam[k] * eig.vectors(j, k);
      out(i, j) = x;
      out(j, i) = x;
    }
  return out;
}

Matrix symmetric_sqrt(const Matrix& s) {
  require_square(s, "symmetric_sqrt");
  SymmetricEigen eig = symmetric_eigen(s);
  const int n = s.rows();
  Vector lam(n);
  for (int i = 0; i < n; ++i) lam[i] = std::sqrt(std::max(0.0, eig.values[i]));
  Matrix out(n, n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double x = 0.0;
      for (int k = 0; k < n; ++k) x += eig.vectors(i, k) * lam[k] * eig.vectors(j, k);
      out(i, j) = x;
      out(j, i) = x;
    }
  return out;
}

std::vector<int> top_k_indices(const Vector& v, int k) {
  const int n = static_cast<int>(v.size());
  if (k < 1 || k > n) throw InvalidInputError("top_k_indices: k out of range");
  if (!all_finite(v)) throw InvalidInputError("top_k_indices: non-finite entries");
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    const double fa = std::fabs(v[a]);
    const double fb = std::fabs(v[b]);
    if (fa != fb) return fa > fb;
    return a < b;
  });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace wrobust
