#include "wrobust/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wrobust/errors.hpp"
#include "wrobust/kernels.hpp"

namespace wrobust {

double loc_squared_error(const Vector& estimate, const Vector& truth) {
  if (estimate.size() != truth.size())
    throw InvalidInputError("loc_squared_error: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    const double d = estimate[i] - truth[i];
    s += d * d;
  }
  return s;
}

double cov_spectral_error(const Matrix& estimate, const Matrix& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
    throw InvalidInputError("cov_spectral_error: shape mismatch");
  return spectral_norm(estimate - truth).value;
}

double reg_l2_error(const Vector& estimate, const Vector& truth) {
  return std::sqrt(loc_squared_error(estimate, truth));
}

double reg_prediction_error(const Vector& estimate, const Vector& truth,
                            const Matrix& sigma) {
  if (estimate.size() != truth.size())
    throw InvalidInputError("reg_prediction_error: shape mismatch");
  if (sigma.rows() != static_cast<int>(estimate.size()) || sigma.rows() != sigma.cols())
    throw InvalidInputError("reg_prediction_error: sigma shape mismatch");
  Vector d(estimate.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = estimate[i] - truth[i];
  return dot(d, matvec(sigma, d));
}

double loss(LossKind kind, const Estimate& estimate, const Estimate& truth,
            const Matrix* sigma) {
  switch (kind) {
    case LossKind::LocSquaredL2:
      return loc_squared_error(estimate.vec, truth.vec);
    case LossKind::CovSpectral:
      return cov_spectral_error(estimate.mat, truth.mat);
    case LossKind::RegL2:
      return reg_l2_error(estimate.vec, truth.vec);
    case LossKind::RegPrediction:
      if (!sigma) throw InvalidInputError("loss: RegPrediction needs sigma");
      return reg_prediction_error(estimate.vec, truth.vec, *sigma);
  }
  throw InvalidInputError("loss: unknown kind");
}

std::vector<int> min_cost_assignment(const Matrix& cost) {
  if (cost.rows() != cost.cols() || cost.empty())
    throw InvalidInputError("min_cost_assignment: square nonempty cost required");
  const int n = cost.rows();
  const double inf = std::numeric_limits<double>::infinity();

  // Shortest augmenting path with potentials (1-based sentinels).
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0);
  }

  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (match[j] > 0) row_to_col[match[j] - 1] = j - 1;
  return row_to_col;
}

double w1_exact(const Matrix& s1, const Matrix& s2) {
  if (s1.rows() != s2.rows())
    throw InvalidInputError("w1_exact: sample counts must be equal");
  if (s1.cols() != s2.cols())
    throw InvalidInputError("w1_exact: dimensions must be equal");
  if (s1.rows() < 1) throw InvalidInputError("w1_exact: empty samples");
  if (s1.rows() > 1024)
    throw InvalidInputError("w1_exact: n capped at 1024 (O(n^3) matching)");

  const int n = s1.rows();
  const int p = s1.cols();
  Matrix cost(n, n);
  for (int i = 0; i < n; ++i) {
    auto xi = s1.row(i);
    for (int j = 0; j < n; ++j) {
      auto yj = s2.row(j);
      double d2 = 0.0;
      for (int k = 0; k < p; ++k) {
        const double d = xi[k] - yj[k];
        d2 += d * d;
      }
      cost(i, j) = std::sqrt(d2);
    }
  }
  const std::vector<int> matching = min_cost_assignment(cost);

  // Summing the matched costs in sorted order makes the value exactly
  // symmetric in (s1, s2): the multiset of matched distances is the same.
  Vector matched(n);
  for (int i = 0; i < n; ++i) matched[i] = cost(i, matching[i]);
  std::sort(matched.begin(), matched.end());
  double total = 0.0;
  for (double c : matched) total += c;
  return total / static_cast<double>(n);
}

namespace {

double rate(double complexity, long n, int L, double eps, double C) {
  const double stat = std::ldexp(1.0, L) * std::sqrt(complexity / static_cast<double>(n));
  return C * std::max(stat, eps);
}

}  // namespace

double theory_bound(int p, long n, int L, double eps, double C) {
  if (p < 1 || n < 1 || L < 0 || eps < 0.0 || C <= 0.0)
    throw InvalidInputError("theory_bound: invalid arguments");
  return rate(static_cast<double>(p), n, L, eps, C);
}

double theory_bound_sparse(int p, int k, long n, int L, double eps, double C) {
  if (p < 2 || k < 1 || k >= p || n < 1 || L < 0 || eps < 0.0 || C <= 0.0)
    throw InvalidInputError("theory_bound_sparse: invalid arguments");
  const double complexity =
      static_cast<double>(k) * std::log(static_cast<double>(p) / k);
  return rate(std::max(complexity, 1.0), n, L, eps, C);
}

double theory_bound_banded(int p, int k, long n, int L, double eps, double C) {
  if (p < 2 || k < 1 || n < 1 || L < 0 || eps < 0.0 || C <= 0.0)
    throw InvalidInputError("theory_bound_banded: invalid arguments");
  const double w = 2.0 * k;
  const double lp = std::log(static_cast<double>(p));
  const double complexity = std::max(w, lp + w * std::log(lp / w));
  return rate(std::max(complexity, 1.0), n, L, eps, C);
}

}  // namespace wrobust
