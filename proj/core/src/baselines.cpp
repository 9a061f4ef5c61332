#include "wrobust/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "wrobust/errors.hpp"
#include "wrobust/kernels.hpp"

namespace wrobust {

Vector sample_mean(const Matrix& x) {
  if (x.rows() < 1) throw InvalidInputError("sample_mean: empty input");
  Vector mean(x.cols(), 0.0);
  for (int i = 0; i < x.rows(); ++i) {
    auto r = x.row(i);
    for (int j = 0; j < x.cols(); ++j) mean[j] += r[j];
  }
  for (double& m : mean) m /= static_cast<double>(x.rows());
  return mean;
}

Matrix sample_covariance(const Matrix& x, const std::optional<Vector>& known_mean) {
  const int n = x.rows();
  const int p = x.cols();
  if (known_mean) {
    if (n < 1) throw InvalidInputError("sample_covariance: need n >= 1");
    if (static_cast<int>(known_mean->size()) != p)
      throw InvalidInputError("sample_covariance: known_mean dim mismatch");
  } else if (n < 2) {
    throw InvalidInputError("sample_covariance: need n >= 2 without a known mean");
  }
  const Vector mu = known_mean ? *known_mean : sample_mean(x);
  Matrix cov(p, p, 0.0);
  Vector c(p);
  for (int i = 0; i < n; ++i) {
    auto r = x.row(i);
    for (int j = 0; j < p; ++j) c[j] = r[j] - mu[j];
    for (int a = 0; a < p; ++a) {
      const double ca = c[a];
      auto ra = cov.row(a);
      for (int b = a; b < p; ++b) ra[b] += ca * c[b];
    }
  }
  for (int a = 0; a < p; ++a)
    for (int b = a; b < p; ++b) {
      cov(a, b) /= static_cast<double>(n);
      cov(b, a) = cov(a, b);
    }
  return cov;
}

Vector ols(const Matrix& x, const Vector& y, double ridge) {
  const int n = x.rows();
  const int p = x.cols();
  if (n < 1 || static_cast<int>(y.size()) != n)
    throw InvalidInputError("ols: y length must match row count");
  if (ridge < 0.0) throw InvalidInputError("ols: ridge must be nonnegative");
  if (ridge == 0.0 && n < p)
    throw InvalidInputError("ols: need n >= p or ridge > 0");

  Matrix gram = matmul_tn(x, x);
  for (int j = 0; j < p; ++j) gram(j, j) += ridge;
  const Vector rhs = matvec_t(x, y);

  Matrix l;
  try {
    l = cholesky(gram);
  } catch (const NotPositiveDefiniteError& e) {
    throw NotPositiveDefiniteError(
        std::string("ols: singular normal equations (") + e.what() +
            "); supply ridge > 0",
        e.pivot());
  }
  // Forward then back substitution.
  Vector z(p);
  for (int i = 0; i < p; ++i) {
    double s = rhs[i];
    for (int k = 0; k < i; ++k) s -= l(i, k) * z[k];
    z[i] = s / l(i, i);
  }
  Vector beta(p);
  for (int i = p - 1; i >= 0; --i) {
    double s = z[i];
    for (int k = i + 1; k < p; ++k) s -= l(k, i) * beta[k];
    beta[i] = s / l(i, i);
  }
  return beta;
}

namespace {

double median_inplace(Vector& v) {
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (n % 2 == 0) {
    const double lo = *std::max_element(v.begin(), v.begin() + mid);
    m = 0.5 * (lo + m);
  }
  return m;
}

}  // namespace

Vector coordinate_median(const Matrix& x) {
  if (x.rows() < 1) throw InvalidInputError("coordinate_median: empty input");
  Vector med(x.cols());
  Vector col(x.rows());
  for (int j = 0; j < x.cols(); ++j) {
    for (int i = 0; i < x.rows(); ++i) col[i] = x(i, j);
    med[j] = median_inplace(col);
  }
  return med;
}

Vector coordinate_mad(const Matrix& x, double consistency) {
  const Vector med = coordinate_median(x);
  Vector mad(x.cols());
  Vector col(x.rows());
  for (int j = 0; j < x.cols(); ++j) {
    for (int i = 0; i < x.rows(); ++i) col[i] = std::fabs(x(i, j) - med[j]);
    mad[j] = consistency * median_inplace(col);
  }
  return mad;
}

}  // namespace wrobust
