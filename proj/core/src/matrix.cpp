#include "wrobust/matrix.hpp"

#include <cmath>
#include <cstdlib>

#include "wrobust/errors.hpp"

namespace wrobust {

Matrix::Matrix(int rows, int cols, double fill)
    : rows_(rows), cols_(cols),
      data_(static_cast<std::size_t>(rows) * cols, fill) {
  if (rows < 0 || cols < 0) throw InvalidInputError("Matrix: negative dimension");
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n, 0.0);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diag(const Vector& d) {
  const int n = static_cast<int>(d.size());
  Matrix m(n, n, 0.0);
  for (int i = 0; i < n; ++i) m(i, i) = d[i];
  return m;
}

bool Matrix::all_finite() const { return wrobust::all_finite(data_); }

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double l1_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::fabs(x);
  return s;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

static void check_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InvalidInputError(std::string(op) + ": shape mismatch");
}

Vector matvec(const Matrix& a, const Vector& x) {
  if (a.cols() != static_cast<int>(x.size()))
    throw InvalidInputError("matvec: shape mismatch");
  Vector y(a.rows(), 0.0);
  for (int i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

Vector matvec_t(const Matrix& a, const Vector& x) {
  if (a.rows() != static_cast<int>(x.size()))
    throw InvalidInputError("matvec_t: shape mismatch");
  Vector y(a.cols(), 0.0);
  for (int i = 0; i < a.rows(); ++i) {
    const double xi = x[i];
    auto r = a.row(i);
    for (int j = 0; j < a.cols(); ++j) y[j] += xi * r[j];
  }
  return y;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw InvalidInputError("matmul: shape mismatch");
  Matrix c(a.rows(), b.cols(), 0.0);
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw InvalidInputError("matmul_nt: shape mismatch");
  Matrix c(a.rows(), b.rows(), 0.0);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.rows(); ++j) c(i, j) = dot(a.row(i), b.row(j));
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw InvalidInputError("matmul_tn: shape mismatch");
  Matrix c(a.cols(), b.cols(), 0.0);
  for (int k = 0; k < a.rows(); ++k)
    for (int i = 0; i < a.cols(); ++i) {
      const double aki = a(k, i);
      if (aki == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aki * b(k, j);
    }
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "operator+");
  Matrix c = a;
  for (std::size_t i = 0; i < c.storage().size(); ++i)
    c.storage()[i] += b.storage()[i];
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "operator-");
  Matrix c = a;
  for (std::size_t i = 0; i < c.storage().size(); ++i)
    c.storage()[i] -= b.storage()[i];
  return c;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix c = a;
  for (double& x : c.storage()) x *= s;
  return c;
}

double frobenius_norm(const Matrix& a) { return l2_norm(a.storage()); }

double max_abs(const Matrix& a) { return max_abs(std::span<const double>(a.storage())); }

}  // namespace wrobust
