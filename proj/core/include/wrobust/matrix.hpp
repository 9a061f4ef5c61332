#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wrobust {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles. Dimensions are fixed at construction.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0);

  static Matrix identity(int n);
  static Matrix diag(const Vector& d);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(int i, int j) {
    return data_[static_cast<std::size_t>(i) * cols_ + j];
  }
  double operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * cols_ + j];
  }

  std::span<double> row(int i) {
    return {data_.data() + static_cast<std::size_t>(i) * cols_,
            static_cast<std::size_t>(cols_)};
  }
  std::span<const double> row(int i) const {
    return {data_.data() + static_cast<std::size_t>(i) * cols_,
            static_cast<std::size_t>(cols_)};
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  /// Flat row-major storage; used by the optimizer for in-place updates.
  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  bool all_finite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> v);
double l1_norm(std::span<const double> v);
double max_abs(std::span<const double> v);
bool all_finite(std::span<const double> v);

Vector matvec(const Matrix& a, const Vector& x);    // a·x
Vector matvec_t(const Matrix& a, const Vector& x);  // aᵀ·x
Matrix matmul(const Matrix& a, const Matrix& b);    // a·b
Matrix matmul_nt(const Matrix& a, const Matrix& b); // a·bᵀ
Matrix matmul_tn(const Matrix& a, const Matrix& b); // aᵀ·b
Matrix transpose(const Matrix& a);

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);

}  // namespace wrobust
