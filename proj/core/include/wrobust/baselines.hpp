#pragma once

#include <optional>

#include "wrobust/matrix.hpp"

namespace wrobust {

Vector sample_mean(const Matrix& x);

/// (1/n)·Σ (xᵢ-μ)(xᵢ-μ)ᵀ with μ = known_mean when given, otherwise the
/// sample mean (which then requires n >= 2).
Matrix sample_covariance(const Matrix& x,
                         const std::optional<Vector>& known_mean = std::nullopt);

/// Solves (XᵀX + ridge·I)β = Xᵀy by Cholesky. Singular normal equations with
/// ridge = 0 raise a not-positive-definite error suggesting a ridge.
Vector ols(const Matrix& x, const Vector& y, double ridge = 0.0);

/// Coordinate-wise median; robust location initializer.
Vector coordinate_median(const Matrix& x);

/// Coordinate-wise median absolute deviation, scaled for Gaussian
/// consistency; robust scale initializer.
Vector coordinate_mad(const Matrix& x, double consistency = 1.4826);

}  // namespace wrobust
