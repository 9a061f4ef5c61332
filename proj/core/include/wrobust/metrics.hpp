#pragma once

#include "wrobust/generators.hpp"
#include "wrobust/matrix.hpp"

namespace wrobust {

enum class LossKind { LocSquaredL2, CovSpectral, RegL2, RegPrediction };

double loc_squared_error(const Vector& estimate, const Vector& truth);
double cov_spectral_error(const Matrix& estimate, const Matrix& truth);
double reg_l2_error(const Vector& estimate, const Vector& truth);
/// Δβᵀ·Σ·Δβ, the prediction error under X ~ N(0, Σ).
double reg_prediction_error(const Vector& estimate, const Vector& truth,
                            const Matrix& sigma);

double loss(LossKind kind, const Estimate& estimate, const Estimate& truth,
            const Matrix* sigma = nullptr);

/// Exact Wasserstein-1 distance between the uniform empirical measures on the
/// rows of s1 and s2 (equal counts, n <= 1024), by minimum-cost perfect
/// matching under the Euclidean cost.
double w1_exact(const Matrix& s1, const Matrix& s2);

/// Minimum-cost perfect matching of an n×n cost matrix (shortest augmenting
/// path, O(n³)). Returns the column matched to each row.
std::vector<int> min_cost_assignment(const Matrix& cost);

/// C·max(2^L·sqrt(p/n), eps) and the structured-class variants.
double theory_bound(int p, long n, int L, double eps, double C);
double theory_bound_sparse(int p, int k, long n, int L, double eps, double C);
double theory_bound_banded(int p, int k, long n, int L, double eps, double C);

}  // namespace wrobust
