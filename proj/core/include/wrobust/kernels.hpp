#pragma once

#include "wrobust/matrix.hpp"

namespace wrobust {

struct SpectralNormResult {
  double value = 0.0;
  int iterations = 0;
  bool converged = true;
};

/// Largest singular value via power iteration on MᵀM. Stops once two
/// consecutive Rayleigh estimates differ by less than `tol` (plus a short
/// confirmation run; the Rayleigh sequence is nondecreasing), or flags
/// non-convergence after `max_iter` iterations. The start vector is drawn
/// from a fixed internal stream, so the result is a pure function of M.
SpectralNormResult spectral_norm(const Matrix& m, double tol = 1e-9,
                                 int max_iter = 10000);

struct SymmetricEigen {
  Vector values;   // ascending
  Matrix vectors;  // columns aligned with values
};

/// Symmetric eigendecomposition by cyclic Jacobi sweeps. Intended for the
/// small matrices that arise here (p <= ~80).
SymmetricEigen symmetric_eigen(const Matrix& s);

/// Lower-triangular L with L·Lᵀ = S. Throws NotPositiveDefiniteError naming
/// the failing pivot when S is not positive definite.
Matrix cholesky(const Matrix& s);

/// V·clamp(Λ, lo, hi)·Vᵀ from the symmetric eigendecomposition of S.
Matrix eigen_clamp(const Matrix& s, double lo, double hi);

/// Symmetric PSD square root; negative eigenvalues are treated as zero.
Matrix symmetric_sqrt(const Matrix& s);

/// Indices of the k largest |v_i|, returned ascending. Ties break toward the
/// lower index.
std::vector<int> top_k_indices(const Vector& v, int k);

}  // namespace wrobust
