#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace isoshell {

/// Hager-Higham estimate of ||A^{-1}||_1 from a computed factorization
/// (deterministic start, at most a handful of solves with A and A^T).
/// Non-const because Eigen's transpose-solve view requires it.
double inverse_norm1_estimate(Eigen::SparseLU<Eigen::SparseMatrix<double>>& lu, Eigen::Index n);

/// 1-norm condition estimate of a square sparse matrix.
double condition_estimate_1norm(const Eigen::SparseMatrix<double>& A);

/// Componentwise (Skeel) condition estimate || |A^{-1}| |A| ||_inf, computed
/// as ||A^{-1} diag(|A| e)||_inf with the same 1-norm estimator. Invariant
/// under row scaling, so stencil rows carrying 1/h^2 factors do not mask the
/// sensitivity of the underlying problem.
double skeel_condition_estimate(const Eigen::SparseMatrix<double>& A);

}  // namespace isoshell
