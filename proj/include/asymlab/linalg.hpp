#pragma once

#include <Eigen/Dense>

namespace asymlab::linalg {

struct JacobiOptions {
  /// Converged when the off-diagonal Frobenius norm is at most
  /// rel_tol * ||A||_F.
  double rel_tol = 1e-12;
  int max_sweeps = 100;
  /// Inputs whose asymmetry max|A - A^T| exceeds this are rejected.
  double symmetry_tol = 1e-9;
};

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // column j pairs with values(j)
  int sweeps = 0;
};

/// Cyclic Jacobi eigendecomposition of a small dense symmetric matrix.
/// Throws Error(Numerical) if it fails to converge within max_sweeps and
/// Error(InvalidArgument) for non-square or non-symmetric input.
SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& a,
                            const JacobiOptions& options = {});

/// Moore-Penrose inverse of a symmetric PSD matrix; eigenvalues at or below
/// rel_cutoff * lambda_max are treated as zero.
Eigen::MatrixXd symmetric_pinv(const Eigen::MatrixXd& a,
                               double rel_cutoff = 1e-10);

/// Minimum-norm least-squares solution of design * w ~= target via the
/// normal equations (design^T design + ridge I) w = design^T target.
Eigen::VectorXd min_norm_lstsq(const Eigen::MatrixXd& design,
                               const Eigen::VectorXd& target,
                               double ridge = 0.0, double rel_cutoff = 1e-10);

}  // namespace asymlab::linalg
