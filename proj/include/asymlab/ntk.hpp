#pragma once

#include <Eigen/Dense>

#include "asymlab/attention.hpp"
#include "asymlab/ssm_data.hpp"

namespace asymlab {

/// Empirical tangent kernel of the attention model,
///   H_ij = (1/m) x_{i,d} x_{j,d} sum_r var_ir var_jr,
/// kept together with its feature map psi_ir = x_{i,d} var_ir / sqrt(m),
/// so that H = psi psi^T.
struct KernelMatrix {
  Eigen::MatrixXd H;
  Eigen::MatrixXd psi;  // n x m

  int n() const { return static_cast<int>(H.rows()); }
};

KernelMatrix kernel(const AttentionParams& params, const Dataset& data);

/// Kernel from precomputed moments (the trainer reuses its gradient pass).
KernelMatrix kernel_from_moments(const Dataset& data,
                                 const SoftmaxMoments& moments);

/// Smallest eigenvalue by cyclic Jacobi. Rejects asymmetry above 1e-9.
double min_eigenvalue(const Eigen::MatrixXd& h);
double min_eigenvalue(const KernelMatrix& k);

/// ||H_t - H_0||_F.
double kernel_drift(const KernelMatrix& current, const KernelMatrix& initial);

}  // namespace asymlab
