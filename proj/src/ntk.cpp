#include "asymlab/ntk.hpp"

#include <cmath>
#include <string>

#include "asymlab/error.hpp"
#include "asymlab/linalg.hpp"

namespace asymlab {

KernelMatrix kernel_from_moments(const Dataset& data,
                                 const SoftmaxMoments& moments) {
  const Eigen::Index n = moments.var.rows();
  const Eigen::Index m = moments.var.cols();
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));
  KernelMatrix k;
  k.psi.resize(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double xd = data.samples[static_cast<std::size_t>(i)].x(data.d - 1);
    k.psi.row(i) = (xd * inv_sqrt_m) * moments.var.row(i);
  }
  k.H = k.psi * k.psi.transpose();
  // Exact symmetry; the product is symmetric only up to rounding.
  k.H = (0.5 * (k.H + k.H.transpose())).eval();
  return k;
}

KernelMatrix kernel(const AttentionParams& params, const Dataset& data) {
  return kernel_from_moments(data, softmax_moments(params.w, data));
}

double min_eigenvalue(const Eigen::MatrixXd& h) {
  if (h.rows() == 0)
    throw Error(ErrorKind::InvalidArgument, "min_eigenvalue: empty matrix");
  return linalg::jacobi_eigen(h).values(0);
}

double min_eigenvalue(const KernelMatrix& k) { return min_eigenvalue(k.H); }

double kernel_drift(const KernelMatrix& current, const KernelMatrix& initial) {
  if (current.H.rows() != initial.H.rows() ||
      current.H.cols() != initial.H.cols())
    throw Error(ErrorKind::DimensionMismatch,
                "kernel_drift: kernels are " + std::to_string(current.n()) +
                    " and " + std::to_string(initial.n()) + " samples");
  return (current.H - initial.H).norm();
}

}  // namespace asymlab
