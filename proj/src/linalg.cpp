#include "asymlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "asymlab/error.hpp"

namespace asymlab::linalg {

namespace {

double off_diagonal_norm(const Eigen::MatrixXd& a) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) sum += a(i, j) * a(i, j);
  return std::sqrt(sum);
}

// Zero a(p, q) with one rotation, accumulating into v.
void rotate(Eigen::MatrixXd& a, Eigen::MatrixXd& v, Eigen::Index p,
            Eigen::Index q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const double apk = a(p, k);
    const double aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace

SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& input,
                            const JacobiOptions& options) {
  if (input.rows() != input.cols())
    throw Error(ErrorKind::InvalidArgument,
                "jacobi_eigen: matrix is " + std::to_string(input.rows()) +
                    "x" + std::to_string(input.cols()) + ", not square");
  const Eigen::Index n = input.rows();
  if (n > 0) {
    const double asym = (input - input.transpose()).cwiseAbs().maxCoeff();
    if (!(asym <= options.symmetry_tol))
      throw Error(ErrorKind::InvalidArgument,
                  "jacobi_eigen: matrix not symmetric (max asymmetry " +
                      std::to_string(asym) + ")");
  }

  Eigen::MatrixXd a = 0.5 * (input + input.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double threshold = options.rel_tol * a.norm();

  int sweep = 0;
  while (off_diagonal_norm(a) > threshold) {
    if (sweep == options.max_sweeps)
      throw Error(ErrorKind::Numerical,
                  "jacobi_eigen: no convergence after " +
                      std::to_string(options.max_sweeps) + " sweeps");
    for (Eigen::Index p = 0; p + 1 < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) rotate(a, v, p, q);
    ++sweep;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&a](Eigen::Index l, Eigen::Index r) {
                     return a(l, l) < a(r, r);
                   });
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto src = order[static_cast<std::size_t>(j)];
    out.values(j) = a(src, src);
    out.vectors.col(j) = v.col(src);
  }
  out.sweeps = sweep;
  return out;
}

Eigen::MatrixXd symmetric_pinv(const Eigen::MatrixXd& a, double rel_cutoff) {
  const SymmetricEigen eig = jacobi_eigen(a);
  const Eigen::Index n = a.rows();
  if (n == 0) return a;
  const double top = eig.values.cwiseAbs().maxCoeff();
  const double cutoff = rel_cutoff * top;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j)
    if (eig.values(j) > cutoff) inv(j) = 1.0 / eig.values(j);
  return eig.vectors * inv.asDiagonal() * eig.vectors.transpose();
}

Eigen::VectorXd min_norm_lstsq(const Eigen::MatrixXd& design,
                               const Eigen::VectorXd& target, double ridge,
                               double rel_cutoff) {
  if (design.rows() != target.size())
    throw Error(ErrorKind::DimensionMismatch,
                "min_norm_lstsq: design has " + std::to_string(design.rows()) +
                    " rows but target has " + std::to_string(target.size()));
  Eigen::MatrixXd gram = design.transpose() * design;
  gram.diagonal().array() += ridge;
  return symmetric_pinv(gram, rel_cutoff) * (design.transpose() * target);
}

}  // namespace asymlab::linalg
