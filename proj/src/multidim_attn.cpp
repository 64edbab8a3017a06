#include "asymlab/multidim_attn.hpp"

#include <cmath>

#include "asymlab/error.hpp"

namespace asymlab {

namespace {

void check_shapes(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                  const Eigen::MatrixXd& W_V) {
  const auto d = X.cols();
  if (X.rows() < 1 || d < 1)
    throw Error(ErrorKind::InvalidArgument, "attention layer: empty X");
  if (W.rows() != d || W.cols() != d || W_V.rows() != d || W_V.cols() != d)
    throw Error(ErrorKind::DimensionMismatch,
                "attention layer: W and W_V must be " + std::to_string(d) +
                    "x" + std::to_string(d));
}

}  // namespace

Eigen::MatrixXd attn_scores(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W) {
  Eigen::MatrixXd s = X * W * X.transpose();
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const double top = s.row(i).maxCoeff();
    s.row(i) = (s.row(i).array() - top).exp().matrix();
    s.row(i) /= s.row(i).sum();
  }
  return s;
}

Eigen::MatrixXd attn_forward(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                             const Eigen::MatrixXd& W_V) {
  check_shapes(X, W, W_V);
  return attn_scores(X, W) * X * W_V;
}

Eigen::MatrixXd attn_grad_W(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                            const Eigen::MatrixXd& W_V,
                            const Eigen::MatrixXd& G) {
  check_shapes(X, W, W_V);
  if (G.rows() != X.rows() || G.cols() != X.cols())
    throw Error(ErrorKind::DimensionMismatch,
                "attn_grad_W: G must have the shape of X");
  const Eigen::MatrixXd S = attn_scores(X, W);
  const Eigen::MatrixXd upstream = G * W_V.transpose() * X.transpose();  // L x L
  // sum_c S_ic upstream_ic equals sum_c Attn_ic G_ic; this form cancels
  // exactly when a row of S is one-hot (e.g. L = 1).
  const Eigen::VectorXd row_term = S.cwiseProduct(upstream).rowwise().sum();
  Eigen::MatrixXd inner = upstream;
  inner.colwise() -= row_term;
  inner = S.cwiseProduct(inner);
  return X.transpose() * inner * X;
}

std::string to_string(LocalCase c) {
  switch (c) {
    case LocalCase::AttendsElsewhere: return "case1";
    case LocalCase::AttendsLocal: return "case2";
    case LocalCase::Boundary: return "boundary";
  }
  return "unknown";
}

LocalEntry local_entry_case(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W_V,
                            const Eigen::MatrixXd& G, int i) {
  if (i < 0 || i >= X.rows())
    throw Error(ErrorKind::InvalidArgument,
                "local_entry_case: row " + std::to_string(i) + " out of range");
  if (G.rows() != X.rows() || G.cols() != X.cols() || W_V.rows() != X.cols() ||
      W_V.cols() != X.cols())
    throw Error(ErrorKind::DimensionMismatch, "local_entry_case: shape mismatch");
  LocalEntry e;
  e.value = G.row(i).dot(W_V.transpose() * X.row(i).transpose());
  if (std::abs(e.value) <= kLocalBoundaryTol)
    e.label = LocalCase::Boundary;
  else
    e.label = e.value > 0.0 ? LocalCase::AttendsElsewhere : LocalCase::AttendsLocal;
  return e;
}

}  // namespace asymlab
