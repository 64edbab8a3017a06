#pragma once

#include <Eigen/Dense>
#include <string>

namespace asymlab {

/// Softmax attention layer Attn(X, W) = S X W_V with
/// S = row-softmax(X W X^T). X is L x d, W and W_V are d x d.
Eigen::MatrixXd attn_scores(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W);
Eigen::MatrixXd attn_forward(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                             const Eigen::MatrixXd& W_V);

/// Gradient of sum(Attn(X, W) o G) with respect to W:
///   X^T (S o (G W_V^T X^T - r 1^T)) X,  r_i = sum_c Attn_ic G_ic.
Eigen::MatrixXd attn_grad_W(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                            const Eigen::MatrixXd& W_V,
                            const Eigen::MatrixXd& G);

enum class LocalCase { AttendsElsewhere, AttendsLocal, Boundary };

std::string to_string(LocalCase c);

struct LocalEntry {
  double value = 0.0;  // <G_i, W_V^T X_i>
  LocalCase label = LocalCase::Boundary;
};

inline constexpr double kLocalBoundaryTol = 1e-12;

/// Sign of <G_i, W_V^T X_i> for row i (0-based). Positive: the update pushes
/// attention away from the diagonal entry; negative: towards it.
LocalEntry local_entry_case(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W_V,
                            const Eigen::MatrixXd& G, int i);

}  // namespace asymlab
