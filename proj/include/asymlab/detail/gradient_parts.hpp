#pragma once

// Per-neuron derivative pieces of the attention loss. Internal: they use the
// raw (unshifted) exponential and exist so each step of the chain rule can
// be checked on its own.

#include <Eigen/Dense>

namespace asymlab::detail {

/// u = exp(x_d * w * x)
Eigen::VectorXd raw_u(const Eigen::VectorXd& x, double w);
double raw_alpha(const Eigen::VectorXd& x, double w);
Eigen::VectorXd raw_S(const Eigen::VectorXd& x, double w);

/// du/dw = x_d * u o x
Eigen::VectorXd du_dw(const Eigen::VectorXd& x, double w);
/// dalpha/dw = x_d <u o x, 1>
double dalpha_dw(const Eigen::VectorXd& x, double w);
/// d(alpha^{-1})/dw = -x_d alpha^{-1} <S o x, 1>
double dinv_alpha_dw(const Eigen::VectorXd& x, double w);
/// dS/dw = x_d (x - <S, x> 1) o S
Eigen::VectorXd dS_dw(const Eigen::VectorXd& x, double w);
/// dF/dw_r for one neuron: (1/sqrt(m)) a_r x_d (<S, x^2> - <S, x>^2)
double dF_dw(const Eigen::VectorXd& x, double w, double a_r, int m);

}  // namespace asymlab::detail
