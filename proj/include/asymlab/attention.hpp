#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "asymlab/ssm_data.hpp"

namespace asymlab {

/// Two-layer scalar attention model
///   f(x) = (1/sqrt(m)) sum_r a_r <softmax(x_d w_r x), x>
/// with trainable hidden weights w and fixed output signs a.
struct AttentionParams {
  Eigen::VectorXd w;
  Eigen::VectorXd a;
  bool zero_init = false;
  std::uint64_t seed = 0;

  int m() const { return static_cast<int>(w.size()); }
  void validate() const;
};

/// w_r ~ N(0, 1), a_r ~ Uniform{-1, +1}. With zero_init the neurons come in
/// pairs (2j, 2j+1) sharing one weight draw with a = (+1, -1), so the
/// network output is exactly zero for every input.
AttentionParams init_params(int m, std::uint64_t seed, bool zero_init);

/// Max-shifted softmax. Throws on NaN input.
Eigen::VectorXd softmax_weights(const Eigen::VectorXd& z);

/// <s, x o x> - <s, x>^2, evaluated in centered form so it is never
/// negative.
double softmax_variance(const Eigen::VectorXd& s, const Eigen::VectorXd& x);

double forward(const AttentionParams& params, const Eigen::VectorXd& x);

/// Per (sample i, neuron r) operator quantities, stored at row i * m + r.
/// u is kept relative to the row's largest score (u = exp(z - shift)), so
/// alpha = <u, 1> and S = u / alpha hold exactly without overflow; the raw
/// exponential is u * exp(shift).
struct ForwardStats {
  int n = 0;
  int m = 0;
  int d = 0;
  Eigen::MatrixXd u;      // (n*m) x d
  Eigen::VectorXd alpha;  // n*m
  Eigen::VectorXd shift;  // n*m
  Eigen::MatrixXd S;      // (n*m) x d
  Eigen::VectorXd F;      // n

  Eigen::Index row(int i, int r) const {
    return static_cast<Eigen::Index>(i) * m + r;
  }
};

ForwardStats forward_stats(const AttentionParams& params, const Dataset& data);

/// Attention-weighted mean <S_ir, x_i> and variance
/// <S_ir, x_i^2> - <S_ir, x_i>^2 for every (i, r), as n x m matrices.
struct SoftmaxMoments {
  Eigen::MatrixXd mean;
  Eigen::MatrixXd var;
};

SoftmaxMoments softmax_moments(const Eigen::VectorXd& w, const Dataset& data);

/// F_i from moments; neurons summed in ascending order.
Eigen::VectorXd predictions(const AttentionParams& params,
                            const SoftmaxMoments& moments);

/// L = (1/2) sum_i (F_i - y_i)^2.
double loss(const AttentionParams& params, const Dataset& data);

/// dL/dw_r = (1/sqrt(m)) a_r sum_i (F_i - y_i) x_{i,d} var_{i,r}.
Eigen::VectorXd grad_w(const AttentionParams& params, const Dataset& data);

struct LossAndGrad {
  double loss = 0.0;
  Eigen::VectorXd grad;
  SoftmaxMoments moments;
};

/// One pass that yields loss and gradient at the same weights.
LossAndGrad loss_and_grad(const AttentionParams& params, const Dataset& data);

}  // namespace asymlab
