#pragma once

// Independent oracles: central finite differences and literal
// re-evaluations of the model, kernel and attention layer. Nothing here
// calls into the primary computation paths; sums run in long double and in
// a different order.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

#include "asymlab/attention.hpp"
#include "asymlab/ntk.hpp"
#include "asymlab/ssm_data.hpp"

namespace asymlab::verify {

inline constexpr double kDefaultStep = 1e-5;
inline constexpr double kRelErrFloor = 1e-8;

/// |a - b| / max(|a|, |b|, 1e-8).
double rel_err(double a, double b);

using ScalarFn = std::function<long double(const Eigen::VectorXd&)>;

/// Central differences (f(w + h e_j) - f(w - h e_j)) / (2h), where 2h is
/// taken as the exactly representable difference of the perturbed points.
/// Throws Error(Numerical) if f returns a non-finite value.
Eigen::VectorXd finite_diff_grad(const ScalarFn& f, const Eigen::VectorXd& at,
                                 double h = kDefaultStep);

struct GradCheckResult {
  double max_abs_err = 0.0;
  double max_rel_err = 0.0;
  long argmax = -1;  // flat index of the worst entry across all trials
  double h = kDefaultStep;
  int trials = 0;
  std::uint64_t seed = 0;
};

/// Compares an analytic gradient to a finite-difference one and folds the
/// result into `acc`, offsetting flat indices by `index_offset`.
void accumulate(GradCheckResult& acc, const Eigen::VectorXd& analytic,
                const Eigen::VectorXd& numeric, long index_offset);

/// Literal loss of the attention model in long double.
long double attention_loss_oracle(const Eigen::VectorXd& w,
                                  const Eigen::VectorXd& a,
                                  const Dataset& data);

/// Literal sum(Attn(X, W) o G) in long double; W is passed flattened
/// column-major.
long double multidim_loss_oracle(const Eigen::MatrixXd& X,
                                 const Eigen::VectorXd& w_flat,
                                 const Eigen::MatrixXd& W_V,
                                 const Eigen::MatrixXd& G);

struct AttentionDims {
  int max_n = 8;
  int max_d = 6;
  int max_m = 16;
};

struct MultiDimDims {
  int max_L = 5;
  int max_d = 4;
};

/// Random instances: x, y ~ N(0, 1) clipped to [-5, 5], w ~ N(0, 1) clipped
/// to [-3, 3], a uniform on +-1; sizes uniform in [1, max] (d >= 2).
GradCheckResult gradcheck_attention(int trials, const AttentionDims& dims,
                                    std::uint64_t seed,
                                    double h = kDefaultStep);

/// Random instances: X, G ~ N(0, 1) clipped to [-5, 5], W and W_V with
/// entries N(0, 1/d) clipped to [-3, 3]; L and d uniform in [1, max].
GradCheckResult gradcheck_multidim(int trials, const MultiDimDims& dims,
                                   std::uint64_t seed,
                                   double h = kDefaultStep);

/// Entry-by-entry kernel H_ij = (1/m) x_id x_jd sum_r v_ir v_jr with each
/// variance recomputed from scratch inside the loop.
KernelMatrix kernel_bruteforce(const AttentionParams& params,
                               const Dataset& data);

/// Per-sample variance about the mean, two-pass in long double.
double v_min_oracle(const Dataset& data);

}  // namespace asymlab::verify
