#pragma once

#include <Eigen/Dense>
#include <string>

#include "asymlab/ssm_data.hpp"

namespace asymlab {

enum class LinearSource { Empirical, Population };

std::string to_string(LinearSource source);
LinearSource linear_source_from_string(const std::string& name);

/// Residual linear forecaster f(x) = <w_lin, x - x_d 1> + x_d.
struct LinearParams {
  Eigen::VectorXd w_lin;
  LinearSource source = LinearSource::Empirical;
  /// Fit residual: ||design w - target||_2 of the solve that produced w_lin.
  double residual = 0.0;

  int d() const { return static_cast<int>(w_lin.size()); }
};

double predict_linear(const LinearParams& p, const Eigen::VectorXd& x);

/// Ridge least squares on z_i = x_i - x_{i,d} 1 with targets y_i - x_{i,d};
/// minimum-norm when the Gram matrix is singular (coordinate d of z is
/// always zero, so w_lin[d-1] comes out as 0).
LinearParams fit_linear_empirical(const Dataset& data, double ridge = 0.0);

/// Minimum-norm w with sum_{k<d} w_k (P_k - P_d) = P_{d+1} - P_d and
/// w[d-1] = 0. Throws InfeasibleError when the residual exceeds 1e-8.
LinearParams solve_linear_population(const FeatureBank& bank);

inline constexpr double kPopulationResidualLimit = 1e-8;

}  // namespace asymlab
