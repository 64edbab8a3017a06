#include "asymlab/linear_baseline.hpp"

#include <string>

#include "asymlab/error.hpp"
#include "asymlab/linalg.hpp"

namespace asymlab {

std::string to_string(LinearSource source) {
  return source == LinearSource::Empirical ? "empirical" : "population";
}

LinearSource linear_source_from_string(const std::string& name) {
  if (name == "empirical") return LinearSource::Empirical;
  if (name == "population") return LinearSource::Population;
  throw Error(ErrorKind::InvalidArgument,
              "unknown linear source '" + name + "'");
}

double predict_linear(const LinearParams& p, const Eigen::VectorXd& x) {
  if (x.size() != p.w_lin.size() || x.size() == 0)
    throw Error(ErrorKind::DimensionMismatch,
                "predict_linear: x has " + std::to_string(x.size()) +
                    " entries, w_lin has " + std::to_string(p.w_lin.size()));
  const double last = x(x.size() - 1);
  return p.w_lin.dot((x.array() - last).matrix()) + last;
}

LinearParams fit_linear_empirical(const Dataset& data, double ridge) {
  if (data.empty())
    throw Error(ErrorKind::InvalidArgument,
                "fit_linear_empirical: dataset is empty");
  if (!(ridge >= 0.0))
    throw Error(ErrorKind::InvalidArgument,
                "fit_linear_empirical: ridge must be >= 0");
  validate_dataset(data);
  const auto n = static_cast<Eigen::Index>(data.size());
  const int d = data.d;
  Eigen::MatrixXd z(n, d);
  Eigen::VectorXd t(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Sample& s = data.samples[static_cast<std::size_t>(i)];
    const double last = s.x(d - 1);
    z.row(i) = (s.x.array() - last).matrix().transpose();
    t(i) = s.y - last;
  }
  LinearParams p;
  p.source = LinearSource::Empirical;
  p.w_lin = linalg::min_norm_lstsq(z, t, ridge);
  p.residual = (z * p.w_lin - t).norm();
  return p;
}

LinearParams solve_linear_population(const FeatureBank& bank) {
  const int d = bank.d;
  if (d < 2 || static_cast<int>(bank.features.size()) != d + 1)
    throw Error(ErrorKind::InvalidArgument,
                "solve_linear_population: malformed feature bank");
  const Eigen::VectorXd& core = bank.core();
  Eigen::MatrixXd design(bank.N, d - 1);
  for (int k = 0; k + 1 < d; ++k) design.col(k) = bank.features[k] - core;
  const Eigen::VectorXd rhs = bank.target() - core;
  const Eigen::VectorXd coef = linalg::min_norm_lstsq(design, rhs);
  const double residual = (design * coef - rhs).norm();
  if (!(residual <= kPopulationResidualLimit))
    throw InfeasibleError(
        "solve_linear_population: P_{d+1} - P_d is not in the background "
        "span (residual " + std::to_string(residual) + ")",
        residual);
  LinearParams p;
  p.source = LinearSource::Population;
  p.w_lin = Eigen::VectorXd::Zero(d);
  p.w_lin.head(d - 1) = coef;
  p.residual = residual;
  return p;
}

}  // namespace asymlab
