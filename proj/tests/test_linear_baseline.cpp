#include <doctest.h>

#include "asymlab/error.hpp"
#include "asymlab/linear_baseline.hpp"
#include "helpers.hpp"

using namespace asymlab;
using testing::vec;

namespace {

LinearParams lin(Eigen::VectorXd w) {
  LinearParams p;
  p.w_lin = std::move(w);
  return p;
}

}  // namespace

TEST_CASE("predict_linear examples") {
  CHECK(predict_linear(lin(Eigen::VectorXd::Zero(4)), vec({3, 1, 4, 1.5})) == 1.5);
  CHECK(predict_linear(lin(vec({0.3, -2, 7})), vec({2.5, 2.5, 2.5})) == 2.5);
  CHECK(predict_linear(lin(vec({1, 0, 0})), vec({2, 0, 1})) == 2.0);
  CHECK_THROWS_AS(predict_linear(lin(vec({1, 0})), vec({2, 0, 1})), Error);
}

TEST_CASE("fit_linear_empirical: plant and recover") {
  const Eigen::VectorXd w_star = vec({0.5, -1.0, 2.0, 0.25, 0.0});
  Dataset data = testing::random_dataset(20, 5, 3);
  for (auto& s : data.samples) s.y = predict_linear(lin(w_star), s.x);
  const LinearParams p = fit_linear_empirical(data);
  CHECK(p.source == LinearSource::Empirical);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(p.w_lin(k) - w_star(k)) < 1e-8);
  CHECK(p.w_lin(4) == 0.0);
}

TEST_CASE("fit_linear_empirical: persistence and ridge limit") {
  Dataset data = testing::random_dataset(10, 4, 5);
  for (auto& s : data.samples) s.y = s.x(3);
  CHECK(fit_linear_empirical(data).w_lin.norm() < 1e-12);
  const Dataset noisy = testing::random_dataset(10, 4, 6);
  CHECK(fit_linear_empirical(noisy, 1e9).w_lin.norm() < 1e-6);
  CHECK_THROWS_AS(fit_linear_empirical(noisy, -1.0), Error);
}

TEST_CASE("solve_linear_population: construction coefficients") {
  const FeatureBank b = build_feature_bank(4, 0.5, BankMode::ExactNorm, 9);
  const LinearParams p = solve_linear_population(b);
  CHECK(p.source == LinearSource::Population);
  REQUIRE(b.background_coeffs.size() == 3);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(p.w_lin(k) - b.background_coeffs(k)) < 1e-10);
  CHECK(p.w_lin(3) == 0.0);
  CHECK(p.residual <= 1e-10);
}

TEST_CASE("solve_linear_population: vanishing target") {
  const FeatureBank b = build_feature_bank(6, 1.0 - 1e-9, BankMode::ExactNorm, 2);
  CHECK(solve_linear_population(b).w_lin.norm() <= 1e-4);
}

TEST_CASE("solve_linear_population: residual-mean bank lies in the span") {
  // P_{d+1} - P_d = sum_k (P_k - P_d) / (d (d - 1)).
  const FeatureBank b = build_feature_bank(4, 0.0, BankMode::ResidualMean, 1, 6);
  const LinearParams p = solve_linear_population(b);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(p.w_lin(k) - 1.0 / 12.0) < 1e-10);
  CHECK(b.span_residual() < 1e-10);
}

TEST_CASE("solve_linear_population: generic SSM bank is infeasible") {
  const FeatureBank b = bank_from_system(random_system(6, 4), 4, 4);
  try {
    solve_linear_population(b);
    FAIL("expected infeasibility");
  } catch (const InfeasibleError& e) {
    CHECK(e.residual() > 1e-8);
    CHECK(std::abs(e.residual() - b.span_residual()) < 1e-10);
  }
}
