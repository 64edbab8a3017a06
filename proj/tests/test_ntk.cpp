#include <doctest.h>

#include <cmath>

#include "asymlab/error.hpp"
#include "asymlab/ntk.hpp"
#include "asymlab/verify.hpp"
#include "helpers.hpp"

using namespace asymlab;
using testing::params;
using testing::vec;

TEST_CASE("kernel: constant sample gives a zero row and column") {
  Dataset data = testing::random_dataset(4, 3, 1);
  data.samples[2].x = vec({2, 2, 2});
  const KernelMatrix k = kernel(testing::random_params(6, 2), data);
  CHECK(k.H.row(2).isZero(0.0));
  CHECK(k.H.col(2).isZero(0.0));
}

TEST_CASE("kernel: n=1, m=1 hand value") {
  const Dataset one = testing::make_dataset({{vec({1, -1}), 0.0}});
  const KernelMatrix k = kernel(params(vec({0}), vec({1})), one);
  CHECK(k.H(0, 0) == 1.0);
}

TEST_CASE("kernel: factor form and brute-force oracle") {
  const Dataset data = testing::random_dataset(6, 4, 3);
  const AttentionParams p = testing::random_params(12, 4);
  const KernelMatrix k = kernel(p, data);
  CHECK((k.H - k.psi * k.psi.transpose()).norm() <= 1e-10);
  const KernelMatrix b = verify::kernel_bruteforce(p, data);
  CHECK((k.H - b.H).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(k.H == k.H.transpose());
}

TEST_CASE("kernel is PSD on random instances") {
  for (int t = 0; t < 50; ++t) {
    const Dataset data = testing::random_dataset(2 + t % 7, 2 + t % 5, 100 + t);
    const KernelMatrix k = kernel(testing::random_params(4 + t % 13, 200 + t), data);
    CHECK(min_eigenvalue(k) >= -1e-10);
  }
}

TEST_CASE("min_eigenvalue examples") {
  CHECK(min_eigenvalue(Eigen::MatrixXd::Identity(3, 3)) == 1.0);
  CHECK(min_eigenvalue(Eigen::Vector3d(1, 2, 3).asDiagonal().toDenseMatrix()) == 1.0);
  Rng r(5);
  for (int t = 0; t < 20; ++t) {
    const double a = r.normal(), b = r.normal(), c = r.normal();
    Eigen::Matrix2d m;
    m << a, b, b, c;
    const double root = 0.5 * (a + c) - std::sqrt(0.25 * (a - c) * (a - c) + b * b);
    CHECK(std::abs(min_eigenvalue(Eigen::MatrixXd(m)) - root) <= 1e-12);
  }
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 1e-6, 0, 1;
  CHECK_THROWS_AS(min_eigenvalue(asym), Error);
  asym(0, 1) = 1e-10;
  CHECK_NOTHROW(min_eigenvalue(asym));
}

TEST_CASE("kernel_drift examples") {
  KernelMatrix a, b;
  a.H = Eigen::MatrixXd::Random(3, 3);
  b.H = a.H;
  CHECK(kernel_drift(a, b) == 0.0);
  a.H = Eigen::MatrixXd::Zero(2, 2);
  b.H = Eigen::MatrixXd::Zero(2, 2);
  a.H(0, 1) = a.H(1, 0) = 1.0;
  CHECK(std::abs(kernel_drift(a, b) - std::sqrt(2.0)) < 1e-15);
  b.H = Eigen::MatrixXd::Zero(3, 3);
  CHECK_THROWS_AS(kernel_drift(a, b), Error);
}
