#include <doctest.h>

#include <cmath>

#include "asymlab/attention.hpp"
#include "asymlab/error.hpp"
#include "asymlab/verify.hpp"
#include "helpers.hpp"

using namespace asymlab;
using testing::params;
using testing::vec;

TEST_CASE("init_params: pairing") {
  const AttentionParams p2 = init_params(2, 1, true);
  Rng r(9);
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd x(5);
    for (int k = 0; k < 5; ++k) x(k) = r.normal();
    CHECK(forward(p2, x) == 0.0);
  }
  const AttentionParams p4 = init_params(4, 3, true);
  CHECK((p4.a.array() > 0).count() == 2);
  CHECK((p4.a.array() < 0).count() == 2);
  CHECK(p4.w(0) == p4.w(1));
  CHECK(p4.w(2) == p4.w(3));
  CHECK_THROWS_AS(init_params(3, 1, true), Error);
  CHECK_THROWS_AS(init_params(0, 1, false), Error);
}

TEST_CASE("init_params: unpaired output signs balance") {
  const AttentionParams p = init_params(1000, 5, false);
  CHECK(std::abs(p.a.mean()) <= 0.1);
  for (int r = 0; r < 1000; ++r) CHECK(std::abs(p.a(r)) == 1.0);
  const AttentionParams q = init_params(1000, 5, false);
  CHECK(p.w == q.w);
}

TEST_CASE("softmax_weights") {
  const Eigen::VectorXd s = softmax_weights(vec({0, 0, 0}));
  for (int k = 0; k < 3; ++k) CHECK(std::abs(s(k) - 1.0 / 3.0) < 1e-16);
  const Eigen::VectorXd t = softmax_weights(vec({std::log(3.0), 0}));
  CHECK(std::abs(t(0) - 0.75) < 1e-15);
  CHECK(std::abs(t(1) - 0.25) < 1e-15);
  const Eigen::VectorXd u = softmax_weights(vec({1000, 0}));
  CHECK(u.allFinite());
  CHECK(u(0) == doctest::Approx(1.0));
  CHECK(u(1) < 1e-300);
  CHECK_THROWS_AS(softmax_weights(vec({0, std::nan("")})), Error);
}

TEST_CASE("forward examples") {
  CHECK(forward(params(vec({0}), vec({1})), vec({1, 2, 3})) == doctest::Approx(2.0).epsilon(1e-15));
  const double e = std::exp(1.0);
  const double expect = (1.0 / e - e) / (1.0 / e + e);
  const double f = forward(params(vec({1}), vec({1})), vec({1, -1}));
  CHECK(std::abs(f - expect) < 1e-15);
  CHECK(std::abs(f - (-0.76159)) < 1e-5);
}

TEST_CASE("forward_stats") {
  const Dataset data = testing::random_dataset(5, 4, 2);
  const AttentionParams zero = params(Eigen::VectorXd::Zero(3), vec({1, -1, 1}));
  const ForwardStats z = forward_stats(zero, data);
  for (int i = 0; i < 5; ++i)
    for (int r = 0; r < 3; ++r)
      for (int k = 0; k < 4; ++k) CHECK(z.S(z.row(i, r), k) == 0.25);

  const AttentionParams p = testing::random_params(7, 4);
  const ForwardStats st = forward_stats(p, data);
  for (int i = 0; i < 5; ++i) {
    double f = 0.0;
    for (int r = 0; r < 7; ++r) {
      const auto row = st.row(i, r);
      CHECK(std::abs(st.S.row(row).sum() - 1.0) < 1e-12);
      CHECK(std::abs(st.u.row(row).sum() - st.alpha(row)) < 1e-12 * st.alpha(row));
      f += p.a(r) * st.S.row(row).dot(data.samples[i].x);
    }
    f /= std::sqrt(7.0);
    CHECK(std::abs(f - st.F(i)) < 1e-12);
    CHECK(std::abs(st.F(i) - forward(p, data.samples[i].x)) < 1e-12);
  }
}

TEST_CASE("loss examples") {
  const AttentionParams p = testing::random_params(6, 1);
  Dataset data = testing::random_dataset(4, 3, 3);
  for (auto& s : data.samples) s.y = forward(p, s.x);
  CHECK(loss(p, data) < 1e-28);

  const AttentionParams z = init_params(8, 2, true);
  const Dataset d2 = testing::random_dataset(6, 3, 5);
  double half = 0.0;
  for (const auto& s : d2.samples) half += 0.5 * s.y * s.y;
  CHECK(std::abs(loss(z, d2) - half) < 1e-14);

  // One sample with F = 1: w = 0 makes F the plain mean of x.
  const Dataset one = testing::make_dataset({{vec({1, 1}), 3.0}});
  CHECK(loss(params(vec({0}), vec({1})), one) == 2.0);
}

TEST_CASE("softmax_variance examples") {
  CHECK(softmax_variance(vec({0.5, 0.5}), vec({1, -1})) == 1.0);
  CHECK(softmax_variance(vec({0.2, 0.3, 0.5}), vec({4, 4, 4})) == 0.0);
  CHECK(std::abs(softmax_variance(vec({0.75, 0.25}), vec({1, -1})) - 0.75) < 1e-15);
}

TEST_CASE("grad_w examples") {
  const AttentionParams p = testing::random_params(5, 8);
  Dataset data = testing::random_dataset(4, 3, 9);
  for (auto& s : data.samples) s.y = forward(p, s.x);
  CHECK(grad_w(p, data).norm() < 1e-15);

  const Dataset one = testing::make_dataset({{vec({1, -1}), 1.0}});
  const Eigen::VectorXd g = grad_w(params(vec({0}), vec({1})), one);
  CHECK(g(0) == 1.0);
  const Eigen::VectorXd fd = verify::finite_diff_grad(
      [&](const Eigen::VectorXd& w) { return verify::attention_loss_oracle(w, vec({1}), one); },
      vec({0}));
  CHECK(std::abs(fd(0) - 1.0) < 1e-9);
}

TEST_CASE("grad_w matches finite differences (n=8, d=6, m=16)") {
  const Dataset data = testing::random_dataset(8, 6, 21);
  const AttentionParams p = testing::random_params(16, 22);
  const Eigen::VectorXd g = grad_w(p, data);
  const Eigen::VectorXd fd = verify::finite_diff_grad(
      [&](const Eigen::VectorXd& w) { return verify::attention_loss_oracle(w, p.a, data); }, p.w);
  double worst = 0.0;
  for (int r = 0; r < 16; ++r) worst = std::max(worst, verify::rel_err(g(r), fd(r)));
  CHECK(worst <= 1e-6);
}

TEST_CASE("loss_and_grad agrees with the separate calls") {
  const Dataset data = testing::random_dataset(6, 5, 1);
  const AttentionParams p = testing::random_params(10, 2);
  const LossAndGrad lg = loss_and_grad(p, data);
  CHECK(lg.loss == loss(p, data));
  CHECK(lg.grad == grad_w(p, data));
  const SoftmaxMoments mo = softmax_moments(p.w, data);
  CHECK((predictions(p, mo) - forward_stats(p, data).F).norm() < 1e-12);
  CHECK((mo.var.array() >= 0.0).all());
}

TEST_CASE("params validation") {
  AttentionParams p = params(vec({1, 2}), vec({1}));
  CHECK_THROWS_AS(p.validate(), Error);
  p = params(vec({1, 2}), vec({1, 0.5}));
  CHECK_THROWS_AS(p.validate(), Error);
}
