#include <doctest.h>

#include "asymlab/error.hpp"
#include "asymlab/trainer.hpp"
#include "helpers.hpp"

using namespace asymlab;
using testing::params;
using testing::vec;

namespace {

Dataset small_data() {
  const FeatureBank b = build_feature_bank(5, 0.6, BankMode::ExactNorm, 1);
  return generate_id(b, 12, 0.01, 1);
}

}  // namespace

TEST_CASE("train: eta = 0 is a no-op") {
  const Dataset data = small_data();
  const AttentionParams p0 = init_params(16, 1, true);
  TrainConfig c;
  c.eta = 0.0;
  c.steps = 20;
  const TrainResult r = train(p0, data, c);
  CHECK(r.params.w == p0.w);
  for (const TraceRecord& rec : r.trace.records) CHECK(rec.loss == r.trace.initial_loss);
  CHECK(r.trace.loss_increases == 0);
}

TEST_CASE("train: zero residual stays put") {
  Dataset data = small_data();
  for (auto& s : data.samples) s.y = 0.0;
  const AttentionParams p0 = init_params(16, 2, true);
  TrainConfig c;
  c.eta = 0.5;
  c.steps = 30;
  const TrainResult r = train(p0, data, c);
  CHECK(r.params.w == p0.w);
  CHECK(r.trace.final_loss == 0.0);
}

TEST_CASE("train: logging schedule and monotone drift") {
  const Dataset data = small_data();
  TrainConfig c;
  c.eta = 0.05;
  c.steps = 95;
  c.log_every = 10;
  c.track_kernel = true;
  c.kernel_every_logs = 2;
  const TrainResult r = train(init_params(32, 3, true), data, c);
  const auto& recs = r.trace.records;
  REQUIRE(recs.size() == 11);
  CHECK(recs.front().step == 0);
  CHECK(recs[3].step == 30);
  CHECK(recs.back().step == 95);
  for (std::size_t i = 1; i < recs.size(); ++i) CHECK(recs[i].weight_drift >= recs[i - 1].weight_drift);
  CHECK(recs[0].lambda_min.has_value());
  CHECK(!recs[1].lambda_min.has_value());
  CHECK(recs[2].kernel_drift.has_value());
  CHECK(recs.back().kernel_drift.has_value());
  CHECK(*recs[0].kernel_drift == 0.0);
  CHECK(r.trace.steps_taken == 95);
  CHECK(r.trace.final_loss < r.trace.initial_loss);
  CHECK(r.params.a == init_params(32, 3, true).a);
}

TEST_CASE("train: epsilon target stops early") {
  const Dataset data = small_data();
  TrainConfig c;
  c.eta = 0.05;
  c.steps = 1000;
  c.epsilon_target = 1e300;
  const TrainResult r = train(init_params(8, 1, true), data, c);
  CHECK(r.trace.early_stopped);
  CHECK(r.trace.steps_taken == 0);
}

TEST_CASE("train: config and shape errors") {
  const Dataset data = small_data();
  TrainConfig c;
  c.eta = -1.0;
  CHECK_THROWS_AS(train(init_params(4, 1, true), data, c), Error);
  c.eta = 0.1;
  c.log_every = 0;
  CHECK_THROWS_AS(train(init_params(4, 1, true), data, c), Error);
}

TEST_CASE("train: divergence carries the trace") {
  Dataset data = testing::make_dataset({{vec({1e7, -1e7}), 0.0}});
  data.samples[0].y = 1e7;
  TrainConfig c;
  c.eta = 1.0;
  c.steps = 5;
  try {
    train(params(vec({0, 0}), vec({1, -1})), data, c);
    FAIL("expected divergence");
  } catch (const DivergedError& e) {
    CHECK(e.kind() == ErrorKind::Diverged);
    REQUIRE(!e.trace().records.empty());
    CHECK(e.trace().records.back().loss > kDivergenceLoss);
  }
}

TEST_CASE("weight_drift examples") {
  const AttentionParams p = params(vec({0.3, -0.4}), vec({1, -1}));
  CHECK(weight_drift(p, p) == 0.0);
  AttentionParams q = p;
  q.w += vec({0.1, -0.2});
  CHECK(std::abs(weight_drift(q, p) - 0.2) < 1e-15);
  CHECK_THROWS_AS(weight_drift(params(vec({1}), vec({1})), p), Error);
}
