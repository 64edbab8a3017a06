#pragma once

#include <Eigen/Dense>
#include <initializer_list>
#include <utility>
#include <vector>

#include "asymlab/attention.hpp"
#include "asymlab/rng.hpp"
#include "asymlab/ssm_data.hpp"

namespace testing {

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// Dataset from (x, y) pairs, no latents.
inline asymlab::Dataset make_dataset(
    const std::vector<std::pair<Eigen::VectorXd, double>>& rows) {
  asymlab::Dataset data;
  data.d = static_cast<int>(rows.front().first.size());
  for (const auto& [x, y] : rows) {
    asymlab::Sample s;
    s.x = x;
    s.y = y;
    data.samples.push_back(s);
  }
  return data;
}

inline asymlab::Dataset random_dataset(int n, int d, std::uint64_t seed) {
  asymlab::Rng rng(seed);
  std::vector<std::pair<Eigen::VectorXd, double>> rows;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd x(d);
    for (int k = 0; k < d; ++k) x(k) = rng.normal();
    rows.emplace_back(x, rng.normal());
  }
  return make_dataset(rows);
}

inline asymlab::AttentionParams random_params(int m, std::uint64_t seed) {
  return asymlab::init_params(m, seed, false);
}

inline asymlab::AttentionParams params(Eigen::VectorXd w, Eigen::VectorXd a) {
  asymlab::AttentionParams p;
  p.w = std::move(w);
  p.a = std::move(a);
  return p;
}

}  // namespace testing
