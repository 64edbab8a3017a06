// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when everything passes).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "asymlab/attention.hpp"
#include "asymlab/diagnostics.hpp"
#include "asymlab/experiment.hpp"
#include "asymlab/io.hpp"
#include "asymlab/multidim_attn.hpp"
#include "asymlab/ntk.hpp"
#include "asymlab/rng.hpp"
#include "asymlab/ssm_data.hpp"
#include "asymlab/trainer.hpp"
#include "asymlab/verify.hpp"

using namespace asymlab;
using io::Json;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Eigen::MatrixXd gaussian(int r, int c, Rng& rng) {
  Eigen::MatrixXd m(r, c);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) m(i, j) = rng.normal();
  return m;
}

Dataset gaussian_dataset(int n, int d, Rng& rng) {
  Dataset data;
  data.d = d;
  for (int i = 0; i < n; ++i) {
    Sample s;
    s.x = gaussian(d, 1, rng).col(0);
    s.y = rng.normal();
    data.samples.push_back(s);
  }
  return data;
}

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const verify::GradCheckResult r = verify::gradcheck_attention(20, {}, 1);
  const double secs = seconds_since(t0);
  report(1, r.max_rel_err <= 1e-6 && secs < 1.0,
         "max_rel_err=" + fmt(r.max_rel_err) + " runtime=" + fmt(secs) + "s");
}

void criterion2() {
  const verify::GradCheckResult r = verify::gradcheck_multidim(20, {}, 1);
  Rng rng(2);
  bool zeros = true;
  for (int t = 0; t < 20; ++t) {
    const int d = 1 + t % 4;
    const int L = 1 + t % 5;
    const Eigen::MatrixXd W = gaussian(d, d, rng), V = gaussian(d, d, rng);
    zeros &= attn_grad_W(gaussian(1, d, rng), W, V, gaussian(1, d, rng)).isZero(0.0);
    zeros &= attn_grad_W(gaussian(L, d, rng), W, V, Eigen::MatrixXd::Zero(L, d)).isZero(0.0);
  }
  report(2, r.max_rel_err <= 1e-6 && zeros,
         "max_rel_err=" + fmt(r.max_rel_err) + " exact_zero_cases=" + (zeros ? "yes" : "no"));
}

void criterion3() {
  Rng rng(3);
  const Dataset data = gaussian_dataset(6, 4, rng);
  const AttentionParams p = init_params(12, 3, false);
  const KernelMatrix k = kernel(p, data);
  const double factor_err = (k.H - k.psi * k.psi.transpose()).norm();
  const double oracle_err = (k.H - verify::kernel_bruteforce(p, data).H).cwiseAbs().maxCoeff();
  double worst_lambda = 1e300;
  double worst_asym = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Dataset dt = gaussian_dataset(2 + t % 9, 2 + t % 6, rng);
    const KernelMatrix kt = kernel(init_params(2 + t % 15, 100 + t, false), dt);
    worst_asym = std::max(worst_asym, (kt.H - kt.H.transpose()).cwiseAbs().maxCoeff());
    worst_lambda = std::min(worst_lambda, min_eigenvalue(kt));
  }
  report(3, factor_err <= 1e-10 && oracle_err <= 1e-12 && worst_asym == 0.0 && worst_lambda >= -1e-10,
         "factor_err=" + fmt(factor_err) + " oracle_err=" + fmt(oracle_err) +
             " min_lambda=" + fmt(worst_lambda));
}

struct SeedRun {
  std::uint64_t seed;
  Json report;
  double secs;
};

void criteria4to7(const std::vector<SeedRun>& runs) {
  int converged = 0, aligned = 0;
  bool monotone = true, fast = true;
  std::string detail4, detail5;
  for (const SeedRun& r : runs) {
    const Json& t = r.report.at("train");
    const double ratio = t.at("loss_ratio").get<double>();
    const double nonincr = t.at("nonincreasing_fraction").get<double>();
    converged += ratio <= 1e-3 ? 1 : 0;
    monotone &= nonincr >= 0.99;
    fast &= r.secs < 60.0;
    detail4 += " s" + std::to_string(r.seed) + ":ratio=" + fmt(ratio) + ",nonincr=" + fmt(nonincr) +
               ",t=" + fmt(r.secs) + "s";
    const Json& al = r.report.at("alignment");
    const double fp = al.at("frac_pos").get<double>(), fn = al.at("frac_neg").get<double>();
    aligned += (fp >= 0.9 && fn >= 0.9) ? 1 : 0;
    detail5 += " s" + std::to_string(r.seed) + ":pos=" + fmt(fp) + ",neg=" + fmt(fn);
  }
  report(4, converged >= 4 && monotone && fast,
         "converged=" + std::to_string(converged) + "/5" + detail4);
  report(5, aligned >= 4, "aligned=" + std::to_string(aligned) + "/5" + detail5);

  const Json& desk = runs.front().report;
  const double frac6 = desk.at("gap_summary").at("frac_negative_neurons_passing").get<double>();
  std::string detail6 = "seed1 frac_passing=" + fmt(frac6) + " min_gap=" +
                        fmt(desk.at("gap_summary").at("min_gap").get<double>()) + " other seeds:";
  for (std::size_t i = 1; i < runs.size(); ++i)
    detail6 += " " + fmt(runs[i].report.at("gap_summary").at("frac_negative_neurons_passing").get<double>());
  report(6, frac6 >= 0.95, detail6);

  const Json& ood = desk.at("ood");
  const double risk_attn = ood.at("risk_attn").get<double>();
  const bool have_lin = ood.at("risk_lin").is_number();
  const double risk_lin = have_lin ? ood.at("risk_lin").get<double>() : 1e300;
  report(7, have_lin && risk_lin <= 1e-3 && risk_attn / risk_lin >= 10.0,
         "risk_lin=" + fmt(risk_lin) + " risk_attn=" + fmt(risk_attn) +
             " ratio=" + fmt(risk_attn / risk_lin));
}

void criterion8() {
  const ExperimentConfig c = desk_config(1);
  std::vector<double> medians;
  std::string detail;
  for (int m : {64, 256, 1024}) {
    std::vector<double> drifts;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const FeatureBank bank = build_feature_bank(c.bank.d, c.bank.gamma, c.bank.mode, seed, c.bank.N);
      const Dataset data = generate_id(bank, c.data.n, c.data.sigma, seed);
      TrainConfig tc;
      tc.eta = c.train.eta;
      tc.steps = c.train.T;
      tc.log_every = c.train.T;
      tc.track_kernel = true;
      const TrainResult r = train(init_params(m, seed, true), data, tc);
      drifts.push_back(r.trace.records.back().kernel_drift.value());
    }
    std::sort(drifts.begin(), drifts.end());
    medians.push_back(drifts[1]);
    detail += " m=" + std::to_string(m) + ":" + fmt(drifts[1]);
  }
  report(8, medians[0] > medians[1] && medians[1] > medians[2], "median_drift" + detail);
}

void criterion9() {
  Rng rng(9);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int N = rng.uniform_int(1, 5);
    const int d = rng.uniform_int(1, 8);
    const SsmSystem sys = random_system(N, 1000 + static_cast<std::uint64_t>(t));
    const auto P = ssm_features(sys, d);
    const Eigen::VectorXd h = gaussian(N, 1, rng).col(0);
    const Eigen::VectorXd u = run_ssm(sys, h, d);
    for (int k = 0; k <= d; ++k) worst = std::max(worst, std::abs(u(k) - P[k].dot(h)));
  }
  report(9, worst <= 1e-10, "max_abs_diff=" + fmt(worst));
}

void criterion10() {
  const FeatureBank bank = build_feature_bank(8, 0.5, BankMode::ExactNorm, 1);
  const Dataset t = generate_ood_sign_inconsistent(bank, 34000, 0.01, 1);
  const double expect = std::acos(0.5) / std::numbers::pi;
  const double rate = t.acceptance_rate.value();
  report(10, t.attempts.value() >= 100000 && std::abs(rate - expect) <= 0.02,
         "rate=" + fmt(rate) + " attempts=" + std::to_string(t.attempts.value()) +
             " expected=" + fmt(expect));
}

}  // namespace

int main() {
  try {
    criterion1();
    criterion2();
    criterion3();

    std::vector<SeedRun> runs;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto t0 = std::chrono::steady_clock::now();
      Json r = run_experiment(desk_config(seed));
      runs.push_back({seed, std::move(r), seconds_since(t0)});
    }
    criteria4to7(runs);
    criterion8();
    criterion9();
    criterion10();

    const std::string again = io::dump_json(run_experiment(load_config(
        std::string(ASYMLAB_SOURCE_DIR) + "/configs/desk.json")));
    const std::string first = io::dump_json(runs.front().report);
    report(11, again == first, std::string("identical_bytes=") + (again == first ? "yes" : "no") +
                                   " size=" + std::to_string(first.size()));
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 100;
  }
  std::printf("%d of 11 criteria failed\n", failures);
  return failures;
}
