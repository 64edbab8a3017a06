// asymlab command-line driver.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "asymlab/attention.hpp"
#include "asymlab/diagnostics.hpp"
#include "asymlab/error.hpp"
#include "asymlab/experiment.hpp"
#include "asymlab/io.hpp"
#include "asymlab/linear_baseline.hpp"
#include "asymlab/ntk.hpp"
#include "asymlab/ssm_data.hpp"
#include "asymlab/trainer.hpp"
#include "asymlab/verify.hpp"

using namespace asymlab;
using io::Json;

namespace {

constexpr double kGradTolerance = 1e-6;

// Files written by `gen` hold {bank, dataset}; `train` writes {params, trace}.
// Loaders also accept the bare object.
const Json& section(const Json& j, const char* key) {
  return j.contains(key) ? j.at(key) : j;
}

void emit(const Json& j, const std::string& out) {
  if (out.empty())
    std::cout << io::dump_json(j);
  else
    io::save_json(out, j);
}

struct GenOpts {
  int d = 8;
  int N = 0;
  double gamma = 0.8;
  std::string mode = "exact-norm";
  int n = 32;
  double sigma = 0.01;
  std::uint64_t seed = 1;
  std::string kind = "id";
  std::int64_t max_rejects = kDefaultMaxRejects;
  std::string out;
};

int run_gen(const GenOpts& o) {
  if (!o.out.empty()) io::check_writable(o.out);
  const FeatureBank bank =
      build_feature_bank(o.d, o.gamma, bank_mode_from_string(o.mode), o.seed, o.N);
  const DatasetKind kind = dataset_kind_from_string(o.kind);
  const Dataset data = kind == DatasetKind::InDistribution
                           ? generate_id(bank, o.n, o.sigma, o.seed)
                           : generate_ood_sign_inconsistent(bank, o.n, o.sigma, o.seed,
                                                            o.max_rejects);
  Json j;
  j["bank"] = io::to_json(bank);
  j["dataset"] = io::to_json(data);
  emit(j, o.out);
  return 0;
}

struct TrainOpts {
  std::string data;
  int m = 512;
  bool random_init = false;
  double eta = 0.05;
  long steps = 5000;
  long log_every = 50;
  bool track_kernel = false;
  std::uint64_t seed = 1;
  std::string trace_csv;
  std::string out;
};

int run_train(const TrainOpts& o) {
  if (!o.out.empty()) io::check_writable(o.out);
  if (!o.trace_csv.empty()) io::check_writable(o.trace_csv);
  const Dataset data = io::dataset_from_json(section(io::load_json(o.data), "dataset"));
  const AttentionParams init = init_params(o.m, o.seed, !o.random_init);
  TrainConfig tc;
  tc.eta = o.eta;
  tc.steps = o.steps;
  tc.log_every = o.log_every;
  tc.track_kernel = o.track_kernel;
  tc.seed = o.seed;
  const TrainResult r = train(init, data, tc);
  Json j;
  j["params"] = io::to_json(r.params);
  j["trace"] = io::to_json(r.trace);
  if (!o.trace_csv.empty()) io::write_text(o.trace_csv, io::trace_csv(r.trace));
  if (o.out.empty()) {
    std::cout << "initial_loss " << io::format_double(r.trace.initial_loss) << "\n"
              << "final_loss " << io::format_double(r.trace.final_loss) << "\n"
              << "loss_increases " << r.trace.loss_increases << "\n";
  } else {
    io::save_json(o.out, j);
  }
  return 0;
}

struct NtkOpts {
  std::string data;
  std::string params;
  int m = 512;
  std::uint64_t seed = 1;
  std::string out;
};

int run_ntk(const NtkOpts& o) {
  if (!o.out.empty()) io::check_writable(o.out);
  const Dataset data = io::dataset_from_json(section(io::load_json(o.data), "dataset"));
  const AttentionParams p =
      o.params.empty() ? init_params(o.m, o.seed, true)
                       : io::params_from_json(section(io::load_json(o.params), "params"));
  const KernelMatrix k = kernel(p, data);
  const double lam = min_eigenvalue(k);
  if (o.out.empty())
    std::cout << "lambda_min " << io::format_double(lam) << "\n";
  else
    io::save_json(o.out, io::to_json(k, lam));
  return 0;
}

struct DiagnoseOpts {
  std::string params;
  int d = 8;
  double sigma_prime = 1.0;
  long n_mc = 10000;
  bool all_neurons = false;
  std::uint64_t seed = 1;
  std::string out;
};

int run_diagnose(const DiagnoseOpts& o) {
  if (!o.out.empty()) io::check_writable(o.out);
  const AttentionParams p = io::params_from_json(section(io::load_json(o.params), "params"));
  const AlignmentReport al = sign_alignment(p);
  const AttentionGapReport gaps = residual_attention_gap(
      p, o.d, {}, o.sigma_prime, o.n_mc, o.seed,
      o.all_neurons ? GapScope::AllNeurons : GapScope::NegativeOutputOnly);
  Json j;
  j["alignment"] = {{"frac_pos", al.frac_pos}, {"frac_neg", al.frac_neg}};
  Json arr = Json::array();
  for (const GapEntry& e : gaps.entries())
    arr.push_back({{"r", e.r}, {"k", e.k}, {"gap", e.gap}, {"se", e.se}});
  j["gaps"] = arr;
  j["min_gap"] = gaps.neurons.empty() ? 0.0 : gaps.min_gap();
  if (o.out.empty()) {
    std::cout << "frac_pos " << io::format_double(al.frac_pos) << "\n"
              << "frac_neg " << io::format_double(al.frac_neg) << "\n"
              << "min_gap " << io::format_double(j["min_gap"].get<double>()) << "\n";
  } else {
    io::save_json(o.out, j);
  }
  return 0;
}

struct OodOpts {
  std::string data;
  std::string params;
  std::string out;
};

int run_ood(const OodOpts& o) {
  if (!o.out.empty()) io::check_writable(o.out);
  const Json bundle = io::load_json(o.data);
  const Dataset test = io::dataset_from_json(section(bundle, "dataset"));
  Json j;
  j["n_test"] = static_cast<long>(test.samples.size());
  if (!o.params.empty()) {
    const AttentionParams p = io::params_from_json(section(io::load_json(o.params), "params"));
    j["risk_attn"] = ood_risk([&](const Eigen::VectorXd& x) { return forward(p, x); }, test);
  }
  if (bundle.contains("bank")) {
    const LinearParams lin = solve_linear_population(io::bank_from_json(bundle.at("bank")));
    j["risk_lin"] = ood_risk([&](const Eigen::VectorXd& x) { return predict_linear(lin, x); }, test);
  }
  if (o.out.empty()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      std::cout << it.key() << " "
                << (it->is_number_float() ? io::format_double(it->get<double>()) : it->dump())
                << "\n";
  } else {
    io::save_json(o.out, j);
  }
  return 0;
}

struct GradOpts {
  int trials = 20;
  std::uint64_t seed = 1;
  bool multidim = false;
  std::string out;
};

int run_gradcheck(const GradOpts& o) {
  if (!o.out.empty()) io::check_writable(o.out);
  const verify::GradCheckResult r =
      o.multidim ? verify::gradcheck_multidim(o.trials, verify::MultiDimDims{}, o.seed)
                 : verify::gradcheck_attention(o.trials, verify::AttentionDims{}, o.seed);
  std::cout << "max_rel_err " << io::format_double(r.max_rel_err) << "\n"
            << "max_abs_err " << io::format_double(r.max_abs_err) << "\n";
  if (!o.out.empty()) io::save_json(o.out, io::to_json(r));
  if (r.max_rel_err > kGradTolerance) {
    std::cerr << "gradcheck: max_rel_err above " << kGradTolerance << "\n";
    return 2;
  }
  return 0;
}

struct ExperimentOpts {
  std::string config;
  std::string out;
  std::string trace_csv;
  std::optional<std::uint64_t> seed;
  std::optional<int> d, n, m;
  std::optional<double> gamma, sigma, eta;
  std::optional<long> steps;
};

int run_experiment_cmd(const ExperimentOpts& o) {
  ExperimentConfig c = o.config.empty() ? desk_config() : load_config(o.config);
  if (o.seed) c.bank.seed = c.data.seed = c.model.seed = c.diagnostics.seed = *o.seed;
  if (o.d) c.bank.d = c.bank.N = *o.d;
  if (o.n) c.data.n = *o.n;
  if (o.m) c.model.m = *o.m;
  if (o.gamma) c.bank.gamma = *o.gamma;
  if (o.sigma) c.data.sigma = *o.sigma;
  if (o.eta) c.train.eta = *o.eta;
  if (o.steps) c.train.T = *o.steps;
  if (!o.out.empty()) c.output.report = o.out;
  if (!o.trace_csv.empty()) c.output.trace_csv = o.trace_csv;
  check_output_paths(c);

  const Json report = run_experiment(c);
  if (!c.output.trace_csv.empty())
    io::write_text(c.output.trace_csv,
                   io::trace_csv(io::trace_from_json(Json{{"steps_taken", 0},
                                                          {"loss_increases", 0},
                                                          {"early_stopped", false},
                                                          {"initial_loss", 0.0},
                                                          {"final_loss", 0.0},
                                                          {"records", report.at("trace")}})));
  if (c.output.report.empty()) {
    std::cout << io::dump_json(report);
  } else {
    io::save_json(c.output.report, report);
    const Json& t = report.at("train");
    std::cout << "loss_ratio " << io::format_double(t.at("loss_ratio").get<double>()) << "\n"
              << "report " << c.output.report << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"asymlab: softmax attention vs. linear residual experiments"};
  app.require_subcommand(1);

  GenOpts gen;
  auto* g = app.add_subcommand("gen", "Generate a feature bank and a dataset");
  g->add_option("--d", gen.d, "Sequence length")->check(CLI::Range(2, 1 << 20));
  g->add_option("--N", gen.N, "State dimension (default d)");
  g->add_option("--gamma", gen.gamma, "Core/target correlation");
  g->add_option("--mode", gen.mode, "exact-norm | residual-mean");
  g->add_option("--n", gen.n, "Number of samples");
  g->add_option("--sigma", gen.sigma, "Label noise standard deviation");
  g->add_option("--seed", gen.seed, "Seed");
  g->add_option("--kind", gen.kind, "id | ood-sign-inconsistent");
  g->add_option("--max-rejects", gen.max_rejects, "Rejection cap per OOD sample");
  g->add_option("--out", gen.out, "Output JSON (stdout if omitted)");

  TrainOpts tr;
  auto* t = app.add_subcommand("train", "Train the attention model by gradient descent");
  t->add_option("--data", tr.data, "Dataset JSON from gen")->required();
  t->add_option("--m", tr.m, "Number of neurons");
  t->add_flag("--random-init", tr.random_init, "Independent Gaussian init instead of paired");
  t->add_option("--eta", tr.eta, "Step size");
  t->add_option("--steps", tr.steps, "Number of steps T");
  t->add_option("--log-every", tr.log_every, "Trace logging interval");
  t->add_flag("--track-kernel", tr.track_kernel, "Log kernel drift and lambda_min");
  t->add_option("--seed", tr.seed, "Initialization seed");
  t->add_option("--trace-csv", tr.trace_csv, "Write the trace as CSV");
  t->add_option("--out", tr.out, "Output JSON with params and trace");

  NtkOpts nk;
  auto* k = app.add_subcommand("ntk", "Compute the kernel matrix");
  k->add_option("--data", nk.data, "Dataset JSON")->required();
  k->add_option("--params", nk.params, "Params JSON (paired init if omitted)");
  k->add_option("--m", nk.m, "Neurons for the fresh init");
  k->add_option("--seed", nk.seed, "Seed for the fresh init");
  k->add_option("--out", nk.out, "Output kernel JSON");

  DiagnoseOpts dg;
  auto* dgc = app.add_subcommand("diagnose", "Sign alignment and residual attention gaps");
  dgc->add_option("--params", dg.params, "Params JSON")->required();
  dgc->add_option("--d", dg.d, "Sequence length");
  dgc->add_option("--sigma-prime", dg.sigma_prime, "Probe input scale");
  dgc->add_option("--n-mc", dg.n_mc, "Monte Carlo draws");
  dgc->add_flag("--all-neurons", dg.all_neurons, "Report every neuron, not only a_r < 0");
  dgc->add_option("--seed", dg.seed, "Monte Carlo seed");
  dgc->add_option("--out", dg.out, "Output JSON");

  OodOpts od;
  auto* o = app.add_subcommand("ood", "OOD risks on a sign-inconsistent test set");
  o->add_option("--data", od.data, "OOD dataset JSON from gen (with bank)")->required();
  o->add_option("--params", od.params, "Trained params JSON");
  o->add_option("--out", od.out, "Output JSON");

  GradOpts gr;
  auto* gc = app.add_subcommand("gradcheck", "Analytic vs finite-difference gradients");
  gc->add_option("--trials", gr.trials, "Random instances")->check(CLI::PositiveNumber);
  gc->add_option("--seed", gr.seed, "Seed");
  gc->add_flag("--multidim", gr.multidim, "Check the multi-dimensional attention gradient");
  gc->add_option("--out", gr.out, "Output JSON");

  ExperimentOpts ex;
  auto* e = app.add_subcommand("experiment", "Full pipeline from one config");
  e->add_option("--config", ex.config, "Config JSON (desk config if omitted)");
  e->add_option("--out", ex.out, "Report JSON");
  e->add_option("--trace-csv", ex.trace_csv, "Trace CSV");
  e->add_option("--seed", ex.seed, "Override every seed");
  e->add_option("--d", ex.d, "Override bank.d and bank.N");
  e->add_option("--n", ex.n, "Override data.n");
  e->add_option("--m", ex.m, "Override model.m");
  e->add_option("--gamma", ex.gamma, "Override bank.gamma");
  e->add_option("--sigma", ex.sigma, "Override data.sigma");
  e->add_option("--eta", ex.eta, "Override train.eta");
  e->add_option("--steps", ex.steps, "Override train.T");

  std::string report_in, report_out;
  auto* r = app.add_subcommand("report", "Render a report JSON into CSV plot tables");
  r->add_option("--in", report_in, "Report JSON")->required();
  r->add_option("--out", report_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*g) return run_gen(gen);
    if (*t) return run_train(tr);
    if (*k) return run_ntk(nk);
    if (*dgc) return run_diagnose(dg);
    if (*o) return run_ood(od);
    if (*gc) return run_gradcheck(gr);
    if (*e) return run_experiment_cmd(ex);
    if (*r) {
      render_report_tables(io::load_json(report_in), report_out);
      return 0;
    }
  } catch (const Error& err) {
    std::cerr << "error (" << to_string(err.kind()) << "): " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 1;
}
