#include "asymlab/experiment.hpp"

#include <cmath>
#include <fstream>

#include "asymlab/attention.hpp"
#include "asymlab/diagnostics.hpp"
#include "asymlab/error.hpp"
#include "asymlab/linear_baseline.hpp"
#include "asymlab/ntk.hpp"
#include "asymlab/trainer.hpp"

namespace asymlab {

using io::Json;
using io::Reader;

ExperimentConfig desk_config(std::uint64_t seed) {
  ExperimentConfig c;
  c.bank.seed = seed;
  c.data.seed = seed;
  c.model.seed = seed;
  c.diagnostics.seed = seed;
  return c;
}

ExperimentConfig config_from_json(const Json& j) {
  const Reader root(j, "");
  ExperimentConfig c;

  const Reader bank = root.child("bank");
  c.bank.d = static_cast<int>(bank.integer("d"));
  c.bank.N = static_cast<int>(bank.integer_or("N", c.bank.d));
  c.bank.gamma = bank.number("gamma");
  c.bank.mode = bank_mode_from_string(bank.string_or("mode", "exact-norm"));
  c.bank.seed = bank.seed("seed");

  const Reader data = root.child("data");
  c.data.n = static_cast<int>(data.integer("n"));
  c.data.n_test = static_cast<int>(data.integer("n_test"));
  c.data.sigma = data.number("sigma");
  c.data.seed = data.seed("seed");
  c.data.max_rejects = data.integer_or("max_rejects", kDefaultMaxRejects);

  const Reader model = root.child("model");
  c.model.m = static_cast<int>(model.integer("m"));
  c.model.zero_init = model.boolean("zero_init");
  c.model.seed = model.seed("seed");

  const Reader train = root.child("train");
  c.train.eta = train.number("eta");
  c.train.T = train.integer("T");
  c.train.log_every = train.integer("log_every");
  c.train.track_kernel = train.boolean("track_kernel");

  const Reader diag = root.child("diagnostics");
  c.diagnostics.delta = diag.number("delta");
  c.diagnostics.sigma_prime = diag.number("sigma_prime");
  c.diagnostics.n_mc = diag.integer("n_mc");
  c.diagnostics.seed = diag.seed("seed");
  c.diagnostics.ridge = diag.number_or("ridge", 0.0);
  c.diagnostics.all_neurons = diag.boolean_or("all_neurons", false);

  if (root.has("output")) {
    const Reader out = root.child("output");
    c.output.report = out.string_or("report", "");
    c.output.trace_csv = out.string_or("trace_csv", "");
  }
  return c;
}

Json to_json(const ExperimentConfig& c) {
  Json j;
  j["bank"] = {{"d", c.bank.d},
               {"N", c.bank.N},
               {"gamma", c.bank.gamma},
               {"mode", to_string(c.bank.mode)},
               {"seed", c.bank.seed}};
  j["data"] = {{"n", c.data.n},
               {"n_test", c.data.n_test},
               {"sigma", c.data.sigma},
               {"seed", c.data.seed},
               {"max_rejects", c.data.max_rejects}};
  j["model"] = {{"m", c.model.m},
                {"zero_init", c.model.zero_init},
                {"seed", c.model.seed}};
  j["train"] = {{"eta", c.train.eta},
                {"T", c.train.T},
                {"log_every", c.train.log_every},
                {"track_kernel", c.train.track_kernel}};
  j["diagnostics"] = {{"delta", c.diagnostics.delta},
                      {"sigma_prime", c.diagnostics.sigma_prime},
                      {"n_mc", c.diagnostics.n_mc},
                      {"seed", c.diagnostics.seed},
                      {"ridge", c.diagnostics.ridge},
                      {"all_neurons", c.diagnostics.all_neurons}};
  j["output"] = {{"report", c.output.report},
                 {"trace_csv", c.output.trace_csv}};
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return config_from_json(io::load_json(path));
}

void check_output_paths(const ExperimentConfig& c) {
  if (!c.output.report.empty()) io::check_writable(c.output.report);
  if (!c.output.trace_csv.empty()) io::check_writable(c.output.trace_csv);
}

namespace {

Json gap_json(const AttentionGapReport& gaps) {
  Json arr = Json::array();
  for (const GapEntry& e : gaps.entries())
    arr.push_back({{"r", e.r}, {"k", e.k}, {"gap", e.gap}, {"se", e.se}});
  return arr;
}

bool neuron_passes(const NeuronGap& ng) {
  for (const GapEntry& e : ng.gaps)
    if (e.gap - kGapConfidenceZ * e.se < 0.0) return false;
  return true;
}

}  // namespace

Json run_experiment(const ExperimentConfig& c) {
  const FeatureBank bank = build_feature_bank(c.bank.d, c.bank.gamma,
                                              c.bank.mode, c.bank.seed, c.bank.N);
  const Dataset train_set = generate_id(bank, c.data.n, c.data.sigma, c.data.seed);
  const Dataset test_set = generate_ood_sign_inconsistent(
      bank, c.data.n_test, c.data.sigma, c.data.seed, c.data.max_rejects);

  const AttentionParams init = init_params(c.model.m, c.model.seed, c.model.zero_init);
  TrainConfig tc;
  tc.eta = c.train.eta;
  tc.steps = c.train.T;
  tc.log_every = c.train.log_every;
  tc.track_kernel = c.train.track_kernel;
  tc.seed = c.model.seed;
  const TrainResult trained = train(init, train_set, tc);
  const TrainTrace& trace = trained.trace;

  Json report;
  report["config"] = to_json(c);

  report["bank"] = {{"d", bank.d},
                    {"N", bank.N},
                    {"gamma", bank.gamma},
                    {"mode", to_string(bank.mode)},
                    {"span_residual", bank.span_residual()}};

  const double ratio = trace.initial_loss > 0.0 ? trace.final_loss / trace.initial_loss : 0.0;
  const double steps = static_cast<double>(std::max<long>(1, trace.steps_taken));
  report["train"] = {
      {"initial_loss", trace.initial_loss},
      {"final_loss", trace.final_loss},
      {"loss_ratio", ratio},
      {"steps", trace.steps_taken},
      {"loss_increases", trace.loss_increases},
      {"nonincreasing_fraction", 1.0 - static_cast<double>(trace.loss_increases) / steps},
      {"final_weight_drift", trace.records.empty() ? 0.0 : trace.records.back().weight_drift}};
  report["trace"] = io::to_json(trace)["records"];

  const AlignmentReport al = sign_alignment(trained.params);
  report["alignment"] = {{"frac_pos", al.frac_pos},
                         {"frac_neg", al.frac_neg},
                         {"pos_aligned", al.pos_aligned},
                         {"pos_misaligned", al.pos_misaligned},
                         {"neg_aligned", al.neg_aligned},
                         {"neg_misaligned", al.neg_misaligned}};

  const AttentionGapReport gaps = residual_attention_gap(
      trained.params, bank.d, {}, c.diagnostics.sigma_prime, c.diagnostics.n_mc,
      c.diagnostics.seed,
      c.diagnostics.all_neurons ? GapScope::AllNeurons : GapScope::NegativeOutputOnly);
  long passing = 0;
  long negative_neurons = 0;
  long negative_passing = 0;
  for (const NeuronGap& ng : gaps.neurons) {
    const bool ok = neuron_passes(ng);
    passing += ok ? 1 : 0;
    if (ng.a < 0.0) {
      ++negative_neurons;
      negative_passing += ok ? 1 : 0;
    }
  }
  report["gap_summary"] = {
      {"neurons", static_cast<long>(gaps.neurons.size())},
      {"n_mc", gaps.n_mc},
      {"sigma_prime", gaps.sigma_prime},
      {"z", kGapConfidenceZ},
      {"min_gap", gaps.neurons.empty() ? 0.0 : gaps.min_gap()},
      {"passing", passing},
      {"frac_negative_neurons_passing",
       negative_neurons > 0 ? static_cast<double>(negative_passing) / negative_neurons : 0.0}};
  report["gaps"] = gap_json(gaps);

  const KernelMatrix k0 = kernel(init, train_set);
  const KernelMatrix kt = kernel(trained.params, train_set);
  const double lambda0 = min_eigenvalue(k0);
  const double lambdat = min_eigenvalue(kt);
  bool half_held = true;
  for (const TraceRecord& rec : trace.records)
    if (rec.lambda_min && *rec.lambda_min < 0.5 * lambda0) half_held = false;
  report["kernel"] = {{"lambda_min_initial", lambda0},
                      {"lambda_min_final", lambdat},
                      {"final_drift", kernel_drift(kt, k0)},
                      {"lambda_half_held", half_held}};

  Json ood;
  ood["n_test"] = c.data.n_test;
  ood["acceptance_rate"] = test_set.acceptance_rate.value_or(0.0);
  const AttentionParams& tp = trained.params;
  ood["risk_attn"] = ood_risk([&](const Eigen::VectorXd& x) { return forward(tp, x); }, test_set);
  try {
    const LinearParams pop = solve_linear_population(bank);
    ood["risk_lin"] = ood_risk([&](const Eigen::VectorXd& x) { return predict_linear(pop, x); }, test_set);
    ood["w_lin_population"] = io::vector_json(pop.w_lin);
  } catch (const InfeasibleError& e) {
    ood["risk_lin"] = nullptr;
    ood["population_residual"] = e.residual();
  }
  const LinearParams emp = fit_linear_empirical(train_set, c.diagnostics.ridge);
  ood["risk_lin_empirical"] =
      ood_risk([&](const Eigen::VectorXd& x) { return predict_linear(emp, x); }, test_set);
  ood["risk_persistence"] =
      ood_risk([](const Eigen::VectorXd& x) { return x(x.size() - 1); }, test_set);
  ood["risk_zero"] = ood_risk([](const Eigen::VectorXd&) { return 0.0; }, test_set);
  report["ood"] = ood;

  TheoryConstants tcst = theory_constants(c.data.n, bank.N, c.model.m,
                                          c.data.sigma, c.diagnostics.delta);
  tcst.v_min = v_min(train_set);
  tcst.lambda = lambda0;
  report["constants"] = {{"B", tcst.B},
                         {"D", tcst.D},
                         {"v_min", tcst.v_min},
                         {"lambda", tcst.lambda},
                         {"delta", c.diagnostics.delta}};
  return report;
}

void render_report_tables(const Json& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const Reader root(report, "");

  io::write_text(dir / "trace.csv",
                 io::trace_csv(io::trace_from_json(Json{{"steps_taken", 0},
                                                        {"loss_increases", 0},
                                                        {"early_stopped", false},
                                                        {"initial_loss", 0.0},
                                                        {"final_loss", 0.0},
                                                        {"records", root.raw("trace")}})));

  std::string gaps = "r,k,gap,se\n";
  for (const Json& e : root.raw("gaps")) {
    const Reader g(e, "gaps[]");
    gaps += std::to_string(g.integer("r")) + "," + std::to_string(g.integer("k")) + "," +
            io::format_double(g.number("gap")) + "," + io::format_double(g.number("se")) + "\n";
  }
  io::write_text(dir / "gaps.csv", gaps);

  const Reader al = root.child("alignment");
  io::write_text(dir / "alignment.csv",
                 "frac_pos,frac_neg\n" + io::format_double(al.number("frac_pos")) + "," +
                     io::format_double(al.number("frac_neg")) + "\n");

  const Reader ood = root.child("ood");
  const auto cell = [&](const char* key) {
    return ood.has(key) && ood.raw(key).is_number() ? io::format_double(ood.number(key))
                                                      : std::string();
  };
  io::write_text(dir / "ood.csv", "risk_attn,risk_lin,risk_lin_empirical\n" +
                                      cell("risk_attn") + "," + cell("risk_lin") + "," +
                                      cell("risk_lin_empirical") + "\n");

  const Reader cs = root.child("constants");
  io::write_text(dir / "constants.csv",
                 "B,D,v_min,lambda\n" + io::format_double(cs.number("B")) + "," +
                     io::format_double(cs.number("D")) + "," +
                     io::format_double(cs.number("v_min")) + "," +
                     io::format_double(cs.number("lambda")) + "\n");
}

}  // namespace asymlab
