#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "asymlab/io.hpp"
#include "asymlab/ssm_data.hpp"

namespace asymlab {

struct ExperimentConfig {
  struct Bank {
    int d = 8;
    int N = 8;
    double gamma = 0.8;
    BankMode mode = BankMode::ExactNorm;
    std::uint64_t seed = 1;
  } bank;
  struct Data {
    int n = 32;
    int n_test = 2000;
    double sigma = 0.01;
    std::uint64_t seed = 1;
    std::int64_t max_rejects = kDefaultMaxRejects;
  } data;
  struct Model {
    int m = 512;
    bool zero_init = true;
    std::uint64_t seed = 1;
  } model;
  struct Train {
    double eta = 0.05;
    long T = 5000;
    long log_every = 50;
    bool track_kernel = true;
  } train;
  struct Diagnostics {
    double delta = 0.05;
    double sigma_prime = 1.0;
    long n_mc = 10000;
    std::uint64_t seed = 1;
    double ridge = 0.0;
    bool all_neurons = false;
  } diagnostics;
  struct Output {
    std::string report;
    std::string trace_csv;
  } output;
};

/// The shipped desk-scale configuration with every seed set to `seed`.
ExperimentConfig desk_config(std::uint64_t seed = 1);

ExperimentConfig config_from_json(const io::Json& j);
io::Json to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::filesystem::path& path);
void check_output_paths(const ExperimentConfig& c);

/// z-value for the "gap >= 0 at 95% confidence" test: a neuron passes when
/// gap - z * se >= 0 for every reported position.
inline constexpr double kGapConfidenceZ = 1.96;

/// Runs bank -> data -> init -> train -> kernel -> diagnostics -> OOD and
/// returns the report. Pure in the config: identical config, identical
/// report.
io::Json run_experiment(const ExperimentConfig& c);

/// Writes trace.csv, gaps.csv, alignment.csv, ood.csv and constants.csv
/// from a report into `dir`.
void render_report_tables(const io::Json& report,
                          const std::filesystem::path& dir);

}  // namespace asymlab
