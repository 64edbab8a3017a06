#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>

#include "asymlab/attention.hpp"
#include "asymlab/linear_baseline.hpp"
#include "asymlab/ntk.hpp"
#include "asymlab/ssm_data.hpp"
#include "asymlab/trainer.hpp"
#include "asymlab/verify.hpp"

namespace asymlab::io {

using Json = nlohmann::ordered_json;

/// Shortest-free decimal form with 17 significant digits; parses back to the
/// same bit pattern. Throws for NaN and infinities.
std::string format_double(double v);

/// Pretty-printed JSON; arrays of scalars stay on one line and every
/// floating-point number goes through format_double.
std::string dump_json(const Json& j);

Json load_json(const std::filesystem::path& path);
void save_json(const std::filesystem::path& path, const Json& j);
void write_text(const std::filesystem::path& path, const std::string& text);
/// Throws Error(Io) unless the file can be opened for writing.
void check_writable(const std::filesystem::path& path);

/// Field lookup that reports the dotted path of a missing or mistyped field.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {}

  bool has(const std::string& key) const;
  Reader child(const std::string& key) const;
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  long integer(const std::string& key) const;
  long integer_or(const std::string& key, long fallback) const;
  std::uint64_t seed(const std::string& key) const;
  bool boolean(const std::string& key) const;
  bool boolean_or(const std::string& key, bool fallback) const;
  std::string string(const std::string& key) const;
  std::string string_or(const std::string& key, const std::string& fallback) const;
  Eigen::VectorXd vector(const std::string& key) const;
  Eigen::MatrixXd matrix(const std::string& key) const;
  const Json& raw(const std::string& key) const;
  std::string where(const std::string& key) const;

 private:
  const Json& j_;
  std::string path_;
};

Json vector_json(const Eigen::VectorXd& v);
Json matrix_json(const Eigen::MatrixXd& m);

Json to_json(const FeatureBank& bank);
FeatureBank bank_from_json(const Json& j);

Json to_json(const Dataset& data);
Dataset dataset_from_json(const Json& j);
/// One row per sample: x_1..x_d,y.
std::string dataset_csv(const Dataset& data);

Json to_json(const AttentionParams& p);
AttentionParams params_from_json(const Json& j);

Json to_json(const LinearParams& p);
LinearParams linear_from_json(const Json& j);

/// {n, lambda_min, H, psi}
Json to_json(const KernelMatrix& k, double lambda_min);
KernelMatrix kernel_from_json(const Json& j);

Json to_json(const TraceRecord& r);
Json to_json(const TrainTrace& t);
TrainTrace trace_from_json(const Json& j);
/// Header step,loss,weight_drift,sign_agree_pos,sign_agree_neg,kernel_drift,
/// lambda_min; untracked cells are empty.
std::string trace_csv(const TrainTrace& t);
inline constexpr const char* kTraceCsvHeader =
    "step,loss,weight_drift,sign_agree_pos,sign_agree_neg,kernel_drift,"
    "lambda_min";

Json to_json(const verify::GradCheckResult& r);

}  // namespace asymlab::io
