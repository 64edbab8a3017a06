#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace asymlab {

/// Linear state space model h_{k+1} = A h_k + B u_k, u_{k+1} = C^T h_{k+1},
/// with scalar input/output and N-dimensional state.
struct SsmSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd B;
  Eigen::VectorXd C;

  int state_dim() const { return static_cast<int>(A.rows()); }
  /// Throws DimensionMismatch / InvalidArgument when malformed.
  void validate() const;
};

/// Random stable system: A is an orthogonal matrix scaled by 0.9, B and C
/// are Gaussian with variance 1/N.
SsmSystem random_system(int state_dim, std::uint64_t seed);

/// Features P_1..P_{d+1} (returned 0-based: result[k-1] = P_k) such that
/// u_k = <P_k, h_1> for every initial state h_1.
std::vector<Eigen::VectorXd> ssm_features(const SsmSystem& sys, int d);

/// Direct recurrence; returns u_1..u_{d+1}.
Eigen::VectorXd run_ssm(const SsmSystem& sys, const Eigen::VectorXd& h1,
                        int d);

enum class BankMode { ExactNorm, ResidualMean, FromSsm };

std::string to_string(BankMode mode);
BankMode bank_mode_from_string(const std::string& name);

/// Feature bank of a residual SSM. Features are stored 0-based, so the core
/// feature P_d is features[d-1] and the prediction target P_{d+1} is
/// features[d]; the background set is features[0 .. d-2].
struct FeatureBank {
  int d = 0;
  int N = 0;
  double gamma = 0.0;
  BankMode mode = BankMode::ExactNorm;
  std::uint64_t seed = 0;
  std::vector<Eigen::VectorXd> features;
  /// Coefficients c_k of the target on the background features (exact-norm
  /// mode only; empty otherwise).
  Eigen::VectorXd background_coeffs;

  int core_index() const { return d - 1; }
  int target_index() const { return d; }
  std::vector<int> background_indices() const;
  const Eigen::VectorXd& core() const { return features.at(d - 1); }
  const Eigen::VectorXd& target() const { return features.at(d); }

  /// Distance of P_{d+1} - P_d from span{P_k - P_d : k background}.
  double span_residual() const;
};

/// Builds a bank in the requested mode, deterministic in its arguments.
///  - ExactNorm: unit-norm features, <P_d, P_{d+1}> = gamma, core orthogonal
///    to backgrounds and P_{d+1} - P_d in the background-difference span.
///    Requires d >= 3 (d = 2 only for gamma = 0) and N >= d.
///  - ResidualMean: P_{d+1} = ((d-1)/d) P_d + (1/d) mean(backgrounds); gamma
///    is ignored and the implied value (d-1)/d is stored. Requires d >= 2.
///  - FromSsm: features of a random_system(N, seed); gamma stores the
///    observed cosine between P_d and P_{d+1}. No property guarantees.
/// N = 0 selects N = d.
FeatureBank build_feature_bank(int d, double gamma, BankMode mode,
                               std::uint64_t seed, int N = 0);

/// Bank from explicit system features (mode FromSsm).
FeatureBank bank_from_system(const SsmSystem& sys, int d, std::uint64_t seed);

struct Sample {
  Eigen::VectorXd x;  // length d
  double y = 0.0;
  // Latents; empty when not retained.
  Eigen::VectorXd h1;  // length N
  Eigen::VectorXd u;   // length d+1
  Eigen::VectorXd xi;  // length d+1

  bool has_latents() const { return u.size() > 0; }
};

enum class DatasetKind { InDistribution, OodSignInconsistent };

std::string to_string(DatasetKind kind);
DatasetKind dataset_kind_from_string(const std::string& name);

struct Dataset {
  DatasetKind kind = DatasetKind::InDistribution;
  int d = 0;
  int N = 0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  double gamma = 0.0;
  std::vector<Sample> samples;
  /// Accepted / attempted draws (OOD datasets only).
  std::optional<double> acceptance_rate;
  std::optional<std::int64_t> attempts;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

/// Throws if any sample has the wrong length or non-finite entries.
void validate_dataset(const Dataset& data);

/// x_k = <P_k, h> + xi_k, y = <P_{d+1}, h> + xi_{d+1} with h ~ N(0, I_N) and
/// xi ~ N(0, sigma^2 I_{d+1}). Sample i draws from its own substream.
Dataset generate_id(const FeatureBank& bank, int n, double sigma,
                    std::uint64_t seed);

inline constexpr std::int64_t kDefaultMaxRejects = 1'000'000;

/// Sign-inconsistent test set: h is redrawn until u_d * u_{d+1} < 0, then
/// noise is added. More than max_rejects consecutive rejections for one
/// sample raises Error(RejectionLimit).
Dataset generate_ood_sign_inconsistent(
    const FeatureBank& bank, int n_test, double sigma, std::uint64_t seed,
    std::int64_t max_rejects = kDefaultMaxRejects);

}  // namespace asymlab
