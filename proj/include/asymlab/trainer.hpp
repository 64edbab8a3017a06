#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "asymlab/attention.hpp"
#include "asymlab/error.hpp"
#include "asymlab/ssm_data.hpp"

namespace asymlab {

struct TrainConfig {
  double eta = 0.05;
  long steps = 0;  // T
  long log_every = 1;
  std::optional<double> epsilon_target;
  bool track_kernel = false;
  /// Kernel is logged every log_every * kernel_every_logs steps.
  long kernel_every_logs = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TraceRecord {
  long step = 0;
  double loss = 0.0;
  double weight_drift = 0.0;  // running max over steps so far
  double sign_agree_pos = 0.0;
  double sign_agree_neg = 0.0;
  std::optional<double> kernel_drift;
  std::optional<double> lambda_min;
};

struct TrainTrace {
  std::vector<TraceRecord> records;
  long steps_taken = 0;
  /// Number of steps t with L(t+1) > L(t).
  long loss_increases = 0;
  bool early_stopped = false;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::optional<double> initial_lambda_min;
};

struct TrainResult {
  AttentionParams params;
  TrainTrace trace;
};

/// Raised when the loss becomes non-finite or exceeds the divergence limit.
class DivergedError : public Error {
 public:
  DivergedError(const std::string& what, TrainTrace trace)
      : Error(ErrorKind::Diverged, what), trace_(std::move(trace)) {}

  const TrainTrace& trace() const noexcept { return trace_; }

 private:
  TrainTrace trace_;
};

inline constexpr double kDivergenceLoss = 1e12;

/// max_r |w_r - w0_r|.
double weight_drift(const AttentionParams& current,
                    const AttentionParams& initial);

/// Full-batch gradient descent w <- w - eta * grad L(w). Output signs are
/// never touched. Records step 0, every log_every-th step and the last step.
TrainResult train(const AttentionParams& params, const Dataset& data,
                  const TrainConfig& config);

}  // namespace asymlab
