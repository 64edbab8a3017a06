#include "asymlab/trainer.hpp"

#include <cmath>
#include <string>

#include "asymlab/diagnostics.hpp"
#include "asymlab/ntk.hpp"

namespace asymlab {

void TrainConfig::validate() const {
  if (!(std::isfinite(eta) && eta >= 0.0))
    throw Error(ErrorKind::InvalidArgument,
                "TrainConfig: eta must be finite and non-negative");
  if (steps < 0)
    throw Error(ErrorKind::InvalidArgument, "TrainConfig: steps must be >= 0");
  if (log_every < 1)
    throw Error(ErrorKind::InvalidArgument,
                "TrainConfig: log_every must be >= 1");
  if (kernel_every_logs < 1)
    throw Error(ErrorKind::InvalidArgument,
                "TrainConfig: kernel_every_logs must be >= 1");
}

double weight_drift(const AttentionParams& current,
                    const AttentionParams& initial) {
  if (current.w.size() != initial.w.size())
    throw Error(ErrorKind::DimensionMismatch,
                "weight_drift: m differs (" + std::to_string(current.m()) +
                    " vs " + std::to_string(initial.m()) + ")");
  if (current.w.size() == 0) return 0.0;
  return (current.w - initial.w).cwiseAbs().maxCoeff();
}

TrainResult train(const AttentionParams& params, const Dataset& data,
                  const TrainConfig& config) {
  params.validate();
  config.validate();
  if (data.empty())
    throw Error(ErrorKind::InvalidArgument, "train: dataset is empty");

  TrainResult result{params, {}};
  AttentionParams& cur = result.params;
  TrainTrace& trace = result.trace;
  const long kernel_period = config.log_every * config.kernel_every_logs;

  std::optional<KernelMatrix> k0;
  double running_drift = 0.0;
  double prev_loss = 0.0;

  for (long t = 0;; ++t) {
    LossAndGrad lg = loss_and_grad(cur, data);
    if (!std::isfinite(lg.loss) || lg.loss > kDivergenceLoss) {
      TraceRecord bad;
      bad.step = t;
      bad.loss = lg.loss;
      bad.weight_drift = std::max(running_drift, weight_drift(cur, params));
      trace.records.push_back(bad);
      trace.steps_taken = t;
      throw DivergedError("train: loss diverged at step " + std::to_string(t) +
                              " (" + std::to_string(lg.loss) + ")",
                          trace);
    }
    if (t == 0) trace.initial_loss = lg.loss;
    if (t > 0 && lg.loss > prev_loss) ++trace.loss_increases;
    prev_loss = lg.loss;
    running_drift = std::max(running_drift, weight_drift(cur, params));

    const bool target_hit =
        config.epsilon_target.has_value() && lg.loss <= *config.epsilon_target;
    const bool last = t == config.steps || target_hit;

    if (t % config.log_every == 0 || last) {
      TraceRecord rec;
      rec.step = t;
      rec.loss = lg.loss;
      rec.weight_drift = running_drift;
      const AlignmentReport al = sign_alignment(cur);
      rec.sign_agree_pos = al.frac_pos;
      rec.sign_agree_neg = al.frac_neg;
      if (config.track_kernel && (t % kernel_period == 0 || last)) {
        KernelMatrix k = kernel_from_moments(data, lg.moments);
        if (!k0) {
          k0 = k;
          trace.initial_lambda_min = min_eigenvalue(k);
        }
        rec.kernel_drift = kernel_drift(k, *k0);
        rec.lambda_min = t == 0 ? *trace.initial_lambda_min : min_eigenvalue(k);
      }
      trace.records.push_back(rec);
    }

    if (last) {
      trace.final_loss = lg.loss;
      trace.early_stopped = target_hit && t < config.steps;
      break;
    }
    cur.w -= config.eta * lg.grad;
    ++trace.steps_taken;
  }
  return result;
}

}  // namespace asymlab
