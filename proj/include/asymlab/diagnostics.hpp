#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "asymlab/attention.hpp"
#include "asymlab/ssm_data.hpp"

namespace asymlab {

/// Sign agreement between hidden weights and output signs. A weight of
/// exactly zero counts as misaligned for either sign.
struct AlignmentReport {
  double frac_pos = 0.0;   // P[w_r > 0 | a_r = +1]
  double frac_neg = 0.0;   // P[w_r < 0 | a_r = -1]
  long pos_aligned = 0;    // a = +1, w > 0
  long pos_misaligned = 0; // a = +1, w <= 0
  long neg_aligned = 0;    // a = -1, w < 0
  long neg_misaligned = 0; // a = -1, w >= 0

  long total() const {
    return pos_aligned + pos_misaligned + neg_aligned + neg_misaligned;
  }
};

/// Incremental counterpart of sign_alignment for streamed weights.
class AlignmentCounter {
 public:
  void add(double a_r, double w_r);
  AlignmentReport report() const;

 private:
  AlignmentReport counts_;
};

AlignmentReport sign_alignment(const AttentionParams& params);

enum class GapScope { NegativeOutputOnly, AllNeurons };

/// Monte Carlo estimate for one (neuron, position) pair of
/// E[softmax_k(x_d w_r x)] - E[softmax_d(x_d w_r x)], x ~ N(0, sigma'^2 I_d).
/// k is 0-based and ranges over the non-final positions.
struct GapEntry {
  int r = 0;
  int k = 0;
  double gap = 0.0;
  double se = 0.0;
};

struct NeuronGap {
  int r = 0;
  double w = 0.0;
  double a = 0.0;
  Eigen::VectorXd mean_softmax;  // E[softmax_k], k = 0..d-1
  Eigen::VectorXd se_softmax;
  std::vector<GapEntry> gaps;
  double min_gap = 0.0;
};

struct AttentionGapReport {
  int d = 0;
  double sigma_prime = 1.0;
  long n_mc = 0;
  std::uint64_t seed = 0;
  std::vector<NeuronGap> neurons;

  /// All (r, k) entries in neuron order.
  std::vector<GapEntry> entries() const;
  /// Smallest gap over every reported (r, k).
  double min_gap() const;
};

/// Draws are shared across k within a neuron; neuron r uses substream r.
/// `positions` selects the k values (0-based, < d-1); empty means all.
AttentionGapReport residual_attention_gap(
    const AttentionParams& params, int d, const std::vector<int>& positions,
    double sigma_prime, long n_mc, std::uint64_t seed,
    GapScope scope = GapScope::NegativeOutputOnly);

using Predictor = std::function<double(const Eigen::VectorXd&)>;

/// Mean squared prediction error over the test set.
double ood_risk(const Predictor& predictor, const Dataset& testset);

/// Smallest per-sample variance of x about its own mean.
double v_min(const Dataset& data);

struct TheoryConstants {
  double B = 1.0;
  double D = 1.0;
  double v_min = 0.0;
  double lambda = 0.0;
};

/// B = max{sqrt((1 + sigma^2) ln(nN/delta)), 1},
/// D = max{sqrt(ln(m/delta)), 1}. Natural logarithm; delta in (0, 0.1).
/// v_min and lambda are left for the caller to fill.
TheoryConstants theory_constants(long n, long N, long m, double sigma,
                                 double delta);

/// The two formulas above in terms of their log arguments, nN/delta and
/// m/delta.
double bound_B(double ratio, double sigma);
double bound_D(double ratio);

}  // namespace asymlab
