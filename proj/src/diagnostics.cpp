#include "asymlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "asymlab/error.hpp"
#include "asymlab/parallel.hpp"
#include "asymlab/rng.hpp"

namespace asymlab {

void AlignmentCounter::add(double a_r, double w_r) {
  if (a_r > 0.0) {
    if (w_r > 0.0) ++counts_.pos_aligned; else ++counts_.pos_misaligned;
  } else {
    if (w_r < 0.0) ++counts_.neg_aligned; else ++counts_.neg_misaligned;
  }
}

AlignmentReport AlignmentCounter::report() const {
  AlignmentReport out = counts_;
  const long pos = out.pos_aligned + out.pos_misaligned;
  const long neg = out.neg_aligned + out.neg_misaligned;
  out.frac_pos = pos > 0 ? static_cast<double>(out.pos_aligned) / pos : 0.0;
  out.frac_neg = neg > 0 ? static_cast<double>(out.neg_aligned) / neg : 0.0;
  return out;
}

AlignmentReport sign_alignment(const AttentionParams& params) {
  params.validate();
  const auto pos = (params.a.array() > 0.0);
  const auto neg = !pos;
  AlignmentReport out;
  out.pos_aligned = (pos && params.w.array() > 0.0).count();
  out.pos_misaligned = (pos && params.w.array() <= 0.0).count();
  out.neg_aligned = (neg && params.w.array() < 0.0).count();
  out.neg_misaligned = (neg && params.w.array() >= 0.0).count();
  const long np = out.pos_aligned + out.pos_misaligned;
  const long nn = out.neg_aligned + out.neg_misaligned;
  out.frac_pos = np > 0 ? static_cast<double>(out.pos_aligned) / np : 0.0;
  out.frac_neg = nn > 0 ? static_cast<double>(out.neg_aligned) / nn : 0.0;
  return out;
}

std::vector<GapEntry> AttentionGapReport::entries() const {
  std::vector<GapEntry> all;
  for (const NeuronGap& ng : neurons)
    all.insert(all.end(), ng.gaps.begin(), ng.gaps.end());
  return all;
}

double AttentionGapReport::min_gap() const {
  double best = std::numeric_limits<double>::infinity();
  for (const NeuronGap& ng : neurons) best = std::min(best, ng.min_gap);
  return best;
}

AttentionGapReport residual_attention_gap(const AttentionParams& params, int d,
                                          const std::vector<int>& positions,
                                          double sigma_prime, long n_mc,
                                          std::uint64_t seed, GapScope scope) {
  params.validate();
  if (d < 2)
    throw Error(ErrorKind::InvalidArgument,
                "residual_attention_gap: d must be >= 2");
  if (n_mc < 100)
    throw Error(ErrorKind::InvalidArgument,
                "residual_attention_gap: n_mc must be >= 100");
  if (!(sigma_prime > 0.0) || !std::isfinite(sigma_prime))
    throw Error(ErrorKind::InvalidArgument,
                "residual_attention_gap: sigma_prime must be positive");
  std::vector<int> ks = positions;
  if (ks.empty())
    for (int k = 0; k + 1 < d; ++k) ks.push_back(k);
  for (int k : ks)
    if (k < 0 || k >= d - 1)
      throw Error(ErrorKind::InvalidArgument,
                  "residual_attention_gap: position " + std::to_string(k) +
                      " outside [0, d-2]");

  AttentionGapReport report;
  report.d = d;
  report.sigma_prime = sigma_prime;
  report.n_mc = n_mc;
  report.seed = seed;
  for (int r = 0; r < params.m(); ++r) {
    if (scope == GapScope::NegativeOutputOnly && params.a(r) > 0.0) continue;
    NeuronGap ng;
    ng.r = r;
    ng.w = params.w(r);
    ng.a = params.a(r);
    report.neurons.push_back(std::move(ng));
  }

  const auto last = static_cast<Eigen::Index>(d - 1);
  parallel_for(report.neurons.size(), 1, [&](std::size_t lo, std::size_t hi) {
    Eigen::VectorXd x(d);
    Eigen::VectorXd z(d);
    for (std::size_t idx = lo; idx < hi; ++idx) {
      NeuronGap& ng = report.neurons[idx];
      Rng rng(substream_seed(seed, stream::kGapDraws,
                             static_cast<std::uint64_t>(ng.r)));
      // Running sums of softmax_k and of (softmax_k - softmax_d), plus
      // squares, accumulated about shifted origins via Welford updates.
      Eigen::VectorXd mean_s = Eigen::VectorXd::Zero(d);
      Eigen::VectorXd m2_s = Eigen::VectorXd::Zero(d);
      const auto nk = static_cast<Eigen::Index>(ks.size());
      Eigen::VectorXd mean_g = Eigen::VectorXd::Zero(nk);
      Eigen::VectorXd m2_g = Eigen::VectorXd::Zero(nk);
      for (long t = 1; t <= n_mc; ++t) {
        for (Eigen::Index k = 0; k < d; ++k) x(k) = sigma_prime * rng.normal();
        z = (x(last) * ng.w) * x;
        const double top = z.maxCoeff();
        z = (z.array() - top).exp().matrix();
        z /= z.sum();
        const double inv_t = 1.0 / static_cast<double>(t);
        for (Eigen::Index k = 0; k < d; ++k) {
          const double delta = z(k) - mean_s(k);
          mean_s(k) += delta * inv_t;
          m2_s(k) += delta * (z(k) - mean_s(k));
        }
        for (Eigen::Index j = 0; j < nk; ++j) {
          const double g = z(ks[static_cast<std::size_t>(j)]) - z(last);
          const double delta = g - mean_g(j);
          mean_g(j) += delta * inv_t;
          m2_g(j) += delta * (g - mean_g(j));
        }
      }
      const double nd = static_cast<double>(n_mc);
      const auto se_of = [nd](double m2) {
        return std::sqrt(std::max(0.0, m2 / (nd - 1.0)) / nd);
      };
      ng.mean_softmax = mean_s;
      ng.se_softmax.resize(d);
      for (Eigen::Index k = 0; k < d; ++k) ng.se_softmax(k) = se_of(m2_s(k));
      ng.min_gap = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < nk; ++j) {
        GapEntry e;
        e.r = ng.r;
        e.k = ks[static_cast<std::size_t>(j)];
        e.gap = mean_g(j);
        e.se = se_of(m2_g(j));
        ng.gaps.push_back(e);
        ng.min_gap = std::min(ng.min_gap, e.gap);
      }
    }
  });
  return report;
}

double ood_risk(const Predictor& predictor, const Dataset& testset) {
  if (testset.empty())
    throw Error(ErrorKind::InvalidArgument, "ood_risk: empty test set");
  double total = 0.0;
  for (const Sample& s : testset.samples) {
    const double e = predictor(s.x) - s.y;
    total += e * e;
  }
  return total / static_cast<double>(testset.size());
}

double v_min(const Dataset& data) {
  if (data.empty())
    throw Error(ErrorKind::InvalidArgument, "v_min: empty dataset");
  double best = std::numeric_limits<double>::infinity();
  for (const Sample& s : data.samples) {
    const double mean = s.x.mean();
    const double var = (s.x.array() - mean).square().mean();
    best = std::min(best, var);
  }
  return best;
}

TheoryConstants theory_constants(long n, long N, long m, double sigma,
                                 double delta) {
  if (!(delta > 0.0 && delta < 0.1))
    throw Error(ErrorKind::InvalidArgument,
                "theory_constants: delta must lie in (0, 0.1)");
  if (n < 1 || N < 1 || m < 1)
    throw Error(ErrorKind::InvalidArgument,
                "theory_constants: n, N and m must be positive");
  TheoryConstants c;
  const double nn = static_cast<double>(n) * static_cast<double>(N);
  c.B = bound_B(nn / delta, sigma);
  c.D = bound_D(static_cast<double>(m) / delta);
  return c;
}

double bound_B(double ratio, double sigma) {
  const double b2 = (1.0 + sigma * sigma) * std::log(ratio);
  return std::max(std::sqrt(std::max(0.0, b2)), 1.0);
}

double bound_D(double ratio) {
  return std::max(std::sqrt(std::max(0.0, std::log(ratio))), 1.0);
}

}  // namespace asymlab
