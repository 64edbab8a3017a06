#include "asymlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "asymlab/error.hpp"
#include "asymlab/multidim_attn.hpp"
#include "asymlab/rng.hpp"

namespace asymlab::verify {

namespace {

double clipped_normal(Rng& rng, double stddev, double bound) {
  return std::clamp(stddev * rng.normal(), -bound, bound);
}

// Softmax of x_d * w * x in long double; returns (<S, x>, <S, x^2>).
std::pair<long double, long double> oracle_moments(const Eigen::VectorXd& x,
                                                   double w) {
  const auto d = x.size();
  const long double xd = x(d - 1);
  std::vector<long double> z(static_cast<std::size_t>(d));
  long double top = -std::numeric_limits<long double>::infinity();
  for (Eigen::Index k = 0; k < d; ++k) {
    z[k] = xd * static_cast<long double>(w) * static_cast<long double>(x(k));
    top = std::max(top, z[k]);
  }
  long double total = 0.0L;
  for (auto& v : z) {
    v = std::exp(v - top);
    total += v;
  }
  long double first = 0.0L;
  long double second = 0.0L;
  for (Eigen::Index k = d - 1; k >= 0; --k) {
    const long double s = z[k] / total;
    first += s * x(k);
    second += s * x(k) * x(k);
  }
  return {first, second};
}

}  // namespace

double rel_err(double a, double b) {
  const double denom = std::max({std::abs(a), std::abs(b), kRelErrFloor});
  return std::abs(a - b) / denom;
}

Eigen::VectorXd finite_diff_grad(const ScalarFn& f, const Eigen::VectorXd& at,
                                 double h) {
  if (!(h > 0.0))
    throw Error(ErrorKind::InvalidArgument, "finite_diff_grad: h must be > 0");
  Eigen::VectorXd g(at.size());
  Eigen::VectorXd probe = at;
  for (Eigen::Index j = 0; j < at.size(); ++j) {
    const double plus = at(j) + h;
    const double minus = at(j) - h;
    probe(j) = plus;
    const long double fp = f(probe);
    probe(j) = minus;
    const long double fm = f(probe);
    probe(j) = at(j);
    if (!std::isfinite(static_cast<double>(fp)) ||
        !std::isfinite(static_cast<double>(fm)))
      throw Error(ErrorKind::Numerical,
                  "finite_diff_grad: non-finite value at coordinate " +
                      std::to_string(j));
    g(j) = static_cast<double>((fp - fm) / static_cast<long double>(plus - minus));
  }
  return g;
}

void accumulate(GradCheckResult& acc, const Eigen::VectorXd& analytic,
                const Eigen::VectorXd& numeric, long index_offset) {
  if (analytic.size() != numeric.size())
    throw Error(ErrorKind::DimensionMismatch, "gradcheck: size mismatch");
  for (Eigen::Index j = 0; j < analytic.size(); ++j) {
    const double abs_err = std::abs(analytic(j) - numeric(j));
    const double rel = rel_err(analytic(j), numeric(j));
    acc.max_abs_err = std::max(acc.max_abs_err, abs_err);
    if (rel > acc.max_rel_err || acc.argmax < 0) {
      acc.max_rel_err = rel;
      acc.argmax = index_offset + j;
    }
  }
}

long double attention_loss_oracle(const Eigen::VectorXd& w,
                                  const Eigen::VectorXd& a,
                                  const Dataset& data) {
  const long double norm = std::sqrt(static_cast<long double>(w.size()));
  long double total = 0.0L;
  for (auto it = data.samples.rbegin(); it != data.samples.rend(); ++it) {
    long double f = 0.0L;
    for (Eigen::Index r = w.size() - 1; r >= 0; --r)
      f += a(r) * oracle_moments(it->x, w(r)).first;
    const long double res = f / norm - it->y;
    total += 0.5L * res * res;
  }
  return total;
}

long double multidim_loss_oracle(const Eigen::MatrixXd& X,
                                 const Eigen::VectorXd& w_flat,
                                 const Eigen::MatrixXd& W_V,
                                 const Eigen::MatrixXd& G) {
  const auto L = X.rows();
  const auto d = X.cols();
  // Scores z_ij = sum_{a,b} X_ia W_ab X_jb, W column-major in w_flat.
  long double total = 0.0L;
  std::vector<long double> z(static_cast<std::size_t>(L));
  for (Eigen::Index i = 0; i < L; ++i) {
    long double top = -std::numeric_limits<long double>::infinity();
    for (Eigen::Index j = 0; j < L; ++j) {
      long double acc = 0.0L;
      for (Eigen::Index b = 0; b < d; ++b)
        for (Eigen::Index a = 0; a < d; ++a)
          acc += static_cast<long double>(X(i, a)) * w_flat(b * d + a) * X(j, b);
      z[j] = acc;
      top = std::max(top, acc);
    }
    long double denom = 0.0L;
    for (auto& v : z) {
      v = std::exp(v - top);
      denom += v;
    }
    // Row i of S X W_V dotted with G_i.
    for (Eigen::Index c = 0; c < d; ++c) {
      long double out = 0.0L;
      for (Eigen::Index j = 0; j < L; ++j) {
        long double xv = 0.0L;
        for (Eigen::Index e = 0; e < d; ++e)
          xv += static_cast<long double>(X(j, e)) * W_V(e, c);
        out += z[j] / denom * xv;
      }
      total += out * G(i, c);
    }
  }
  return total;
}

GradCheckResult gradcheck_attention(int trials, const AttentionDims& dims,
                                    std::uint64_t seed, double h) {
  if (trials < 1)
    throw Error(ErrorKind::InvalidArgument, "gradcheck: trials must be >= 1");
  GradCheckResult acc;
  acc.h = h;
  acc.trials = trials;
  acc.seed = seed;
  long offset = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(substream_seed(seed, stream::kGradCheck, static_cast<std::uint64_t>(t)));
    const int n = rng.uniform_int(1, dims.max_n);
    const int d = rng.uniform_int(std::min(2, dims.max_d), dims.max_d);
    const int m = rng.uniform_int(1, dims.max_m);
    Dataset data;
    data.d = d;
    data.N = d;
    data.samples.resize(static_cast<std::size_t>(n));
    for (Sample& s : data.samples) {
      s.x.resize(d);
      for (int k = 0; k < d; ++k) s.x(k) = clipped_normal(rng, 1.0, 5.0);
      s.y = clipped_normal(rng, 1.0, 5.0);
    }
    AttentionParams p;
    p.w.resize(m);
    p.a.resize(m);
    for (int r = 0; r < m; ++r) p.w(r) = clipped_normal(rng, 1.0, 3.0);
    for (int r = 0; r < m; ++r) p.a(r) = rng.rademacher();

    const Eigen::VectorXd analytic = grad_w(p, data);
    const Eigen::VectorXd numeric = finite_diff_grad(
        [&](const Eigen::VectorXd& w) { return attention_loss_oracle(w, p.a, data); },
        p.w, h);
    accumulate(acc, analytic, numeric, offset);
    offset += m;
  }
  return acc;
}

GradCheckResult gradcheck_multidim(int trials, const MultiDimDims& dims,
                                   std::uint64_t seed, double h) {
  if (trials < 1)
    throw Error(ErrorKind::InvalidArgument, "gradcheck: trials must be >= 1");
  GradCheckResult acc;
  acc.h = h;
  acc.trials = trials;
  acc.seed = seed;
  long offset = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(substream_seed(seed ^ 0x6D756C7469ULL, stream::kGradCheck,
                           static_cast<std::uint64_t>(t)));
    const int L = rng.uniform_int(1, dims.max_L);
    const int d = rng.uniform_int(1, dims.max_d);
    const double wscale = 1.0 / std::sqrt(static_cast<double>(d));
    Eigen::MatrixXd X(L, d), G(L, d), W(d, d), W_V(d, d);
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index i = 0; i < L; ++i) X(i, j) = clipped_normal(rng, 1.0, 5.0);
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index i = 0; i < L; ++i) G(i, j) = clipped_normal(rng, 1.0, 5.0);
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index i = 0; i < d; ++i) W(i, j) = clipped_normal(rng, wscale, 3.0);
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index i = 0; i < d; ++i) W_V(i, j) = clipped_normal(rng, wscale, 3.0);

    const Eigen::MatrixXd analytic = attn_grad_W(X, W, W_V, G);
    const Eigen::VectorXd flat = W.reshaped();
    const Eigen::VectorXd numeric = finite_diff_grad(
        [&](const Eigen::VectorXd& w) { return multidim_loss_oracle(X, w, W_V, G); },
        flat, h);
    accumulate(acc, analytic.reshaped(), numeric, offset);
    offset += d * d;
  }
  return acc;
}

KernelMatrix kernel_bruteforce(const AttentionParams& params,
                               const Dataset& data) {
  const auto n = static_cast<Eigen::Index>(data.size());
  const int m = params.m();
  const auto variance = [&](Eigen::Index i, int r) {
    const auto [first, second] =
        oracle_moments(data.samples[static_cast<std::size_t>(i)].x, params.w(r));
    return second - first * first;
  };
  KernelMatrix k;
  k.H.resize(n, n);
  k.psi.resize(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const long double xi = data.samples[static_cast<std::size_t>(i)].x(data.d - 1);
    for (Eigen::Index j = 0; j < n; ++j) {
      const long double xj = data.samples[static_cast<std::size_t>(j)].x(data.d - 1);
      long double acc = 0.0L;
      for (int r = 0; r < m; ++r) acc += variance(i, r) * variance(j, r);
      k.H(i, j) = static_cast<double>(xi * xj * acc / m);
    }
    for (int r = 0; r < m; ++r)
      k.psi(i, r) = static_cast<double>(xi * variance(i, r) / std::sqrt(static_cast<long double>(m)));
  }
  return k;
}

double v_min_oracle(const Dataset& data) {
  long double best = std::numeric_limits<long double>::infinity();
  for (const Sample& s : data.samples) {
    long double mean = 0.0L;
    for (Eigen::Index k = 0; k < s.x.size(); ++k) mean += s.x(k);
    mean /= s.x.size();
    long double var = 0.0L;
    for (Eigen::Index k = 0; k < s.x.size(); ++k)
      var += (s.x(k) - mean) * (s.x(k) - mean);
    best = std::min(best, var / s.x.size());
  }
  return static_cast<double>(best);
}

}  // namespace asymlab::verify
