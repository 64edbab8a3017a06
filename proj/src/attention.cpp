#include "asymlab/attention.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "asymlab/detail/gradient_parts.hpp"
#include "asymlab/error.hpp"
#include "asymlab/parallel.hpp"
#include "asymlab/rng.hpp"

namespace asymlab {

namespace {

struct Moment {
  double mean;
  double var;
};

// Softmax over z_k = x_d * w * x_k, reduced to the weighted mean and the
// centered weighted variance of x. `scratch` must hold d doubles.
Moment neuron_moment(const double* x, int d, double w, double* scratch) {
  const double scale = x[d - 1] * w;
  double top = scale * x[0];
  for (int k = 1; k < d; ++k) top = std::max(top, scale * x[k]);
  double total = 0.0;
  double first = 0.0;
  for (int k = 0; k < d; ++k) {
    const double e = std::exp(scale * x[k] - top);
    scratch[k] = e;
    total += e;
    first += e * x[k];
  }
  const double mean = first / total;
  double second = 0.0;
  for (int k = 0; k < d; ++k) {
    const double c = x[k] - mean;
    second += scratch[k] * c * c;
  }
  return {mean, second / total};
}

// Samples packed column-wise so each x_i is contiguous.
Eigen::MatrixXd pack_inputs(const Dataset& data) {
  Eigen::MatrixXd xs(data.d, static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Sample& s = data.samples[i];
    if (s.x.size() != data.d)
      throw Error(ErrorKind::DimensionMismatch,
                  "sample " + std::to_string(i) + " has " +
                      std::to_string(s.x.size()) + " inputs, expected " +
                      std::to_string(data.d));
    xs.col(static_cast<Eigen::Index>(i)) = s.x;
  }
  return xs;
}

void require_nonempty(const Dataset& data, const char* who) {
  if (data.empty())
    throw Error(ErrorKind::InvalidArgument,
                std::string(who) + ": dataset is empty");
  if (data.d < 1)
    throw Error(ErrorKind::InvalidArgument,
                std::string(who) + ": sequence length must be >= 1");
}

}  // namespace

void AttentionParams::validate() const {
  if (w.size() < 1)
    throw Error(ErrorKind::InvalidArgument, "AttentionParams: m must be >= 1");
  if (a.size() != w.size())
    throw Error(ErrorKind::DimensionMismatch,
                "AttentionParams: w has " + std::to_string(w.size()) +
                    " entries but a has " + std::to_string(a.size()));
  for (Eigen::Index r = 0; r < a.size(); ++r)
    if (a(r) != 1.0 && a(r) != -1.0)
      throw Error(ErrorKind::InvalidArgument,
                  "AttentionParams: a[" + std::to_string(r) + "] is not +-1");
  if (!w.allFinite())
    throw Error(ErrorKind::InvalidArgument, "AttentionParams: w not finite");
}

AttentionParams init_params(int m, std::uint64_t seed, bool zero_init) {
  if (m < 1)
    throw Error(ErrorKind::InvalidArgument, "init_params: m must be >= 1");
  if (zero_init && m % 2 != 0)
    throw Error(ErrorKind::InvalidArgument,
                "init_params: zero_init pairing needs an even m, got " +
                    std::to_string(m));
  AttentionParams p;
  p.w.resize(m);
  p.a.resize(m);
  p.zero_init = zero_init;
  p.seed = seed;
  Rng rng(substream_seed(seed, stream::kInitParams, 0));
  if (zero_init) {
    for (int j = 0; j < m / 2; ++j) {
      const double w = rng.normal();
      p.w(2 * j) = w;
      p.w(2 * j + 1) = w;
      p.a(2 * j) = 1.0;
      p.a(2 * j + 1) = -1.0;
    }
  } else {
    for (int r = 0; r < m; ++r) p.w(r) = rng.normal();
    for (int r = 0; r < m; ++r) p.a(r) = rng.rademacher();
  }
  return p;
}

Eigen::VectorXd softmax_weights(const Eigen::VectorXd& z) {
  if (z.size() == 0)
    throw Error(ErrorKind::InvalidArgument, "softmax_weights: empty input");
  if (z.hasNaN())
    throw Error(ErrorKind::InvalidArgument, "softmax_weights: NaN input");
  const double top = z.maxCoeff();
  Eigen::VectorXd e = (z.array() - top).exp().matrix();
  return e / e.sum();
}

double softmax_variance(const Eigen::VectorXd& s, const Eigen::VectorXd& x) {
  if (s.size() != x.size())
    throw Error(ErrorKind::DimensionMismatch,
                "softmax_variance: length mismatch");
  const double mean = s.dot(x);
  return (s.array() * (x.array() - mean).square()).sum();
}

double forward(const AttentionParams& params, const Eigen::VectorXd& x) {
  const int d = static_cast<int>(x.size());
  if (d < 1)
    throw Error(ErrorKind::InvalidArgument, "forward: empty input");
  std::vector<double> scratch(static_cast<std::size_t>(d));
  double acc = 0.0;
  for (int r = 0; r < params.m(); ++r)
    acc += params.a(r) * neuron_moment(x.data(), d, params.w(r), scratch.data()).mean;
  return acc / std::sqrt(static_cast<double>(params.m()));
}

ForwardStats forward_stats(const AttentionParams& params,
                           const Dataset& data) {
  require_nonempty(data, "forward_stats");
  const Eigen::MatrixXd xs = pack_inputs(data);
  ForwardStats st;
  st.n = static_cast<int>(data.size());
  st.m = params.m();
  st.d = data.d;
  const Eigen::Index rows = static_cast<Eigen::Index>(st.n) * st.m;
  st.u.resize(rows, st.d);
  st.S.resize(rows, st.d);
  st.alpha.resize(rows);
  st.shift.resize(rows);
  st.F.resize(st.n);
  for (int i = 0; i < st.n; ++i) {
    const Eigen::VectorXd x = xs.col(i);
    const double xd = x(st.d - 1);
    double acc = 0.0;
    for (int r = 0; r < st.m; ++r) {
      const Eigen::Index row = st.row(i, r);
      const Eigen::VectorXd z = xd * params.w(r) * x;
      const double top = z.maxCoeff();
      const Eigen::VectorXd u = (z.array() - top).exp().matrix();
      const double alpha = u.sum();
      st.u.row(row) = u.transpose();
      st.alpha(row) = alpha;
      st.shift(row) = top;
      st.S.row(row) = (u / alpha).transpose();
      acc += params.a(r) * st.S.row(row).dot(x);
    }
    st.F(i) = acc / std::sqrt(static_cast<double>(st.m));
  }
  return st;
}

SoftmaxMoments softmax_moments(const Eigen::VectorXd& w, const Dataset& data) {
  require_nonempty(data, "softmax_moments");
  const Eigen::MatrixXd xs = pack_inputs(data);
  const auto n = static_cast<Eigen::Index>(data.size());
  const int d = data.d;
  SoftmaxMoments mo;
  mo.mean.resize(n, w.size());
  mo.var.resize(n, w.size());
  const auto work = static_cast<std::size_t>(n * d);
  const std::size_t min_chunk = std::max<std::size_t>(1, 4096 / std::max<std::size_t>(1, work));
  parallel_for(static_cast<std::size_t>(w.size()), min_chunk,
               [&](std::size_t lo, std::size_t hi) {
                 std::vector<double> scratch(static_cast<std::size_t>(d));
                 for (std::size_t r = lo; r < hi; ++r) {
                   const auto rr = static_cast<Eigen::Index>(r);
                   for (Eigen::Index i = 0; i < n; ++i) {
                     const Moment mm = neuron_moment(&xs(0, i), d, w(rr),
                                                     scratch.data());
                     mo.mean(i, rr) = mm.mean;
                     mo.var(i, rr) = mm.var;
                   }
                 }
               });
  return mo;
}

Eigen::VectorXd predictions(const AttentionParams& params,
                            const SoftmaxMoments& moments) {
  const Eigen::Index n = moments.mean.rows();
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(params.m()));
  Eigen::VectorXd f(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int r = 0; r < params.m(); ++r) acc += params.a(r) * moments.mean(i, r);
    f(i) = acc * inv_sqrt_m;
  }
  return f;
}

LossAndGrad loss_and_grad(const AttentionParams& params, const Dataset& data) {
  LossAndGrad out;
  out.moments = softmax_moments(params.w, data);
  const Eigen::VectorXd f = predictions(params, out.moments);
  const auto n = static_cast<Eigen::Index>(data.size());
  const int d = data.d;
  // weight_i = (F_i - y_i) * x_{i,d}
  Eigen::VectorXd weight(n);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Sample& s = data.samples[static_cast<std::size_t>(i)];
    const double res = f(i) - s.y;
    total += res * res;
    weight(i) = res * s.x(d - 1);
  }
  out.loss = 0.5 * total;
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(params.m()));
  out.grad.resize(params.m());
  for (int r = 0; r < params.m(); ++r) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) acc += weight(i) * out.moments.var(i, r);
    out.grad(r) = inv_sqrt_m * params.a(r) * acc;
  }
  return out;
}

double loss(const AttentionParams& params, const Dataset& data) {
  return loss_and_grad(params, data).loss;
}

Eigen::VectorXd grad_w(const AttentionParams& params, const Dataset& data) {
  return loss_and_grad(params, data).grad;
}

namespace detail {

Eigen::VectorXd raw_u(const Eigen::VectorXd& x, double w) {
  const double xd = x(x.size() - 1);
  return (xd * w * x.array()).exp().matrix();
}

double raw_alpha(const Eigen::VectorXd& x, double w) { return raw_u(x, w).sum(); }

Eigen::VectorXd raw_S(const Eigen::VectorXd& x, double w) {
  const Eigen::VectorXd u = raw_u(x, w);
  return u / u.sum();
}

Eigen::VectorXd du_dw(const Eigen::VectorXd& x, double w) {
  const double xd = x(x.size() - 1);
  return xd * raw_u(x, w).cwiseProduct(x);
}

double dalpha_dw(const Eigen::VectorXd& x, double w) {
  const double xd = x(x.size() - 1);
  return xd * raw_u(x, w).cwiseProduct(x).sum();
}

double dinv_alpha_dw(const Eigen::VectorXd& x, double w) {
  const double xd = x(x.size() - 1);
  return -xd / raw_alpha(x, w) * raw_S(x, w).cwiseProduct(x).sum();
}

Eigen::VectorXd dS_dw(const Eigen::VectorXd& x, double w) {
  const double xd = x(x.size() - 1);
  const Eigen::VectorXd s = raw_S(x, w);
  const double mean = s.dot(x);
  return xd * (x.array() - mean).matrix().cwiseProduct(s);
}

double dF_dw(const Eigen::VectorXd& x, double w, double a_r, int m) {
  const double xd = x(x.size() - 1);
  const Eigen::VectorXd s = raw_S(x, w);
  const double var = s.dot(x.cwiseProduct(x)) - std::pow(s.dot(x), 2);
  return a_r * xd * var / std::sqrt(static_cast<double>(m));
}

}  // namespace detail

}  // namespace asymlab
