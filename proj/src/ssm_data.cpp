#include "asymlab/ssm_data.hpp"

#include <cmath>
#include <string>

#include "asymlab/error.hpp"
#include "asymlab/linalg.hpp"
#include "asymlab/parallel.hpp"
#include "asymlab/rng.hpp"

namespace asymlab {

namespace {

Eigen::MatrixXd random_orthogonal(int n, Rng& rng) {
  Eigen::MatrixXd g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

void require(bool ok, ErrorKind kind, const std::string& msg) {
  if (!ok) throw Error(kind, msg);
}

// u_k = <P_k, h1> for all k, plus the noise draw.
void fill_sample(const FeatureBank& bank, const Eigen::VectorXd& h1,
                 double sigma, Rng& rng, Sample& out) {
  const int d = bank.d;
  out.h1 = h1;
  out.u.resize(d + 1);
  for (int k = 0; k <= d; ++k) out.u(k) = bank.features[k].dot(h1);
  out.xi.resize(d + 1);
  for (int k = 0; k <= d; ++k) out.xi(k) = sigma * rng.normal();
  out.x = out.u.head(d) + out.xi.head(d);
  out.y = out.u(d) + out.xi(d);
}

Eigen::VectorXd draw_state(int N, Rng& rng) {
  Eigen::VectorXd h(N);
  for (int j = 0; j < N; ++j) h(j) = rng.normal();
  return h;
}

}  // namespace

void SsmSystem::validate() const {
  const auto n = A.rows();
  require(n >= 1, ErrorKind::InvalidArgument, "SsmSystem: empty state");
  require(A.cols() == n && B.size() == n && C.size() == n,
          ErrorKind::DimensionMismatch,
          "SsmSystem: A is " + std::to_string(A.rows()) + "x" +
              std::to_string(A.cols()) + ", B has " +
              std::to_string(B.size()) + ", C has " +
              std::to_string(C.size()) + " entries");
  require(A.allFinite() && B.allFinite() && C.allFinite(),
          ErrorKind::InvalidArgument, "SsmSystem: non-finite entry");
}

SsmSystem random_system(int state_dim, std::uint64_t seed) {
  require(state_dim >= 1, ErrorKind::InvalidArgument,
          "random_system: state_dim must be >= 1");
  Rng rng(substream_seed(seed, stream::kSystem, 0));
  SsmSystem sys;
  sys.A = 0.9 * random_orthogonal(state_dim, rng);
  const double scale = 1.0 / std::sqrt(static_cast<double>(state_dim));
  sys.B.resize(state_dim);
  sys.C.resize(state_dim);
  for (int j = 0; j < state_dim; ++j) sys.B(j) = scale * rng.normal();
  for (int j = 0; j < state_dim; ++j) sys.C(j) = scale * rng.normal();
  return sys;
}

std::vector<Eigen::VectorXd> ssm_features(const SsmSystem& sys, int d) {
  sys.validate();
  require(d >= 1, ErrorKind::InvalidArgument, "ssm_features: d must be >= 1");
  const int n = sys.state_dim();
  // G_k^T = (A^T)^{k-1} C and K_k = C^T A^{k-1} B for k = 1..d+1.
  std::vector<Eigen::VectorXd> g(d + 1);
  std::vector<double> kernel(d + 1);
  Eigen::VectorXd row = sys.C;          // (A^{k-1})^T C
  Eigen::VectorXd col = sys.B;          // A^{k-1} B
  for (int k = 0; k <= d; ++k) {
    g[k] = row;
    kernel[k] = sys.C.dot(col);
    row = sys.A.transpose() * row;
    col = sys.A * col;
  }
  std::vector<Eigen::VectorXd> p(d + 1, Eigen::VectorXd::Zero(n));
  for (int k = 0; k <= d; ++k) {
    p[k] = g[k];
    for (int kappa = 0; kappa < k; ++kappa) p[k] += kernel[k - kappa - 1] * p[kappa];
  }
  return p;
}

Eigen::VectorXd run_ssm(const SsmSystem& sys, const Eigen::VectorXd& h1,
                        int d) {
  sys.validate();
  require(d >= 1, ErrorKind::InvalidArgument, "run_ssm: d must be >= 1");
  require(h1.size() == sys.state_dim(), ErrorKind::DimensionMismatch,
          "run_ssm: h1 has " + std::to_string(h1.size()) +
              " entries, state dimension is " +
              std::to_string(sys.state_dim()));
  require(h1.allFinite(), ErrorKind::InvalidArgument,
          "run_ssm: h1 not finite");
  Eigen::VectorXd u(d + 1);
  Eigen::VectorXd h = h1;
  u(0) = sys.C.dot(h);
  for (int k = 0; k < d; ++k) {
    h = sys.A * h + sys.B * u(k);
    u(k + 1) = sys.C.dot(h);
  }
  return u;
}

std::string to_string(BankMode mode) {
  switch (mode) {
    case BankMode::ExactNorm: return "exact-norm";
    case BankMode::ResidualMean: return "residual-mean";
    case BankMode::FromSsm: return "from-ssm";
  }
  return "unknown";
}

BankMode bank_mode_from_string(const std::string& name) {
  if (name == "exact-norm") return BankMode::ExactNorm;
  if (name == "residual-mean") return BankMode::ResidualMean;
  if (name == "from-ssm") return BankMode::FromSsm;
  throw Error(ErrorKind::InvalidArgument, "unknown bank mode '" + name + "'");
}

std::vector<int> FeatureBank::background_indices() const {
  std::vector<int> idx;
  for (int k = 0; k + 1 < d; ++k) idx.push_back(k);
  return idx;
}

double FeatureBank::span_residual() const {
  const Eigen::VectorXd& pd = core();
  Eigen::MatrixXd diffs(N, d - 1);
  for (int k = 0; k + 1 < d; ++k) diffs.col(k) = features[k] - pd;
  const Eigen::VectorXd rhs = target() - pd;
  if (d == 1) return rhs.norm();
  const Eigen::VectorXd coef = linalg::min_norm_lstsq(diffs, rhs);
  return (diffs * coef - rhs).norm();
}

FeatureBank build_feature_bank(int d, double gamma, BankMode mode,
                               std::uint64_t seed, int N) {
  if (N == 0) N = d;
  require(std::isfinite(gamma) && gamma >= 0.0 && gamma < 1.0,
          ErrorKind::InvalidArgument,
          "build_feature_bank: gamma must lie in [0, 1)");
  FeatureBank bank;
  bank.d = d;
  bank.N = N;
  bank.mode = mode;
  bank.seed = seed;

  if (mode == BankMode::FromSsm) {
    require(d >= 1 && N >= 1, ErrorKind::InvalidArgument,
            "build_feature_bank: from-ssm needs d >= 1");
    return bank_from_system(random_system(N, seed), d, seed);
  }

  require(d >= 2, ErrorKind::InvalidArgument,
          "build_feature_bank: d = " + std::to_string(d) + " too small for " +
              to_string(mode));
  require(N >= d, ErrorKind::InvalidArgument,
          "build_feature_bank: N must be >= d for orthonormal features");

  Rng rng(substream_seed(seed, stream::kFeatureBank, 0));
  const Eigen::MatrixXd basis = random_orthogonal(N, rng);
  bank.features.assign(d + 1, Eigen::VectorXd::Zero(N));
  for (int k = 0; k < d; ++k) bank.features[k] = basis.col(k);

  if (mode == BankMode::ExactNorm) {
    // Two-level coefficients: c_1 = s, c_2..c_{d-1} = t with
    // sum c = 1 - gamma and sum c^2 = 1 - gamma^2.
    const double lin = 1.0 - gamma;
    const double quad = 1.0 - gamma * gamma;
    Eigen::VectorXd c(d - 1);
    if (d == 2) {
      if (gamma != 0.0)
        throw InfeasibleError(
            "build_feature_bank: exact-norm with d = 2 requires gamma = 0",
            std::abs(lin * lin - quad));
      c(0) = 1.0;
    } else {
      const double dm1 = d - 1.0;
      const double dm2 = d - 2.0;
      const double disc = dm2 * (dm1 * quad - lin * lin);
      const double s = (lin + std::sqrt(std::max(0.0, disc))) / dm1;
      const double t = (lin - s) / dm2;
      c.setConstant(t);
      c(0) = s;
    }
    Eigen::VectorXd target = gamma * bank.features[d - 1];
    for (int k = 0; k + 1 < d; ++k) target += c(k) * bank.features[k];
    bank.features[d] = target;
    bank.background_coeffs = c;
    bank.gamma = gamma;
  } else {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(N);
    for (int k = 0; k + 1 < d; ++k) mean += bank.features[k];
    mean /= static_cast<double>(d - 1);
    const double dd = d;
    bank.features[d] = ((dd - 1.0) / dd) * bank.features[d - 1] + mean / dd;
    bank.gamma = (dd - 1.0) / dd;
  }
  return bank;
}

FeatureBank bank_from_system(const SsmSystem& sys, int d, std::uint64_t seed) {
  FeatureBank bank;
  bank.d = d;
  bank.N = sys.state_dim();
  bank.mode = BankMode::FromSsm;
  bank.seed = seed;
  bank.features = ssm_features(sys, d);
  const double denom = bank.core().norm() * bank.target().norm();
  bank.gamma = denom > 0.0 ? bank.core().dot(bank.target()) / denom : 0.0;
  return bank;
}

std::string to_string(DatasetKind kind) {
  return kind == DatasetKind::InDistribution ? "id" : "ood-sign-inconsistent";
}

DatasetKind dataset_kind_from_string(const std::string& name) {
  if (name == "id") return DatasetKind::InDistribution;
  if (name == "ood-sign-inconsistent") return DatasetKind::OodSignInconsistent;
  throw Error(ErrorKind::InvalidArgument, "unknown dataset kind '" + name + "'");
}

void validate_dataset(const Dataset& data) {
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const Sample& s = data.samples[i];
    const std::string where = "sample " + std::to_string(i);
    require(s.x.size() == data.d, ErrorKind::DimensionMismatch,
            where + ": x has " + std::to_string(s.x.size()) +
                " entries, expected d = " + std::to_string(data.d));
    require(s.x.allFinite() && std::isfinite(s.y), ErrorKind::InvalidArgument,
            where + ": non-finite value");
    if (s.has_latents())
      require(s.u.size() == data.d + 1, ErrorKind::DimensionMismatch,
              where + ": u must have d + 1 entries");
  }
}

Dataset generate_id(const FeatureBank& bank, int n, double sigma,
                    std::uint64_t seed) {
  require(n >= 1, ErrorKind::InvalidArgument, "generate_id: n must be >= 1");
  require(std::isfinite(sigma) && sigma >= 0.0, ErrorKind::InvalidArgument,
          "generate_id: sigma must be >= 0");
  Dataset data;
  data.kind = DatasetKind::InDistribution;
  data.d = bank.d;
  data.N = bank.N;
  data.sigma = sigma;
  data.seed = seed;
  data.gamma = bank.gamma;
  data.samples.resize(static_cast<std::size_t>(n));
  parallel_for(data.samples.size(), 256, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      Rng rng(substream_seed(seed, stream::kIdSamples, i));
      const Eigen::VectorXd h = draw_state(bank.N, rng);
      fill_sample(bank, h, sigma, rng, data.samples[i]);
    }
  });
  return data;
}

Dataset generate_ood_sign_inconsistent(const FeatureBank& bank, int n_test,
                                       double sigma, std::uint64_t seed,
                                       std::int64_t max_rejects) {
  require(n_test >= 1, ErrorKind::InvalidArgument,
          "generate_ood_sign_inconsistent: n_test must be >= 1");
  require(std::isfinite(sigma) && sigma >= 0.0, ErrorKind::InvalidArgument,
          "generate_ood_sign_inconsistent: sigma must be >= 0");
  require(max_rejects >= 1, ErrorKind::InvalidArgument,
          "generate_ood_sign_inconsistent: max_rejects must be >= 1");
  require(bank.gamma < 1.0, ErrorKind::InvalidArgument,
          "generate_ood_sign_inconsistent: gamma must be < 1");

  Dataset data;
  data.kind = DatasetKind::OodSignInconsistent;
  data.d = bank.d;
  data.N = bank.N;
  data.sigma = sigma;
  data.seed = seed;
  data.gamma = bank.gamma;
  data.samples.resize(static_cast<std::size_t>(n_test));
  // attempts[i] < 0 marks a sample that hit the rejection limit.
  std::vector<std::int64_t> attempts(data.samples.size(), 0);
  const Eigen::VectorXd& core = bank.core();
  const Eigen::VectorXd& target = bank.target();

  parallel_for(data.samples.size(), 256, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      Rng rng(substream_seed(seed, stream::kOodSamples, i));
      std::int64_t tries = 0;
      std::int64_t rejects = 0;
      for (;;) {
        const Eigen::VectorXd h = draw_state(bank.N, rng);
        ++tries;
        if (core.dot(h) * target.dot(h) < 0.0) {
          fill_sample(bank, h, sigma, rng, data.samples[i]);
          attempts[i] = tries;
          break;
        }
        if (++rejects > max_rejects) {
          attempts[i] = -1;
          break;
        }
      }
    }
  });

  std::int64_t total = 0;
  for (std::size_t i = 0; i < attempts.size(); ++i) {
    if (attempts[i] < 0)
      throw Error(ErrorKind::RejectionLimit,
                  "generate_ood_sign_inconsistent: sample " +
                      std::to_string(i) + " exceeded " +
                      std::to_string(max_rejects) +
                      " consecutive rejections (u_d and u_{d+1} almost "
                      "perfectly sign-correlated)");
    total += attempts[i];
  }
  data.attempts = total;
  data.acceptance_rate =
      static_cast<double>(n_test) / static_cast<double>(total);
  return data;
}

}  // namespace asymlab
