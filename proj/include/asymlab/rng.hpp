#pragma once

#include <cstdint>
#include <random>

namespace asymlab {

/// SplitMix64 finalizer. Used to derive well-separated seeds for substreams.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for substream `index` of logical stream `stream` under `seed`.
/// Two different (stream, index) pairs give statistically independent
/// generators, so per-sample work can run in any order.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream,
                             std::uint64_t index);

/// Stream tags. Each consumer of randomness owns one tag.
namespace stream {
inline constexpr std::uint64_t kIdSamples = 1;
inline constexpr std::uint64_t kOodSamples = 2;
inline constexpr std::uint64_t kFeatureBank = 3;
inline constexpr std::uint64_t kInitParams = 4;
inline constexpr std::uint64_t kGapDraws = 5;
inline constexpr std::uint64_t kGradCheck = 6;
inline constexpr std::uint64_t kSystem = 7;
}  // namespace stream

/// Deterministic generator: std::mt19937_64 (bit-exact across standard
/// libraries) with hand-written uniform and normal transforms, since the
/// std distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1].
  double uniform_open0();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller; the second variate is cached.
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  /// +1 or -1 with equal probability.
  double rademacher();
  std::uint64_t next_u64() { return engine_(); }
  /// Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi);

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace asymlab
