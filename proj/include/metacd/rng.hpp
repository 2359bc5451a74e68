#pragma once

#include <cstdint>
#include <random>

namespace metacd {

/// Deterministic random stream. The engine is the standard mt19937_64 and
/// every sampler below is implemented here, so a given seed yields the same
/// draws on every platform. Substreams indexed per work unit keep parallel
/// and serial schedules bit-identical.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  /// Stream for work unit `index` derived from a run-level seed.
  static RngStream substream(std::uint64_t seed, std::uint64_t index);

  /// Uniform on the open interval (0, 1).
  double uniform();

  /// Standard normal (Box-Muller, one value per two uniforms).
  double normal();

  /// log of a Gamma(shape, 1) draw; stays finite for tiny shapes where the
  /// draw itself would underflow.
  double log_gamma(double shape);

  /// Beta(a, b) via two log-gamma draws.
  double beta(double a, double b);

  /// Binomial(trials, p) as a run of Bernoulli draws (counts are small here).
  std::int64_t binomial(std::int64_t trials, double p);

 private:
  std::mt19937_64 engine_;
};

}  // namespace metacd
