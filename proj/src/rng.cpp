#include "metacd/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace metacd {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

RngStream RngStream::substream(std::uint64_t seed, std::uint64_t index) {
  return RngStream(splitmix64(seed) + splitmix64(index + 1));
}

double RngStream::uniform() {
  // 53 random bits, offset by half a step: strictly inside (0, 1).
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

double RngStream::log_gamma(double shape) {
  if (!(shape > 0.0)) throw std::domain_error("gamma shape must be positive");
  if (shape < 1.0) {
    // Boost the shape by one, then scale by U^(1/shape) in log space.
    return log_gamma(shape + 1.0) + std::log(uniform()) / shape;
  }
  // Marsaglia-Tsang squeeze.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return std::log(d * v);
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return std::log(d * v);
  }
}

double RngStream::beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::domain_error("beta parameters must be positive");
  const double la = log_gamma(a);
  const double lb = log_gamma(b);
  return 1.0 / (1.0 + std::exp(lb - la));
}

std::int64_t RngStream::binomial(std::int64_t trials, double p) {
  if (trials < 0) throw std::domain_error("trial count must be nonnegative");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::domain_error("success probability must lie in [0,1]");
  std::int64_t count = 0;
  for (std::int64_t i = 0; i < trials; ++i)
    if (uniform() < p) ++count;
  return count;
}

}  // namespace metacd
