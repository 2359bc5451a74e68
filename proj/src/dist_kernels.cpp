#include "metacd/dist_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace metacd {

double PmfVector::at(std::int64_t k) const {
  if (k < first || k > last()) return 0.0;
  return probs[static_cast<std::size_t>(k - first)];
}

double PmfVector::tail_above(std::int64_t k) const {
  if (k < first) return 1.0;
  if (k >= last()) return 0.0;
  double sum = 0.0;
  for (std::int64_t j = last(); j > k; --j)
    sum += probs[static_cast<std::size_t>(j - first)];
  return sum;
}

double PmfVector::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i)
    m += probs[i] * static_cast<double>(first + static_cast<std::int64_t>(i));
  return m;
}

double PmfVector::variance() const {
  const double m = mean();
  double v = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double d = static_cast<double>(first + static_cast<std::int64_t>(i)) - m;
    v += probs[i] * d * d;
  }
  return v;
}

double log_choose(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

double conditional_success_prob(double e0, double e1, double gamma) {
  if (!(e0 > 0.0) || !(e1 > 0.0))
    throw std::domain_error("exposures must be positive");
  if (!(gamma >= 0.0)) throw std::domain_error("gamma must be nonnegative");
  if (gamma == 0.0) return 0.0;
  return e1 * gamma / (e0 + e1 * gamma);
}

PmfVector binomial_pmf(std::int64_t trials, double p) {
  if (trials < 0) throw std::domain_error("trial count must be nonnegative");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::domain_error("success probability must lie in [0,1]");
  PmfVector pmf;
  pmf.first = 0;
  pmf.probs.assign(static_cast<std::size_t>(trials) + 1, 0.0);
  if (p == 0.0) {
    pmf.probs.front() = 1.0;
    return pmf;
  }
  if (p == 1.0) {
    pmf.probs.back() = 1.0;
    return pmf;
  }
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  for (std::int64_t k = 0; k <= trials; ++k) {
    pmf.probs[static_cast<std::size_t>(k)] = std::exp(
        log_choose(trials, k) + static_cast<double>(k) * lp +
        static_cast<double>(trials - k) * lq);
  }
  return pmf;
}

PmfVector poisson_binomial_pmf(std::span<const ConditionalBinomial> trials) {
  if (trials.empty())
    throw std::domain_error("poisson_binomial_pmf needs at least one term");
  std::vector<double> acc{1.0};
  for (const auto& t : trials) {
    const PmfVector b = binomial_pmf(t.trials, t.success_prob);
    std::vector<double> next(acc.size() + b.probs.size() - 1, 0.0);
    for (std::size_t i = 0; i < acc.size(); ++i) {
      if (acc[i] == 0.0) continue;
      for (std::size_t j = 0; j < b.probs.size(); ++j)
        next[i + j] += acc[i] * b.probs[j];
    }
    acc = std::move(next);
  }
  double total = 0.0;
  for (double v : acc) total += v;
  for (double& v : acc) v /= total;
  return PmfVector{0, std::move(acc)};
}

PmfVector noncentral_hypergeom_pmf(std::int64_t w, std::int64_t z1,
                                   std::int64_t z2, double r, double delta) {
  if (z1 < 0 || z2 < 0) throw std::domain_error("event totals must be nonnegative");
  if (w < 0 || w > z1 + z2)
    throw std::domain_error("w must lie between 0 and z1 + z2");
  if (!(r > 0.0) || !std::isfinite(r))
    throw std::domain_error("odds factor r must be positive and finite");
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw std::domain_error("delta must be positive and finite");

  const std::int64_t lo = std::max<std::int64_t>(0, w - z1);
  const std::int64_t hi = std::min(w, z2);
  const double log_odds = std::log(r) + std::log(delta);

  std::vector<double> logs(static_cast<std::size_t>(hi - lo) + 1);
  double log_max = -std::numeric_limits<double>::infinity();
  for (std::int64_t u = lo; u <= hi; ++u) {
    const double lt = log_choose(z1, w - u) + log_choose(z2, u) +
                      static_cast<double>(u) * log_odds;
    logs[static_cast<std::size_t>(u - lo)] = lt;
    log_max = std::max(log_max, lt);
  }
  double total = 0.0;
  for (double& lt : logs) {
    lt = std::exp(lt - log_max);
    total += lt;
  }
  for (double& v : logs) v /= total;
  return PmfVector{lo, std::move(logs)};
}

double beta_binomial_pmf(std::int64_t z, double tau, double pi0, std::int64_t y) {
  if (z < 0) throw std::domain_error("trial count must be nonnegative");
  if (y < 0 || y > z) throw std::domain_error("outcome must lie in 0..z");
  if (!(pi0 > 0.0 && pi0 < 1.0))
    throw std::domain_error("mean probability must lie strictly in (0,1)");
  if (!(tau > 0.0)) throw std::domain_error("concentration must be positive");
  if (std::isinf(tau)) return binomial_pmf(z, pi0).at(y);

  const double a = tau * pi0;
  const double b = tau * (1.0 - pi0);
  if (z <= 1024) {
    // Rising-factorial form. Unlike differences of large lgamma values this
    // keeps full precision for extreme tau, where the law approaches the
    // plain binomial.
    double log_pmf = log_choose(z, y);
    for (std::int64_t j = 0; j < y; ++j)
      log_pmf += std::log(a + static_cast<double>(j));
    for (std::int64_t j = 0; j < z - y; ++j)
      log_pmf += std::log(b + static_cast<double>(j));
    for (std::int64_t j = 0; j < z; ++j)
      log_pmf -= std::log(tau + static_cast<double>(j));
    return std::exp(log_pmf);
  }
  const double zl = static_cast<double>(z);
  const double yl = static_cast<double>(y);
  const double log_pmf = log_choose(z, y) + std::lgamma(yl + a) +
                         std::lgamma(zl - yl + b) - std::lgamma(zl + a + b) +
                         std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  return std::exp(log_pmf);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double chi2_1_cdf(double x) {
  if (x < 0.0) throw std::domain_error("chi2_1_cdf needs a nonnegative argument");
  // Algebraically 2*normal_cdf(sqrt(x)) - 1, evaluated without cancellation.
  return std::erf(std::sqrt(x) / std::sqrt(2.0));
}

}  // namespace metacd
