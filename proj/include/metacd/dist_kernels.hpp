#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace metacd {

/// Conditional law of a study's treatment count given its event total:
/// Y1 | Z = z is Binomial(z, pi) with pi = e1*gamma / (e0 + e1*gamma).
struct ConditionalBinomial {
  std::int64_t trials = 0;
  double success_prob = 0.0;
};

/// Probability mass function on the integer range [first, first + size - 1].
struct PmfVector {
  std::int64_t first = 0;
  std::vector<double> probs;

  std::int64_t last() const {
    return first + static_cast<std::int64_t>(probs.size()) - 1;
  }
  /// P(X = k); zero outside the support.
  double at(std::int64_t k) const;
  /// P(X > k), summed far tail first to limit rounding.
  double tail_above(std::int64_t k) const;
  double mean() const;
  double variance() const;
};

/// pi(gamma) = e1*gamma / (e0 + e1*gamma). Strictly increasing in gamma,
/// 0 at gamma = 0, below 1 for finite gamma.
double conditional_success_prob(double e0, double e1, double gamma);

/// Binomial(trials, p) pmf over 0..trials.
PmfVector binomial_pmf(std::int64_t trials, double p);

/// Exact law of B = sum of independent Binomial(z_i, pi_i) counts,
/// computed by sequential convolution.
PmfVector poisson_binomial_pmf(std::span<const ConditionalBinomial> trials);

/// Law of Y given (w, z1, z2) where Y counts events from the second pool:
/// P(Y = u) proportional to C(z1, w-u) * C(z2, u) * (r*delta)^u on the
/// support max(0, w-z1) .. min(w, z2). Terms are accumulated in log space,
/// so extreme odds do not overflow.
PmfVector noncentral_hypergeom_pmf(std::int64_t w, std::int64_t z1,
                                   std::int64_t z2, double r, double delta);

/// Marginal P(Y = y) for Y | p ~ Binomial(z, p), p ~ Beta(tau*pi0, tau*(1-pi0)).
/// tau = +infinity degenerates to the plain Binomial(z, pi0) mass.
double beta_binomial_pmf(std::int64_t z, double tau, double pi0, std::int64_t y);

double normal_cdf(double x);

/// Chi-square(1) cdf via the normal identity Gamma_1(x) = 2*Phi(sqrt(x)) - 1.
double chi2_1_cdf(double x);

double log_choose(std::int64_t n, std::int64_t k);

}  // namespace metacd
