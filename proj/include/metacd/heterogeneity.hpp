#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "metacd/confidence.hpp"
#include "metacd/fixed_effect.hpp"
#include "metacd/rng.hpp"
#include "metacd/tables.hpp"

namespace metacd {

/// Conditioning statistics for the ratio delta = gamma_j / gamma_i between
/// the treatment effects of two studies.
struct PairwiseStats {
  std::int64_t w = 0;        // treatment events of the pair
  std::int64_t z1 = 0;       // event total of study i
  std::int64_t z2 = 0;       // event total of study j
  double r = 0.0;            // exposure odds factor (e0_i e1_j) / (e1_i e0_j)
  std::int64_t y12_obs = 0;  // observed treatment events of study j
};

PairwiseStats pairwise_stats(const StudySet& set, std::size_t i, std::size_t j);

/// C(delta) = P(Y > y_obs | w, z1, z2) + 1/2 P(Y = y_obs | w, z1, z2) under
/// the tilted hypergeometric law with odds r * delta.
ConfidenceDistribution pairwise_delta_cd(const StudySet& set, std::size_t i,
                                         std::size_t j,
                                         std::span<const double> grid,
                                         bool half_corrected = true);

/// Random-effects marginal log-likelihood: each study contributes a
/// beta-binomial term with mean pi0_i(gamma0) and kappa = 1/(tau+1);
/// kappa = 0 is the exact binomial limit. Studies without events
/// contribute nothing.
double marginal_loglik(const StudySet& set, double gamma0, double kappa);

struct RandomEffectsFit {
  double gamma0_hat = 0.0;
  double kappa_hat = 0.0;  // in [0, 1)
  double tau_hat = 0.0;    // 1/kappa - 1; +infinity at kappa = 0
  double max_loglik = 0.0;
  std::function<double(double, double)> marginal_loglik;
};

RandomEffectsFit fit_random_effects(const StudySet& set,
                                    double kappa_max = 0.999);

/// cc(gamma0) = Gamma_1(D_1(gamma0)) where the profile maximizes the
/// marginal log-likelihood over kappa in [0, kappa_max] per grid point.
ConfidenceCurve gamma0_profile_cc(const StudySet& set,
                                  std::span<const double> grid,
                                  double kappa_max = 0.999);

struct QMinResult {
  double q_obs = 0.0;
  double gamma0_argmin = 0.0;
};

/// Minimum over gamma0 of the Pearson homogeneity statistic
/// sum_i (y1_i - z_i f_i)^2 / (z_i f_i (1 - f_i)); studies without events
/// are excluded from the sum.
QMinResult q_min(const StudySet& set);

/// Simulated confidence curve for kappa with its point mass at zero.
struct KappaCurveResult {
  std::vector<double> kappa_grid;
  std::vector<double> cd_values;  // C(kappa) = P_kappa(Qmin >= q_obs)
  std::vector<double> cc_values;  // |1 - 2 C|
  double point_mass_at_zero = 0.0;
  double q_obs = 0.0;
  double gamma0_hat = 0.0;
  int replicates = 0;
  std::uint64_t seed = 0;

  ConfidenceCurve curve() const;
};

/// 61 points, linear on [0, 0.30].
std::vector<double> default_kappa_grid();

/// Parametric Monte-Carlo curve: at every grid kappa, treatment counts are
/// redrawn from the fitted beta-binomials (fixed z_i and gamma0_hat) and
/// C(kappa) estimates P(Qmin >= q_obs) with ties weighted one half.
/// Per-grid-point substreams make the result depend only on (seed, grid).
KappaCurveResult kappa_cc(const StudySet& set,
                          std::span<const double> kappa_grid, int replicates,
                          std::uint64_t seed);

/// One beta-binomial draw: p from Beta(tau*pi0, tau*(1-pi0)), then
/// Binomial(z, p). tau = +infinity draws Binomial(z, pi0) directly.
std::int64_t sample_beta_binomial(std::int64_t z, double tau, double pi0,
                                  RngStream& rng);

}  // namespace metacd
