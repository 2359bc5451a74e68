#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "metacd/confidence.hpp"
#include "metacd/tables.hpp"

namespace metacd {

enum class FitBoundary { interior, at_zero, at_infinity };

/// Maximum conditional likelihood fit of the common treatment effect.
/// The same root also maximizes the unconditional likelihood.
struct FixedEffectFit {
  FitBoundary boundary = FitBoundary::interior;
  double gamma_hat = std::numeric_limits<double>::quiet_NaN();
  /// Observed curvature of the profile log-likelihood at gamma_hat.
  double j_hat = std::numeric_limits<double>::quiet_NaN();
  std::int64_t b_obs = 0;  // total treatment events
  /// Profiled nuisance rates z_i / (e0_i + e1_i * gamma_hat).
  std::vector<double> lambda_hats;
  std::function<double(double)> loglik_profile;

  bool interior() const { return boundary == FitBoundary::interior; }
};

/// C_i(gamma) = P(Y > y_obs | z) + 1/2 P(Y = y_obs | z) under the study's
/// conditional binomial. Identically 1/2 when the study has no events.
double per_study_cd_value(const StudyTable& study, double gamma,
                          bool half_corrected = true);
ConfidenceDistribution per_study_cd(const StudyTable& study,
                                    std::span<const double> grid,
                                    bool half_corrected = true);

/// C*(gamma) = P(B > b_obs | z_1..z_k) + 1/2 P(B = b_obs | z_1..z_k) where
/// B is the total treatment count; exact via poisson_binomial_pmf.
double combined_cd_value(const StudySet& set, double gamma,
                         bool half_corrected = true);
ConfidenceDistribution combined_optimal_cd(const StudySet& set,
                                           std::span<const double> grid,
                                           bool half_corrected = true);

/// Profile log-likelihood sum_i { y1_i log(gamma) - z_i log(e0_i + e1_i gamma) }.
double profile_loglik(const StudySet& set, double gamma);

/// Solves the score equation on the log scale by bracketing + TOMS748.
/// All-zero margins are reported as tagged boundary outcomes, not numbers.
FixedEffectFit mcl_estimate(const StudySet& set);

/// Normal approximation Phi((gamma - gamma_hat) * sqrt(j_hat)).
ConfidenceDistribution approx_normal_cd(const FixedEffectFit& fit,
                                        std::span<const double> grid);

/// cc_a(gamma) = Gamma_1(D(gamma)) with the profile deviance
/// D(gamma) = 2 { l_prof(gamma_hat) - l_prof(gamma) }.
ConfidenceCurve profile_deviance_cc(const StudySet& set,
                                    std::span<const double> grid);

}  // namespace metacd
