#include "metacd/fixed_effect.hpp"

#include <cmath>
#include <stdexcept>

#include "metacd/dist_kernels.hpp"
#include "metacd/errors.hpp"
#include "solvers.hpp"

namespace metacd {

namespace {

std::vector<ConditionalBinomial> conditional_laws(const StudySet& set,
                                                  double gamma) {
  std::vector<ConditionalBinomial> laws;
  laws.reserve(set.size());
  for (const auto& s : set.studies()) {
    laws.push_back({s.event_total(),
                    conditional_success_prob(s.control_exposure,
                                             s.treatment_exposure, gamma)});
  }
  return laws;
}

void require_some_events(const StudySet& set) {
  for (const auto& s : set.studies())
    if (s.event_total() > 0) return;
  throw InputError("no events in any study; CD undefined");
}

}  // namespace

double per_study_cd_value(const StudyTable& study, double gamma,
                          bool half_corrected) {
  const double pi = conditional_success_prob(study.control_exposure,
                                             study.treatment_exposure, gamma);
  const PmfVector pmf = binomial_pmf(study.event_total(), pi);
  double c = pmf.tail_above(study.treatment_events);
  if (half_corrected) c += 0.5 * pmf.at(study.treatment_events);
  return c;
}

ConfidenceDistribution per_study_cd(const StudyTable& study,
                                    std::span<const double> grid,
                                    bool half_corrected) {
  ConfidenceDistribution cd;
  cd.param_name = "gamma";
  cd.grid.assign(grid.begin(), grid.end());
  cd.values.reserve(grid.size());
  for (double g : grid)
    cd.values.push_back(per_study_cd_value(study, g, half_corrected));
  cd.method = CdMethod::per_study;
  cd.half_corrected = half_corrected;
  cd.informative = study.event_total() > 0;
  return cd;
}

double combined_cd_value(const StudySet& set, double gamma,
                         bool half_corrected) {
  const auto laws = conditional_laws(set, gamma);
  const PmfVector pmf = poisson_binomial_pmf(laws);
  const std::int64_t b_obs = set.total_treatment_events();
  double c = pmf.tail_above(b_obs);
  if (half_corrected) c += 0.5 * pmf.at(b_obs);
  return c;
}

ConfidenceDistribution combined_optimal_cd(const StudySet& set,
                                           std::span<const double> grid,
                                           bool half_corrected) {
  require_some_events(set);
  ConfidenceDistribution cd;
  cd.param_name = "gamma";
  cd.grid.assign(grid.begin(), grid.end());
  cd.values.reserve(grid.size());
  for (double g : grid)
    cd.values.push_back(combined_cd_value(set, g, half_corrected));
  cd.method = CdMethod::optimal;
  cd.half_corrected = half_corrected;
  return cd;
}

double profile_loglik(const StudySet& set, double gamma) {
  if (!(gamma > 0.0)) throw std::domain_error("gamma must be positive");
  double ll = 0.0;
  for (const auto& s : set.studies()) {
    const double y1 = static_cast<double>(s.treatment_events);
    const double z = static_cast<double>(s.event_total());
    if (y1 > 0.0) ll += y1 * std::log(gamma);
    ll -= z * std::log(s.control_exposure + s.treatment_exposure * gamma);
  }
  return ll;
}

FixedEffectFit mcl_estimate(const StudySet& set) {
  require_some_events(set);

  FixedEffectFit fit;
  fit.b_obs = set.total_treatment_events();
  {
    std::vector<double> e0, e1, y1, z;
    for (const auto& s : set.studies()) {
      e0.push_back(s.control_exposure);
      e1.push_back(s.treatment_exposure);
      y1.push_back(static_cast<double>(s.treatment_events));
      z.push_back(static_cast<double>(s.event_total()));
    }
    fit.loglik_profile = [e0, e1, y1, z](double gamma) {
      if (!(gamma > 0.0)) throw std::domain_error("gamma must be positive");
      double ll = 0.0;
      for (std::size_t i = 0; i < e0.size(); ++i) {
        if (y1[i] > 0.0) ll += y1[i] * std::log(gamma);
        ll -= z[i] * std::log(e0[i] + e1[i] * gamma);
      }
      return ll;
    };
  }

  if (set.total_treatment_events() == 0) {
    fit.boundary = FitBoundary::at_zero;
    return fit;
  }
  if (set.total_control_events() == 0) {
    fit.boundary = FitBoundary::at_infinity;
    return fit;
  }

  // Score in u = log(gamma): b_obs - sum_i z_i pi_i(e^u), strictly decreasing.
  const double b = static_cast<double>(fit.b_obs);
  auto score = [&set, b](double u) {
    const double gamma = std::exp(u);
    double mean = 0.0;
    for (const auto& s : set.studies()) {
      mean += static_cast<double>(s.event_total()) *
              conditional_success_prob(s.control_exposure, s.treatment_exposure,
                                       gamma);
    }
    return b - mean;
  };

  double lo = 0.0, hi = 0.0;
  double step = 1.0;
  while (score(lo) <= 0.0) lo -= step, step *= 2.0;
  step = 1.0;
  while (score(hi) >= 0.0) hi += step, step *= 2.0;
  const double u_hat = detail::find_root(score, lo, hi);
  fit.gamma_hat = std::exp(u_hat);

  // Analytic curvature of the profile log-likelihood at the root.
  double j = 0.0;
  for (const auto& s : set.studies()) {
    const double denom =
        s.control_exposure + s.treatment_exposure * fit.gamma_hat;
    j += static_cast<double>(s.treatment_events) /
             (fit.gamma_hat * fit.gamma_hat) -
         static_cast<double>(s.event_total()) * s.treatment_exposure *
             s.treatment_exposure / (denom * denom);
  }
  fit.j_hat = j;
  if (!(fit.j_hat > 0.0))
    throw NumericError("profile curvature at the estimate is not positive");

  fit.lambda_hats.reserve(set.size());
  for (const auto& s : set.studies()) {
    fit.lambda_hats.push_back(
        static_cast<double>(s.event_total()) /
        (s.control_exposure + s.treatment_exposure * fit.gamma_hat));
  }
  return fit;
}

ConfidenceDistribution approx_normal_cd(const FixedEffectFit& fit,
                                        std::span<const double> grid) {
  if (!fit.interior())
    throw NumericError(
        "estimate at the parameter boundary; use the exact combined CD");
  ConfidenceDistribution cd;
  cd.param_name = "gamma";
  cd.grid.assign(grid.begin(), grid.end());
  cd.values.reserve(grid.size());
  const double scale = std::sqrt(fit.j_hat);
  for (double g : grid)
    cd.values.push_back(normal_cdf((g - fit.gamma_hat) * scale));
  cd.method = CdMethod::normal_approx;
  cd.half_corrected = false;
  return cd;
}

ConfidenceCurve profile_deviance_cc(const StudySet& set,
                                    std::span<const double> grid) {
  const FixedEffectFit fit = mcl_estimate(set);
  if (!fit.interior())
    throw NumericError(
        "estimate at the parameter boundary; deviance curve undefined");
  const double l_max = profile_loglik(set, fit.gamma_hat);

  ConfidenceCurve cc;
  cc.param_name = "gamma";
  cc.grid.assign(grid.begin(), grid.end());
  cc.cc_values.reserve(grid.size());
  for (double g : grid) {
    double dev = 2.0 * (l_max - profile_loglik(set, g));
    if (dev < 0.0) {
      if (dev < -1e-8)
        throw std::logic_error("negative profile deviance; root finder bug");
      dev = 0.0;
    }
    cc.cc_values.push_back(chi2_1_cdf(dev));
  }
  cc.source = CcSource::from_deviance;
  return cc;
}

}  // namespace metacd
