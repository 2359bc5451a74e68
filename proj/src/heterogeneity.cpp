#include "metacd/heterogeneity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "metacd/dist_kernels.hpp"
#include "metacd/errors.hpp"
#include "solvers.hpp"

namespace metacd {

namespace {

constexpr double kQminBracketLo = 1e-6;
constexpr double kQminBracketHi = 1e6;

// Exposures and counts of the studies that actually carry information.
struct CondStudy {
  double e0, e1;
  std::int64_t z;
  std::int64_t y1;
};

std::vector<CondStudy> informative_studies(const StudySet& set) {
  std::vector<CondStudy> out;
  for (const auto& s : set.studies()) {
    if (s.event_total() > 0)
      out.push_back({s.control_exposure, s.treatment_exposure, s.event_total(),
                     s.treatment_events});
  }
  return out;
}

double pearson_q(const std::vector<CondStudy>& studies,
                 std::span<const std::int64_t> y, double gamma0) {
  double q = 0.0;
  for (std::size_t i = 0; i < studies.size(); ++i) {
    const auto& s = studies[i];
    const double f = conditional_success_prob(s.e0, s.e1, gamma0);
    const double zf = static_cast<double>(s.z) * f;
    const double resid = static_cast<double>(y[i]) - zf;
    q += resid * resid / (zf * (1.0 - f));
  }
  return q;
}

QMinResult minimize_q(const std::vector<CondStudy>& studies,
                      std::span<const std::int64_t> y) {
  auto objective = [&](double u) { return pearson_q(studies, y, std::exp(u)); };
  auto [u, q] = detail::minimize_scalar(objective, std::log(kQminBracketLo),
                                        std::log(kQminBracketHi), 45);
  return {q, std::exp(u)};
}

double log_binomial_pmf(std::int64_t z, double p, std::int64_t y) {
  return log_choose(z, y) + static_cast<double>(y) * std::log(p) +
         static_cast<double>(z - y) * std::log1p(-p);
}

// Inner profile over kappa at fixed gamma0; returns (kappa_hat, value).
std::pair<double, double> max_over_kappa(const StudySet& set, double gamma0,
                                         double kappa_max) {
  const double at_zero = marginal_loglik(set, gamma0, 0.0);
  if (kappa_max <= 0.0) return {0.0, at_zero};
  auto [k, val] = detail::maximize_scalar(
      [&](double kappa) { return marginal_loglik(set, gamma0, kappa); }, 0.0,
      kappa_max, 45);
  const double at_max = marginal_loglik(set, gamma0, kappa_max);
  std::pair<double, double> best{k, val};
  if (at_zero >= best.second) best = {0.0, at_zero};
  if (at_max > best.second) best = {kappa_max, at_max};
  return best;
}

}  // namespace

PairwiseStats pairwise_stats(const StudySet& set, std::size_t i, std::size_t j) {
  if (i == j) throw InputError("pairwise comparison needs two distinct studies");
  if (i >= set.size() || j >= set.size())
    throw InputError("study index out of range");
  const StudyTable& a = set[i];
  const StudyTable& b = set[j];
  PairwiseStats st;
  st.w = a.treatment_events + b.treatment_events;
  st.z1 = a.event_total();
  st.z2 = b.event_total();
  st.r = (a.control_exposure * b.treatment_exposure) /
         (a.treatment_exposure * b.control_exposure);
  st.y12_obs = b.treatment_events;
  return st;
}

ConfidenceDistribution pairwise_delta_cd(const StudySet& set, std::size_t i,
                                         std::size_t j,
                                         std::span<const double> grid,
                                         bool half_corrected) {
  const PairwiseStats st = pairwise_stats(set, i, j);
  if (st.w < 1) {
    throw InputError("studies '" + set[i].id + "' and '" + set[j].id +
                     "': no treatment events in either study; delta CD undefined");
  }
  ConfidenceDistribution cd;
  cd.param_name = "delta";
  cd.grid.assign(grid.begin(), grid.end());
  cd.values.reserve(grid.size());
  for (double delta : grid) {
    const PmfVector pmf =
        noncentral_hypergeom_pmf(st.w, st.z1, st.z2, st.r, delta);
    double c = pmf.tail_above(st.y12_obs);
    if (half_corrected) c += 0.5 * pmf.at(st.y12_obs);
    cd.values.push_back(c);
  }
  cd.method = CdMethod::optimal;
  cd.half_corrected = half_corrected;
  return cd;
}

double marginal_loglik(const StudySet& set, double gamma0, double kappa) {
  if (!(gamma0 > 0.0)) throw std::domain_error("gamma0 must be positive");
  if (!(kappa >= 0.0 && kappa < 1.0))
    throw std::domain_error("kappa must lie in [0, 1)");
  double ll = 0.0;
  for (const auto& s : set.studies()) {
    const std::int64_t z = s.event_total();
    if (z == 0) continue;  // a single point has likelihood 1
    const double pi0 = conditional_success_prob(s.control_exposure,
                                                s.treatment_exposure, gamma0);
    if (kappa == 0.0) {
      ll += log_binomial_pmf(z, pi0, s.treatment_events);
    } else {
      const double tau = 1.0 / kappa - 1.0;
      ll += std::log(beta_binomial_pmf(z, tau, pi0, s.treatment_events));
    }
  }
  return ll;
}

RandomEffectsFit fit_random_effects(const StudySet& set, double kappa_max) {
  if (!(kappa_max >= 0.0 && kappa_max < 1.0))
    throw InputError("kappa_max must lie in [0, 1)");
  const auto grid = make_grid({0.02, 50.0, 160, true});

  std::size_t best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = max_over_kappa(set, grid[i], kappa_max).second;
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  if (best == 0 || best + 1 == grid.size())
    throw NumericError(
        "random-effects likelihood maximized at the search boundary");

  auto profile = [&](double u) {
    return max_over_kappa(set, std::exp(u), kappa_max).second;
  };
  auto [u_hat, l_max] = detail::maximize_scalar(
      profile, std::log(grid[best - 1]), std::log(grid[best + 1]), 48);

  RandomEffectsFit fit;
  fit.gamma0_hat = std::exp(u_hat);
  fit.max_loglik = l_max;
  fit.kappa_hat = max_over_kappa(set, fit.gamma0_hat, kappa_max).first;
  fit.tau_hat = fit.kappa_hat > 0.0
                    ? 1.0 / fit.kappa_hat - 1.0
                    : std::numeric_limits<double>::infinity();
  std::vector<StudyTable> studies = set.studies();
  const double divisor = set.divisor();
  fit.marginal_loglik = [studies, divisor](double g0, double kappa) {
    return metacd::marginal_loglik(StudySet(studies, divisor), g0, kappa);
  };
  return fit;
}

ConfidenceCurve gamma0_profile_cc(const StudySet& set,
                                  std::span<const double> grid,
                                  double kappa_max) {
  std::size_t informative = 0;
  for (const auto& s : set.studies())
    if (s.event_total() > 0) ++informative;
  if (informative < 2)
    throw InputError("gamma0 profile needs at least two studies with events");

  std::vector<double> prof(grid.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    prof[i] = max_over_kappa(set, grid[i], kappa_max).second;
    if (prof[i] > prof[best]) best = i;
  }

  // Refine the maximum between the neighbours of the best grid point.
  double l_max = prof[best];
  const double lo = best > 0 ? grid[best - 1] : grid[best];
  const double hi = best + 1 < grid.size() ? grid[best + 1] : grid[best];
  if (lo < hi) {
    auto [u_hat, l_ref] = detail::maximize_scalar(
        [&](double u) { return max_over_kappa(set, std::exp(u), kappa_max).second; },
        std::log(lo), std::log(hi), 48);
    (void)u_hat;
    l_max = std::max(l_max, l_ref);
  }

  ConfidenceCurve cc;
  cc.param_name = "gamma0";
  cc.grid.assign(grid.begin(), grid.end());
  cc.cc_values.reserve(grid.size());
  for (double v : prof) {
    double dev = 2.0 * (l_max - v);
    if (dev < 0.0) {
      if (dev < -1e-8)
        throw std::logic_error("negative profile deviance for gamma0");
      dev = 0.0;
    }
    cc.cc_values.push_back(chi2_1_cdf(dev));
  }
  cc.source = CcSource::from_deviance;
  return cc;
}

QMinResult q_min(const StudySet& set) {
  const auto studies = informative_studies(set);
  if (studies.empty())
    throw InputError("no events in any study; Q statistic undefined");
  std::vector<std::int64_t> y;
  y.reserve(studies.size());
  for (const auto& s : studies) y.push_back(s.y1);
  return minimize_q(studies, y);
}

std::vector<double> default_kappa_grid() {
  return make_grid({0.0, 0.30, 61, false});
}

std::int64_t sample_beta_binomial(std::int64_t z, double tau, double pi0,
                                  RngStream& rng) {
  if (z < 0) throw std::domain_error("trial count must be nonnegative");
  if (!(pi0 > 0.0 && pi0 < 1.0))
    throw std::domain_error("mean probability must lie strictly in (0,1)");
  if (!(tau > 0.0)) throw std::domain_error("concentration must be positive");
  if (z == 0) return 0;
  if (std::isinf(tau)) return rng.binomial(z, pi0);
  const double p = rng.beta(tau * pi0, tau * (1.0 - pi0));
  return rng.binomial(z, p);
}

KappaCurveResult kappa_cc(const StudySet& set,
                          std::span<const double> kappa_grid, int replicates,
                          std::uint64_t seed) {
  if (replicates < 1000)
    throw InputError(
        "fewer than 1000 replicates refused: Monte-Carlo error would exceed "
        "reporting precision");
  if (kappa_grid.size() < 2) throw InputError("kappa grid needs >= 2 points");
  for (std::size_t i = 0; i < kappa_grid.size(); ++i) {
    if (!(kappa_grid[i] >= 0.0 && kappa_grid[i] < 1.0))
      throw InputError("kappa grid must lie within [0, 1)");
    if (i > 0 && !(kappa_grid[i] > kappa_grid[i - 1]))
      throw InputError("kappa grid must be strictly increasing");
  }
  if (kappa_grid.front() != 0.0)
    throw InputError("kappa grid must include 0");

  const auto studies = informative_studies(set);
  if (studies.empty())
    throw InputError("no events in any study; kappa curve undefined");

  const RandomEffectsFit fit = fit_random_effects(set);
  const double q_obs = q_min(set).q_obs;

  std::vector<double> pi0(studies.size());
  for (std::size_t i = 0; i < studies.size(); ++i)
    pi0[i] = conditional_success_prob(studies[i].e0, studies[i].e1,
                                      fit.gamma0_hat);

  KappaCurveResult result;
  result.kappa_grid.assign(kappa_grid.begin(), kappa_grid.end());
  result.cd_values.resize(kappa_grid.size());
  result.q_obs = q_obs;
  result.gamma0_hat = fit.gamma0_hat;
  result.replicates = replicates;
  result.seed = seed;

  std::vector<std::int64_t> y(studies.size());
  for (std::size_t g = 0; g < kappa_grid.size(); ++g) {
    const double kappa = kappa_grid[g];
    const double tau = kappa > 0.0 ? 1.0 / kappa - 1.0
                                   : std::numeric_limits<double>::infinity();
    RngStream rng = RngStream::substream(seed, g);
    double count = 0.0;
    for (int rep = 0; rep < replicates; ++rep) {
      for (std::size_t i = 0; i < studies.size(); ++i)
        y[i] = sample_beta_binomial(studies[i].z, tau, pi0[i], rng);
      const double q = minimize_q(studies, y).q_obs;
      if (q > q_obs)
        count += 1.0;
      else if (q == q_obs)
        count += 0.5;
    }
    result.cd_values[g] = count / replicates;
  }

  result.cc_values.reserve(result.cd_values.size());
  for (double c : result.cd_values)
    result.cc_values.push_back(std::fabs(1.0 - 2.0 * c));
  result.point_mass_at_zero = result.cd_values.front();
  return result;
}

ConfidenceCurve KappaCurveResult::curve() const {
  ConfidenceCurve cc;
  cc.param_name = "kappa";
  cc.grid = kappa_grid;
  cc.cc_values = cc_values;
  cc.source = CcSource::simulated;
  cc.domain_inf = 0.0;
  cc.domain_sup = 1.0;
  return cc;
}

}  // namespace metacd
