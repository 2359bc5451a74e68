#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace oracles {

double choose(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0.0;
  double c = 1.0;
  for (std::int64_t i = 1; i <= k; ++i)
    c *= static_cast<double>(n - k + i) / static_cast<double>(i);
  return c;
}

double binom_direct(std::int64_t z, double p, std::int64_t y) {
  if (y < 0 || y > z) return 0.0;
  return choose(z, y) * std::pow(p, static_cast<double>(y)) *
         std::pow(1.0 - p, static_cast<double>(z - y));
}

double enum_combined_cd_value(const std::vector<double>& e0,
                              const std::vector<double>& e1,
                              const std::vector<std::int64_t>& z,
                              std::int64_t b_obs, double gamma,
                              bool half_corrected) {
  const std::size_t k = z.size();
  std::vector<double> pi(k);
  for (std::size_t i = 0; i < k; ++i)
    pi[i] = e1[i] * gamma / (e0[i] + e1[i] * gamma);

  std::vector<std::int64_t> y(k, 0);
  double above = 0.0, at = 0.0;
  for (;;) {
    double prob = 1.0;
    std::int64_t total = 0;
    for (std::size_t i = 0; i < k; ++i) {
      prob *= binom_direct(z[i], pi[i], y[i]);
      total += y[i];
    }
    if (total > b_obs)
      above += prob;
    else if (total == b_obs)
      at += prob;

    std::size_t pos = 0;
    while (pos < k && ++y[pos] > z[pos]) {
      y[pos] = 0;
      ++pos;
    }
    if (pos == k) break;
  }
  return above + (half_corrected ? 0.5 * at : 0.0);
}

std::vector<double> nchg_direct(std::int64_t w, std::int64_t z1,
                                std::int64_t z2, double odds) {
  const std::int64_t lo = std::max<std::int64_t>(0, w - z1);
  const std::int64_t hi = std::min(w, z2);
  std::vector<double> pmf(static_cast<std::size_t>(hi - lo) + 1);
  double total = 0.0;
  for (std::int64_t u = lo; u <= hi; ++u) {
    const double term = choose(z1, w - u) * choose(z2, u) *
                        std::pow(odds, static_cast<double>(u));
    pmf[static_cast<std::size_t>(u - lo)] = term;
    total += term;
  }
  for (double& v : pmf) v /= total;
  return pmf;
}

double beta_binomial_quadrature(std::int64_t z, double tau, double pi0,
                                std::int64_t y, int intervals) {
  const double a = tau * pi0;
  const double b = tau * (1.0 - pi0);
  if (a < 1.0 || b < 1.0)
    throw std::invalid_argument("quadrature oracle needs a, b >= 1");
  const double log_beta_ab =
      std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  auto integrand = [&](double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return binom_direct(z, p, y) *
           std::exp((a - 1.0) * std::log(p) + (b - 1.0) * std::log1p(-p) -
                    log_beta_ab);
  };
  if (intervals % 2 != 0)
    throw std::invalid_argument("Simpson needs an even interval count");
  const double h = 1.0 / intervals;
  double sum = integrand(0.0) + integrand(1.0);
  for (int i = 1; i < intervals; ++i)
    sum += integrand(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

namespace {

double grid_extremum(const std::function<double(double)>& f, double lo,
                     double hi, double step_tol, bool maximize) {
  double a = std::log(lo), b = std::log(hi);
  double best_x = 0.5 * (a + b);
  const int points = 2001;
  for (int stage = 0; stage < 6; ++stage) {
    double best_val = maximize ? -1e300 : 1e300;
    int best_i = 0;
    for (int i = 0; i < points; ++i) {
      const double x = a + (b - a) * i / (points - 1);
      const double v = f(std::exp(x));
      if (maximize ? v > best_val : v < best_val) {
        best_val = v;
        best_i = i;
      }
    }
    const double step = (b - a) / (points - 1);
    best_x = a + step * best_i;
    a = best_x - 2.0 * step;
    b = best_x + 2.0 * step;
    if (step < step_tol) break;
  }
  return std::exp(best_x);
}

}  // namespace

double grid_maximize(const std::function<double(double)>& f, double lo,
                     double hi, double step_tol) {
  return grid_extremum(f, lo, hi, step_tol, true);
}

double grid_minimize_value(const std::function<double(double)>& f, double lo,
                           double hi, double step_tol) {
  const double x = grid_extremum(f, lo, hi, step_tol, false);
  return f(x);
}

}  // namespace oracles
