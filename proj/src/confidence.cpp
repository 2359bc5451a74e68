#include "metacd/confidence.hpp"

#include <algorithm>
#include <cmath>

#include "metacd/errors.hpp"

namespace metacd {

namespace {

constexpr double kFlatTol = 1e-12;

std::size_t min_index(const std::vector<double>& v) {
  return static_cast<std::size_t>(
      std::min_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

std::vector<double> make_grid(const GridSpec& spec) {
  if (!(spec.min < spec.max)) throw InputError("grid min must be below grid max");
  if (spec.points < 2) throw InputError("grid needs at least 2 points");
  if (spec.log_spacing && !(spec.min > 0.0))
    throw InputError("log-spaced grid needs a positive minimum");
  std::vector<double> g(static_cast<std::size_t>(spec.points));
  const int n = spec.points;
  if (spec.log_spacing) {
    const double la = std::log(spec.min), lb = std::log(spec.max);
    for (int i = 0; i < n; ++i)
      g[static_cast<std::size_t>(i)] = std::exp(la + (lb - la) * i / (n - 1));
  } else {
    for (int i = 0; i < n; ++i)
      g[static_cast<std::size_t>(i)] =
          spec.min + (spec.max - spec.min) * i / (n - 1);
  }
  g.front() = spec.min;
  g.back() = spec.max;
  return g;
}

ConfidenceCurve cc_from_cd(const ConfidenceDistribution& cd) {
  ConfidenceCurve cc;
  cc.param_name = cd.param_name;
  cc.grid = cd.grid;
  cc.cc_values.reserve(cd.values.size());
  for (double c : cd.values) cc.cc_values.push_back(std::fabs(1.0 - 2.0 * c));
  cc.source = CcSource::from_cd;
  cc.domain_inf = cd.domain_inf;
  cc.domain_sup = cd.domain_sup;
  return cc;
}

ConfidenceInterval interval_at(const ConfidenceCurve& cc, double level) {
  if (!(level > 0.0 && level < 1.0))
    throw InputError("confidence level must lie strictly between 0 and 1");
  const auto& g = cc.grid;
  const auto& v = cc.cc_values;
  if (g.size() < 2 || g.size() != v.size())
    throw InputError("confidence curve needs matching grid and values");

  const std::size_t imin = min_index(v);
  if (v[imin] > level)
    throw NumericError(
        "requested level lies below the curve minimum; widen the grid");

  // Leftmost and rightmost points of the minimum region.
  std::size_t i0 = imin, i1 = imin;
  while (i0 > 0 && v[i0 - 1] <= v[imin] + kFlatTol) --i0;
  while (i1 + 1 < v.size() && v[i1 + 1] <= v[imin] + kFlatTol) ++i1;

  ConfidenceInterval out;
  out.level = level;

  bool found = false;
  for (std::size_t j = i0; j-- > 0;) {
    if (v[j] >= level && v[j + 1] <= level) {
      const double t = (v[j] - level) / (v[j] - v[j + 1]);
      out.lower = g[j] + t * (g[j + 1] - g[j]);
      out.lower_open = false;
      found = true;
      break;
    }
  }
  if (!found) {
    out.lower = cc.domain_inf;
    out.lower_open = g.front() > cc.domain_inf;
  }

  found = false;
  for (std::size_t j = i1; j + 1 < v.size(); ++j) {
    if (v[j] <= level && v[j + 1] >= level) {
      const double t = (level - v[j]) / (v[j + 1] - v[j]);
      out.upper = g[j] + t * (g[j + 1] - g[j]);
      out.upper_open = false;
      found = true;
      break;
    }
  }
  if (!found) {
    out.upper = cc.domain_sup;
    out.upper_open = g.back() < cc.domain_sup;
  }
  return out;
}

std::optional<double> median_estimate(const ConfidenceDistribution& cd) {
  const auto& g = cd.grid;
  const auto& v = cd.values;
  if (g.size() < 2 || g.size() != v.size())
    throw InputError("confidence distribution needs matching grid and values");
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  if (*hi - *lo < kFlatTol) return std::nullopt;  // uninformative, C flat
  if (v.front() >= 0.5) {
    // All mass at or below the grid start; exact when the grid starts at the
    // domain boundary (point mass), unbracketed otherwise.
    return g.front() <= cd.domain_inf ? std::optional<double>(g.front())
                                      : std::nullopt;
  }
  if (v.back() < 0.5) return std::nullopt;
  for (std::size_t j = 0; j + 1 < v.size(); ++j) {
    if (v[j] < 0.5 && v[j + 1] >= 0.5) {
      const double t = (0.5 - v[j]) / (v[j + 1] - v[j]);
      return g[j] + t * (g[j + 1] - g[j]);
    }
  }
  return std::nullopt;
}

}  // namespace metacd
