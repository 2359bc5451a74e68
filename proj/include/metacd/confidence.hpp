#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace metacd {

enum class CdMethod { optimal, per_study, normal_approx };
enum class CcSource { from_cd, from_deviance, simulated };

struct GridSpec {
  double min = 0.02;
  double max = 50.0;
  int points = 400;
  bool log_spacing = true;
};

/// Strictly increasing evaluation grid; endpoints are hit exactly.
std::vector<double> make_grid(const GridSpec& spec);

/// Sampled confidence distribution C on an increasing parameter grid.
/// Values are nondecreasing cumulative confidences in [0, 1].
struct ConfidenceDistribution {
  std::string param_name;
  std::vector<double> grid;
  std::vector<double> values;
  CdMethod method = CdMethod::optimal;
  bool half_corrected = true;
  bool informative = true;  // false when the data carry no information (z = 0)
  double domain_inf = 0.0;
  double domain_sup = std::numeric_limits<double>::infinity();
};

/// Confidence curve cc = |1 - 2C|: a funnel whose level-alpha crossings
/// bound the alpha interval and whose minimum marks the median estimate.
struct ConfidenceCurve {
  std::string param_name;
  std::vector<double> grid;
  std::vector<double> cc_values;
  CcSource source = CcSource::from_cd;
  double domain_inf = 0.0;
  double domain_sup = std::numeric_limits<double>::infinity();
};

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  bool lower_open = false;  // true when the curve never crosses on that side
  bool upper_open = false;
  double level = 0.95;
};

ConfidenceCurve cc_from_cd(const ConfidenceDistribution& cd);

/// Equal-tailed interval read off the curve by linear interpolation of the
/// level crossings on each side of the curve minimum. A side with no
/// crossing is reported as the open domain boundary.
ConfidenceInterval interval_at(const ConfidenceCurve& cc, double level);

/// C^{-1}(1/2), or nullopt when the grid does not bracket the median
/// (flat half curve, or all mass outside the grid).
std::optional<double> median_estimate(const ConfidenceDistribution& cd);

}  // namespace metacd
