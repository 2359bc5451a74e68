#pragma once

#include <cstdint>
#include <string>

#include "metacd/confidence.hpp"

namespace metacd {

/// Everything a CLI run needs; outputs are a pure function of the input
/// file bytes plus these settings.
struct RunConfig {
  std::string data_path;
  double divisor = 100.0;
  std::string method = "optimal";  // optimal | per-study | normal | deviance
  GridSpec grid{0.02, 50.0, 400, true};
  // kappa runs default to a linear grid on [0, 0.30]; only explicitly set
  // grid fields override it
  bool grid_min_given = false;
  bool grid_max_given = false;
  bool grid_points_given = false;
  double level = 0.95;
  std::string studies;  // "I" or "I,J" study ids
  std::string target;   // gamma0 | kappa
  int replicates = 4000;
  std::uint64_t seed = 1;
  std::string out_path;   // CC grid CSV (param,confidence_curve,cd_value)
  std::string json_path;  // summary; stdout when empty
  bool gnuplot = false;
};

int cmd_fixed(const RunConfig& config);
int cmd_pairwise(const RunConfig& config);
int cmd_random(const RunConfig& config);
int cmd_validate(const RunConfig& config);

}  // namespace metacd
