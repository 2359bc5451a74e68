#include "metacd/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <vector>

#include <json.hpp>

#include "metacd/errors.hpp"
#include "metacd/fixed_effect.hpp"
#include "metacd/heterogeneity.hpp"
#include "metacd/tables.hpp"

namespace metacd {

namespace {

using json = nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

json json_number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

json interval_json(const ConfidenceInterval& ci) {
  json out;
  out["ci_lower"] = json_number_or_null(ci.lower);
  out["ci_lower_open"] = ci.lower_open;
  out["ci_upper"] = json_number_or_null(ci.upper);
  out["ci_upper_open"] = ci.upper_open;
  return out;
}

json grid_json(const GridSpec& g) {
  return json{{"min", g.min},
              {"max", g.max},
              {"points", g.points},
              {"log", g.log_spacing}};
}

void write_cc_csv(const std::string& path, const std::vector<double>& grid,
                  const std::vector<double>& cc, const std::vector<double>& cd) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << "param,confidence_curve,cd_value\n";
  for (std::size_t i = 0; i < grid.size(); ++i)
    out << fmt(grid[i]) << ',' << fmt(cc[i]) << ',' << fmt(cd[i]) << '\n';
}

void write_gnuplot(const std::string& csv_path, const std::string& param,
                   double level, bool log_x) {
  const std::string path = csv_path + ".gp";
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << "set datafile separator ','\n";
  if (log_x) out << "set logscale x\n";
  out << "set xlabel '" << param << "'\n"
      << "set ylabel 'confidence curve'\n"
      << "set yrange [0:1]\n"
      << "plot '" << csv_path << "' skip 1 using 1:2 with lines title 'cc', \\\n"
      << "     " << level << " with lines dashtype 2 title '" << level << "'\n"
      << "pause -1\n";
}

void emit_json(const RunConfig& config, const json& summary) {
  if (config.json_path.empty()) {
    std::cout << summary.dump(2) << '\n';
  } else {
    std::ofstream out(config.json_path);
    if (!out) throw InputError("cannot write '" + config.json_path + "'");
    out << summary.dump(2) << '\n';
  }
}

void emit_curve(const RunConfig& config, const std::vector<double>& grid,
                const std::vector<double>& cc, const std::vector<double>& cd,
                const std::string& param, bool log_x) {
  if (config.out_path.empty()) {
    if (config.gnuplot)
      throw InputError("--gnuplot needs --out to name the CSV it plots");
    return;
  }
  write_cc_csv(config.out_path, grid, cc, cd);
  if (config.gnuplot) write_gnuplot(config.out_path, param, config.level, log_x);
}

json base_summary(const RunConfig& config, const StudySet& set) {
  json out;
  out["data"] = config.data_path;
  out["divisor"] = config.divisor;
  out["k"] = set.size();
  out["level"] = config.level;
  return out;
}

// Signed-root confidence distribution matching a deviance-based curve:
// C = (1 - cc)/2 left of the estimate, (1 + cc)/2 to the right.
std::vector<double> signed_root_cd(const std::vector<double>& grid,
                                   const std::vector<double>& cc,
                                   double estimate) {
  std::vector<double> cd(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    cd[i] = grid[i] < estimate ? 0.5 * (1.0 - cc[i]) : 0.5 * (1.0 + cc[i]);
  }
  return cd;
}

int guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}

std::vector<std::string> split_ids(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty() || !s.empty()) out.push_back(cur);
  return out;
}

const char* boundary_name(FitBoundary b) {
  switch (b) {
    case FitBoundary::at_zero:
      return "gamma_hat = 0";
    case FitBoundary::at_infinity:
      return "gamma_hat = infinity";
    default:
      return "none";
  }
}

}  // namespace

int cmd_fixed(const RunConfig& config) {
  return guarded([&] {
    const StudySet set = load_csv(config.data_path, config.divisor);
    const auto grid = make_grid(config.grid);

    json summary = base_summary(config, set);
    summary["command"] = "fixed";
    summary["method"] = config.method;
    summary["grid"] = grid_json(config.grid);
    summary["b_obs"] = set.total_treatment_events();

    ConfidenceCurve cc;
    std::vector<double> cd_column;

    if (config.method == "optimal" || config.method == "per-study") {
      ConfidenceDistribution cd;
      if (config.method == "optimal") {
        cd = combined_optimal_cd(set, grid);
      } else {
        std::size_t idx = 0;
        if (!config.studies.empty()) {
          const auto ids = split_ids(config.studies);
          if (ids.size() != 1)
            throw InputError("--method per-study takes one study id");
          idx = set.index_of(ids[0]);
        } else if (set.size() != 1) {
          throw InputError("--method per-study needs --studies ID");
        }
        cd = per_study_cd(set[idx], grid);
        summary["study"] = set[idx].id;
        if (!cd.informative) summary["warning"] = "study has no events";
      }
      cc = cc_from_cd(cd);
      cd_column = cd.values;
      const auto med = median_estimate(cd);
      summary["estimate_kind"] = "median";
      summary["estimate"] = med ? json(*med) : json(nullptr);
      summary["boundary"] = "none";
    } else if (config.method == "normal" || config.method == "deviance") {
      const FixedEffectFit fit = mcl_estimate(set);
      summary["estimate_kind"] = "mcl";
      summary["boundary"] = boundary_name(fit.boundary);
      if (!fit.interior()) {
        summary["estimate"] = nullptr;
        summary["ci_lower"] = nullptr;
        summary["ci_upper"] = nullptr;
        emit_json(config, summary);
        return;
      }
      summary["estimate"] = fit.gamma_hat;
      if (config.method == "normal") {
        const ConfidenceDistribution cd = approx_normal_cd(fit, grid);
        cc = cc_from_cd(cd);
        cd_column = cd.values;
        summary["j_hat"] = fit.j_hat;
      } else {
        cc = profile_deviance_cc(set, grid);
        cd_column = signed_root_cd(cc.grid, cc.cc_values, fit.gamma_hat);
      }
    } else {
      throw InputError("unknown method '" + config.method +
                       "' (use optimal, per-study, normal or deviance)");
    }

    const ConfidenceInterval ci = interval_at(cc, config.level);
    summary.update(interval_json(ci));
    emit_curve(config, cc.grid, cc.cc_values, cd_column, "gamma",
               config.grid.log_spacing);
    emit_json(config, summary);
  });
}

int cmd_pairwise(const RunConfig& config) {
  return guarded([&] {
    const StudySet set = load_csv(config.data_path, config.divisor);
    const auto ids = split_ids(config.studies);
    if (ids.size() != 2)
      throw InputError("--studies needs exactly two ids, e.g. --studies 2,6");
    const std::size_t i = set.index_of(ids[0]);
    const std::size_t j = set.index_of(ids[1]);

    const auto grid = make_grid(config.grid);
    const ConfidenceDistribution cd = pairwise_delta_cd(set, i, j, grid);
    const ConfidenceCurve cc = cc_from_cd(cd);
    const ConfidenceInterval ci = interval_at(cc, config.level);
    const auto med = median_estimate(cd);

    json summary = base_summary(config, set);
    summary["command"] = "pairwise";
    summary["studies"] = json::array({set[i].id, set[j].id});
    summary["grid"] = grid_json(config.grid);
    summary["estimate_kind"] = "median";
    summary["estimate"] = med ? json(*med) : json(nullptr);
    summary.update(interval_json(ci));
    emit_curve(config, cc.grid, cc.cc_values, cd.values, "delta",
               config.grid.log_spacing);
    emit_json(config, summary);
  });
}

int cmd_random(const RunConfig& config) {
  return guarded([&] {
    const StudySet set = load_csv(config.data_path, config.divisor);
    json summary = base_summary(config, set);
    summary["command"] = "random";
    summary["target"] = config.target;

    if (config.target == "gamma0") {
      const auto grid = make_grid(config.grid);
      const ConfidenceCurve cc = gamma0_profile_cc(set, grid);
      const RandomEffectsFit fit = fit_random_effects(set);
      const ConfidenceInterval ci = interval_at(cc, config.level);
      summary["grid"] = grid_json(config.grid);
      summary["estimate_kind"] = "profile_max";
      summary["estimate"] = fit.gamma0_hat;
      summary["kappa_hat"] = fit.kappa_hat;
      summary.update(interval_json(ci));
      emit_curve(config, cc.grid, cc.cc_values,
                 signed_root_cd(cc.grid, cc.cc_values, fit.gamma0_hat),
                 "gamma0", config.grid.log_spacing);
      emit_json(config, summary);
    } else if (config.target == "kappa") {
      GridSpec used{0.0, 0.30, 61, false};  // must stay linear from kappa = 0
      if (config.grid_min_given) used.min = config.grid.min;
      if (config.grid_max_given) used.max = config.grid.max;
      if (config.grid_points_given) used.points = config.grid.points;
      const std::vector<double> grid = make_grid(used);
      const KappaCurveResult result =
          kappa_cc(set, grid, config.replicates, config.seed);
      const ConfidenceCurve cc = result.curve();
      const ConfidenceInterval ci = interval_at(cc, config.level);
      const double median =
          result.cd_values.front() >= 0.5
              ? 0.0
              : [&] {
                  ConfidenceDistribution cd;
                  cd.param_name = "kappa";
                  cd.grid = result.kappa_grid;
                  cd.values = result.cd_values;
                  cd.domain_sup = 1.0;
                  const auto med = median_estimate(cd);
                  return med ? *med : std::numeric_limits<double>::quiet_NaN();
                }();
      summary["grid"] = grid_json(used);
      summary["estimate_kind"] = "median";
      summary["estimate"] = json_number_or_null(median);
      summary["point_mass_at_zero"] = result.point_mass_at_zero;
      summary["q_obs"] = result.q_obs;
      summary["gamma0_hat"] = result.gamma0_hat;
      summary["replicates"] = result.replicates;
      summary["seed"] = result.seed;
      summary.update(interval_json(ci));
      emit_curve(config, result.kappa_grid, result.cc_values, result.cd_values,
                 "kappa", false);
      emit_json(config, summary);
    } else {
      throw InputError("unknown target '" + config.target +
                       "' (use gamma0 or kappa)");
    }
  });
}

int cmd_validate(const RunConfig& config) {
  return guarded([&] {
    const StudySet set = load_csv(config.data_path, config.divisor);
    json summary = base_summary(config, set);
    summary["command"] = "validate";
    summary["b_obs"] = set.total_treatment_events();
    summary["control_events"] = set.total_control_events();
    json ids = json::array();
    json no_events = json::array();
    for (const auto& s : set.studies()) {
      ids.push_back(s.id);
      if (s.event_total() == 0) no_events.push_back(s.id);
    }
    summary["studies"] = ids;
    summary["studies_without_events"] = no_events;
    emit_json(config, summary);
  });
}

}  // namespace metacd
