#include <CLI11.hpp>

#include "metacd/cli.hpp"

namespace {

void add_common_flags(CLI::App* cmd, metacd::RunConfig& config) {
  cmd->add_option("--data", config.data_path, "input CSV path")->required();
  cmd->add_option("--divisor", config.divisor,
                  "exposure divisor (rates are per this many patients)")
      ->capture_default_str();
}

void add_grid_flags(CLI::App* cmd, metacd::RunConfig& config) {
  cmd->add_option("--grid-min", config.grid.min, "grid lower end")
      ->each([&config](const std::string&) { config.grid_min_given = true; });
  cmd->add_option("--grid-max", config.grid.max, "grid upper end")
      ->each([&config](const std::string&) { config.grid_max_given = true; });
  cmd->add_option("--grid-points", config.grid.points, "number of grid points")
      ->each([&config](const std::string&) { config.grid_points_given = true; });
  cmd->add_flag("--grid-log", config.grid.log_spacing, "log-spaced grid");
}

void add_output_flags(CLI::App* cmd, metacd::RunConfig& config) {
  cmd->add_option("--level", config.level, "confidence level")
      ->capture_default_str();
  cmd->add_option("--out", config.out_path,
                  "write the confidence-curve grid CSV here");
  cmd->add_option("--json", config.json_path,
                  "write the JSON summary here (default: stdout)");
  cmd->add_flag("--gnuplot", config.gnuplot,
                "also write a gnuplot script next to --out");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "metacd: confidence distributions for meta-analysis of 2x2 tables "
      "modelled as Poisson pairs"};
  app.require_subcommand(1);

  metacd::RunConfig config;

  auto* fixed = app.add_subcommand(
      "fixed", "confidence curve for the common treatment effect gamma");
  add_common_flags(fixed, config);
  fixed
      ->add_option("--method", config.method,
                   "optimal | per-study | normal | deviance")
      ->capture_default_str();
  fixed->add_option("--studies", config.studies,
                    "study id for --method per-study");
  add_grid_flags(fixed, config);
  add_output_flags(fixed, config);

  auto* pairwise = app.add_subcommand(
      "pairwise", "confidence curve for a treatment-effect ratio delta");
  add_common_flags(pairwise, config);
  pairwise->add_option("--studies", config.studies, "two study ids, e.g. 2,6")
      ->required();
  add_grid_flags(pairwise, config);
  add_output_flags(pairwise, config);

  auto* random = app.add_subcommand(
      "random", "random-effects inference (gamma0 profile or kappa curve)");
  add_common_flags(random, config);
  random->add_option("--target", config.target, "gamma0 | kappa")->required();
  random->add_option("--replicates", config.replicates,
                     "Monte-Carlo replicates per kappa grid point")
      ->capture_default_str();
  random->add_option("--seed", config.seed, "simulation seed")
      ->capture_default_str();
  add_grid_flags(random, config);
  add_output_flags(random, config);

  auto* validate =
      app.add_subcommand("validate", "check a dataset and summarise it");
  add_common_flags(validate, config);
  validate->add_option("--json", config.json_path,
                       "write the JSON summary here (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // flag mistakes are input errors
  }

  if (fixed->parsed()) return metacd::cmd_fixed(config);
  if (pairwise->parsed()) return metacd::cmd_pairwise(config);
  if (random->parsed()) return metacd::cmd_random(config);
  if (validate->parsed()) return metacd::cmd_validate(config);
  return 2;
}
