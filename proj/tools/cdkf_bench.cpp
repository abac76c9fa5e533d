// Monte Carlo benchmark driver for the continuous-discrete filters.
//
//   cdkf_bench simulate      --experiment gauss --delta 1 --seed 3 --out-dir data
//   cdkf_bench run           --experiment glint --runs 100 --filters ekf,ekf-ukf:sr-joseph
//   cdkf_bench sweep-delta   --deltas 1,2,5,10,12 --runs 20
//   cdkf_bench sweep-illcond --deltas 1e-1:1e-14 --runs 20
//
// Exit status: 0 success, 1 configuration error, 2 I/O error.

#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cdkf/bench.hpp"
#include "cdkf/error.hpp"

namespace fs = std::filesystem;
using namespace cdkf;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr double kPaperEmStep = 5e-4;

const char* kAllFilters =
    "ekf-baseline,ekf-ukf:conventional,ekf-ukf:sr-onesweep,ekf-ukf:sr-joseph,"
    "ekf-5dckf:conventional,ekf-5dckf:sr-onesweep,ekf-5dckf:sr-joseph";

struct Options {
  std::string experiment = "gauss";
  double delta = 1.0;
  double ill_delta = 0.0;
  std::string deltas;
  int runs = 100;
  std::uint64_t seed = 1;
  double tol = 1e-4;
  double em_step = 1e-3;
  bool paper_exact = false;
  std::string filters = kAllFilters;
  std::string out_dir = ".";
  double horizon = 150.0;
};

/// Configuration problems that carry the flag they came from.
struct ConfigError {
  std::string message;
};

std::vector<FilterSpec> parse_filters(const std::string& list) {
  std::vector<FilterSpec> out;
  std::stringstream ss(list);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    try {
      FilterSpec spec = FilterSpec::parse(token);
      spec.validate();
      out.push_back(spec);
    } catch (const Error& e) {
      throw ConfigError{"--filters: " + std::string(e.what())};
    }
  }
  if (out.empty()) throw ConfigError{"--filters: no filter tokens given"};
  return out;
}

std::vector<double> parse_list(const std::string& text, const std::string& fallback) {
  try {
    return parse_value_list(text.empty() ? fallback : text);
  } catch (const Error& e) {
    throw ConfigError{"--deltas: " + std::string(e.what())};
  }
}

ExperimentConfig make_config(const Options& o) {
  ExperimentConfig cfg;
  try {
    cfg.experiment = parse_experiment(o.experiment);
  } catch (const Error& e) {
    throw ConfigError{"--experiment: " + std::string(e.what())};
  }
  cfg.delta_s = o.delta;
  cfg.ill_delta = o.ill_delta;
  cfg.runs = o.runs;
  cfg.seed = o.seed;
  cfg.tol = o.tol;
  cfg.em_step_s = o.paper_exact ? kPaperEmStep : o.em_step;
  cfg.horizon_s = o.horizon;
  cfg.filters = parse_filters(o.filters);
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw ConfigError{e.what()};
  }
}

void print_cells(const std::vector<RunResult>& cells) {
  std::printf("%-10s %-26s %8s %10s %12s %12s %8s %9s\n", "experiment", "filter", "delta_s",
              "deltaIll", "armse_p_m", "armse_v_mps", "failed", "cpu_s");
  for (const RunResult& r : cells) {
    std::printf("%-10s %-26s %8.3g %10.3g %12.5g %12.5g %8s %9.4f\n", r.experiment.c_str(),
                r.label().c_str(), r.delta_s, r.delta_ill, r.armse_p, r.armse_v,
                r.failed ? "yes" : "no", r.cpu_s);
  }
}

int cmd_simulate(const Options& o) {
  ExperimentConfig cfg = make_config(o);
  validate(cfg);
  const fs::path dir(o.out_dir);
  const SimulatedDataset data =
      simulate_dataset(cfg.scenario(), cfg.delta_s, cfg.steps(), cfg.em_step_s, cfg.seed);
  write_dataset(data, dir / "dataset.csv", dir / "dataset.json");
  std::printf("wrote %zu samples to %s (digest %016llx)\n", data.size(),
              (dir / "dataset.csv").string().c_str(),
              static_cast<unsigned long long>(dataset_digest(data)));
  return 0;
}

int cmd_run(const Options& o) {
  ExperimentConfig cfg = make_config(o);
  validate(cfg);
  const fs::path dir(o.out_dir);
  const MonteCarloResult mc = monte_carlo(cfg);
  if (!mc.paired) std::fprintf(stderr, "warning: filters did not consume identical datasets\n");
  write_results_csv(mc.cells, dir / "results.csv");
  write_config_manifest(cfg, "run", {}, dir / "manifest.json");
  print_cells(mc.cells);
  return 0;
}

int cmd_sweep_delta(const Options& o) {
  ExperimentConfig cfg = make_config(o);
  if (cfg.experiment == Experiment::Illcond) throw ConfigError{"--experiment: sweep-delta needs gauss or glint"};
  const std::vector<double> deltas = parse_list(o.deltas, "1,2,3,4,5,6,7,8,9,10,11,12");
  for (double d : deltas) {
    cfg.delta_s = d;
    validate(cfg);
  }
  const fs::path dir(o.out_dir);
  const std::vector<RunResult> cells = sweep_delta(cfg, deltas);
  write_results_csv(cells, dir / "sweep_delta.csv");
  write_sweep_svg(cells, SweepAxis::SamplingPeriod,
                  "ARMSE vs sampling period (" + std::string(to_string(cfg.experiment)) + ")",
                  dir / "sweep_delta.svg");
  write_config_manifest(cfg, "sweep-delta", deltas, dir / "manifest.json");
  print_cells(cells);
  return 0;
}

int cmd_sweep_illcond(const Options& o) {
  ExperimentConfig cfg = make_config(o);
  cfg.experiment = Experiment::Illcond;
  const std::vector<double> ill_deltas = parse_list(o.deltas, "1e-1:1e-14");
  for (double d : ill_deltas) {
    cfg.ill_delta = d;
    validate(cfg);
  }
  const fs::path dir(o.out_dir);
  const IllcondSweep sweep = sweep_illcond(cfg, ill_deltas);
  write_results_csv(sweep.cells, dir / "sweep_illcond.csv");
  write_sweep_svg(sweep.cells, SweepAxis::IllConditioning, "ARMSE vs ill-conditioning delta",
                  dir / "sweep_illcond.svg");
  write_config_manifest(cfg, "sweep-illcond", ill_deltas, dir / "manifest.json");
  print_cells(sweep.cells);
  std::printf("\n%-26s %12s %s\n", "filter", "breakdown", "monotone");
  for (const Breakdown& b : sweep.breakdowns) {
    std::printf("%-26s %12s %s\n", b.label.c_str(),
                b.delta ? (std::ostringstream() << std::setprecision(3) << *b.delta).str().c_str()
                        : "none",
                b.monotone ? "yes" : "NO (success after failure)");
  }
  return 0;
}

void add_common(CLI::App* cmd, Options& o, bool sweep) {
  cmd->add_option("--experiment", o.experiment, "gauss | glint | illcond")->capture_default_str();
  cmd->add_option("--delta", o.delta, "sampling period (s)")->capture_default_str();
  cmd->add_option("--ill-delta", o.ill_delta, "ill-conditioning parameter (illcond only)");
  if (sweep) cmd->add_option("--deltas", o.deltas, "comma list, or decade range a:b (e.g. 1e-1:1e-14)");
  cmd->add_option("--seed", o.seed, "base seed; run r uses seed + r")->capture_default_str();
  cmd->add_option("--horizon", o.horizon, "simulated time span (s)")->capture_default_str();
  auto* em = cmd->add_option("--em-step", o.em_step, "Euler-Maruyama step (s)")->capture_default_str();
  cmd->add_flag("--paper-exact", o.paper_exact, "use the 5e-4 s Euler-Maruyama step")->excludes(em);
  cmd->add_option("--out-dir", o.out_dir, "output directory")->capture_default_str();
}

void add_filtering(CLI::App* cmd, Options& o) {
  cmd->add_option("--runs", o.runs, "Monte Carlo runs")->capture_default_str();
  cmd->add_option("--tol", o.tol, "ODE absolute and relative tolerance")->capture_default_str();
  cmd->add_option("--filters", o.filters, "comma-separated family:variant tokens");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous-discrete Kalman filter Monte Carlo benchmark"};
  app.require_subcommand(1);
  Options o;

  auto* simulate = app.add_subcommand("simulate", "simulate one dataset and write CSV + JSON");
  add_common(simulate, o, false);
  auto* run = app.add_subcommand("run", "Monte Carlo ARMSE for one configuration");
  add_common(run, o, false);
  add_filtering(run, o);
  auto* sweep_d = app.add_subcommand("sweep-delta", "ARMSE over a list of sampling periods");
  add_common(sweep_d, o, true);
  add_filtering(sweep_d, o);
  auto* sweep_i = app.add_subcommand("sweep-illcond", "ARMSE and breakdown over ill-conditioning deltas");
  add_common(sweep_i, o, true);
  add_filtering(sweep_i, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (*simulate) return cmd_simulate(o);
    if (*run) return cmd_run(o);
    if (*sweep_d) return cmd_sweep_delta(o);
    return cmd_sweep_illcond(o);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.message << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::Io ? kExitIo : kExitConfig;
  }
}
