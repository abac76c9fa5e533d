#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cdkf/filters.hpp"
#include "cdkf/models.hpp"

namespace cdkf {

/// Runs whose position ARMSE exceeds this (m) count as failed.
inline constexpr double kFailureArmseP = 500.0;

/// Worker cap for Monte Carlo runs.
inline constexpr const char* kThreadsEnvVar = "CDKF_THREADS";

enum class Experiment { Gauss, Glint, Illcond };

std::string_view to_string(Experiment e);
/// Throws InvalidArgument for unknown names.
Experiment parse_experiment(const std::string& name);

struct ExperimentConfig {
  Experiment experiment = Experiment::Gauss;
  double delta_s = 1.0;     // sampling period Δ
  double ill_delta = 0.0;   // δ of the ill-conditioned measurement (illcond only)
  int runs = 100;
  std::uint64_t seed = 1;
  double tol = 1e-4;        // ε_g, used as both absolute and relative tolerance
  double em_step_s = 1e-3;
  double horizon_s = 150.0;
  std::vector<FilterSpec> filters;

  int steps() const;
  Scenario scenario() const;
  /// Throws InvalidArgument describing the first invalid field.
  void validate() const;
};

struct ArmseResult {
  double position = 0.0;  // m
  double velocity = 0.0;  // m/s
  bool failed = false;
};

/// ARMSE_p = √( Σ_runs Σ_k |pos − p̂os|² / (M·K) ), ARMSE_v likewise over the
/// velocity components. A run with any failed step makes both +∞ and the
/// result failed; ARMSE_p > 500 m also marks it failed.
/// Throws LengthMismatch when traces and datasets do not line up.
ArmseResult compute_armse(std::span<const FilterTrace> traces,
                          std::span<const SimulatedDataset> truths);

/// One aggregated (configuration, filter) cell.
struct RunResult {
  std::string experiment;
  std::string filter;   // family
  std::string variant;
  double delta_s = 0.0;
  double delta_ill = 0.0;
  int runs = 0;
  std::uint64_t seed = 0;
  double tol = 0.0;
  double armse_p = 0.0;
  double armse_v = 0.0;
  bool failed = false;
  double cpu_s = 0.0;   // mean filtering wall time per run

  std::string label() const { return filter + ":" + variant; }
  friend bool operator==(const RunResult&, const RunResult&) = default;
};

struct MonteCarloResult {
  std::vector<RunResult> cells;  // one per filter, in cfg.filters order
  std::vector<std::uint64_t> digests;  // dataset digest per run
  /// True when every filter of a run saw a byte-identical dataset.
  bool paired = true;
};

/// Run r simulates its dataset with seed + r; every filter processes that same
/// dataset. Runs execute on up to CDKF_THREADS workers; aggregation happens in
/// run order, so results do not depend on scheduling.
MonteCarloResult monte_carlo(const ExperimentConfig& cfg);

/// monte_carlo over a list of sampling periods.
std::vector<RunResult> sweep_delta(ExperimentConfig cfg, const std::vector<double>& deltas);

struct Breakdown {
  std::string label;
  /// Largest δ at which the variant failed; nullopt if it never failed.
  std::optional<double> delta;
  /// False when a success follows a failure at smaller δ.
  bool monotone = true;
};

struct IllcondSweep {
  std::vector<RunResult> cells;
  std::vector<Breakdown> breakdowns;  // one per filter
};

/// Ill-conditioned measurement experiment repeated for each δ (descending).
IllcondSweep sweep_illcond(ExperimentConfig cfg, const std::vector<double>& ill_deltas);

std::vector<Breakdown> find_breakdowns(const std::vector<RunResult>& cells);

/// Parses "a:b" as the decades a, a/10, …, b (e.g. "1e-1:1e-14") or a
/// comma-separated list. Throws InvalidArgument.
std::vector<double> parse_value_list(const std::string& text);

unsigned worker_count();

// Output formats -------------------------------------------------------------

inline constexpr const char* kResultsCsvHeader =
    "experiment,filter,variant,delta_s,deltaIll,runs,seed,tol,armse_p_m,armse_v_mps,failed,cpu_s";

void write_results_csv(const std::vector<RunResult>& results, const std::filesystem::path& path);
std::vector<RunResult> read_results_csv(const std::filesystem::path& path);

enum class SweepAxis { SamplingPeriod, IllConditioning };

/// ARMSE_p (log scale) against the sweep variable, one polyline per filter
/// label, with an × marker at each breakdown.
std::string render_sweep_svg(const std::vector<RunResult>& results, SweepAxis axis,
                             const std::string& title);
void write_sweep_svg(const std::vector<RunResult>& results, SweepAxis axis, const std::string& title,
                     const std::filesystem::path& path);

void write_config_manifest(const ExperimentConfig& cfg, const std::string& command,
                           const std::vector<double>& sweep_values,
                           const std::filesystem::path& path);

}  // namespace cdkf
