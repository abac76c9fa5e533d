#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cdkf/models.hpp"
#include "cdkf/ode.hpp"
#include "cdkf/sigma_rules.hpp"

namespace cdkf {

enum class Family { EkfBaseline, EkfUkf, Ekf5dckf };
enum class Variant { Conventional, SrOneSweep, SrJoseph };

std::string_view to_string(Family f);
std::string_view to_string(Variant v);

struct FilterSpec {
  Family family = Family::EkfUkf;
  Variant variant = Variant::Conventional;
  /// UKF scaling; classical (α=1, β=0, κ=3−n) when unset.
  std::optional<UkfParams> ukf;
  Tolerances tol = Tolerances::uniform(1e-4);

  /// "family:variant", e.g. "ekf-5dckf:sr-joseph".
  std::string label() const;

  /// Parses "family[:variant]"; variant defaults to conventional.
  /// Throws InvalidArgument naming the offending token.
  static FilterSpec parse(const std::string& token);

  /// Throws InvalidArgument for combinations that do not exist
  /// (the linearized baseline has no square-root form).
  void validate() const;
};

/// Builds the sigma rule a spec needs for state dimension n; nullopt for the
/// linearized baseline.
std::optional<SigmaRule> make_rule(const FilterSpec& spec, int n);

enum class StepStatus { Ok, Failed };

struct FilterTrace {
  std::vector<Vector> means;        // x̂_{k|k}; NaN after a failure
  std::vector<Matrix> covariances;  // P_{k|k}, only when requested
  std::vector<StepStatus> status;
  double seconds = 0.0;
  std::optional<std::size_t> failed_step;
  std::string failure;

  bool failed() const { return failed_step.has_value(); }
};

struct RunOptions {
  bool record_covariances = false;
};

/// Runs a time update over [t_{k−1}, t_k] followed by the matching measurement
/// update for every sample of the dataset. Numerical failures do not throw:
/// the failing step and all later ones are marked failed. Measurements with
/// NaN entries are treated as missing (time update only).
FilterTrace run_filter(const FilterSpec& spec, const SimulatedDataset& data,
                       const Scenario& scenario, const RunOptions& options = {});

}  // namespace cdkf
