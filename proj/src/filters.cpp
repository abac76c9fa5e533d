#include "cdkf/filters.hpp"

#include <chrono>
#include <limits>

#include "cdkf/error.hpp"
#include "cdkf/measurement_update.hpp"
#include "cdkf/time_update.hpp"

namespace cdkf {

std::string_view to_string(Family f) {
  switch (f) {
    case Family::EkfBaseline: return "ekf-baseline";
    case Family::EkfUkf: return "ekf-ukf";
    case Family::Ekf5dckf: return "ekf-5dckf";
  }
  return "?";
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Conventional: return "conventional";
    case Variant::SrOneSweep: return "sr-onesweep";
    case Variant::SrJoseph: return "sr-joseph";
  }
  return "?";
}

std::string FilterSpec::label() const {
  return std::string(to_string(family)) + ":" + std::string(to_string(variant));
}

void FilterSpec::validate() const {
  if (family == Family::EkfBaseline && variant != Variant::Conventional) {
    throw Error(ErrorKind::InvalidArgument,
                "filter '" + label() + "': the EKF baseline has only a conventional form");
  }
}

FilterSpec FilterSpec::parse(const std::string& token) {
  const auto colon = token.find(':');
  const std::string family = token.substr(0, colon);
  const std::string variant = colon == std::string::npos ? "conventional" : token.substr(colon + 1);

  FilterSpec spec;
  if (family == "ekf-baseline" || family == "ekf") {
    spec.family = Family::EkfBaseline;
  } else if (family == "ekf-ukf") {
    spec.family = Family::EkfUkf;
  } else if (family == "ekf-5dckf") {
    spec.family = Family::Ekf5dckf;
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown filter token '" + token + "'");
  }
  if (variant == "conventional") {
    spec.variant = Variant::Conventional;
  } else if (variant == "sr-onesweep") {
    spec.variant = Variant::SrOneSweep;
  } else if (variant == "sr-joseph") {
    spec.variant = Variant::SrJoseph;
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown filter token '" + token + "'");
  }
  try {
    spec.validate();
  } catch (const Error&) {
    throw Error(ErrorKind::InvalidArgument, "unknown filter token '" + token + "'");
  }
  return spec;
}

std::optional<SigmaRule> make_rule(const FilterSpec& spec, int n) {
  switch (spec.family) {
    case Family::EkfBaseline: return std::nullopt;
    case Family::EkfUkf: return make_ukf_rule(n, spec.ukf.value_or(UkfParams::classical(n)));
    case Family::Ekf5dckf: return make_5dckf_rule(n);
  }
  return std::nullopt;
}

FilterTrace run_filter(const FilterSpec& spec, const SimulatedDataset& data,
                       const Scenario& scenario, const RunOptions& options) {
  spec.validate();
  const int n = scenario.process.n;
  const std::optional<SigmaRule> rule = make_rule(spec, n);
  const bool square_root = spec.variant != Variant::Conventional;

  FilterTrace trace;
  trace.means.reserve(data.size());
  trace.status.reserve(data.size());

  const auto start = std::chrono::steady_clock::now();
  GaussianBelief belief = scenario.initial;
  SqrtGaussianBelief sqrt_belief;
  std::size_t k = 0;
  try {
    if (square_root) sqrt_belief = SqrtGaussianBelief::from_full(belief);
    double t_prev = 0.0;
    for (; k < data.size(); ++k) {
      const double t = data.times[k];
      const Vector& z = data.measurements[k];
      const bool observed = z.allFinite();
      const int index = static_cast<int>(k) + 1;
      if (square_root) {
        sqrt_belief = tu_ekf_sqrt(sqrt_belief, scenario.process, t_prev, t, spec.tol);
        if (observed) {
          sqrt_belief = spec.variant == Variant::SrOneSweep
                            ? mu_sqrt_onesweep(sqrt_belief, z, index, scenario.measurement, *rule).posterior
                            : mu_sqrt_joseph(sqrt_belief, z, index, scenario.measurement, *rule).posterior;
        }
        trace.means.push_back(sqrt_belief.mean);
        if (options.record_covariances) trace.covariances.push_back(sqrt_belief.to_full().cov);
      } else {
        belief = tu_ekf(belief, scenario.process, t_prev, t, spec.tol);
        if (observed) {
          belief = rule ? mu_conventional(belief, z, index, scenario.measurement, *rule).posterior
                        : mu_ekf_linearized(belief, z, index, scenario.measurement).posterior;
        }
        trace.means.push_back(belief.mean);
        if (options.record_covariances) trace.covariances.push_back(belief.cov);
      }
      trace.status.push_back(StepStatus::Ok);
      t_prev = t;
    }
  } catch (const Error& e) {
    trace.failed_step = k;
    trace.failure = e.what();
    const Vector nan = Vector::Constant(n, std::numeric_limits<double>::quiet_NaN());
    for (; k < data.size(); ++k) {
      if (trace.means.size() > k) trace.means.resize(k);
      trace.means.push_back(nan);
      if (options.record_covariances) {
        trace.covariances.resize(k);
        trace.covariances.push_back(Matrix::Constant(n, n, std::numeric_limits<double>::quiet_NaN()));
      }
      trace.status.push_back(StepStatus::Failed);
    }
  }
  trace.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return trace;
}

}  // namespace cdkf
