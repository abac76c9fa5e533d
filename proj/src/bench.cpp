#include "cdkf/bench.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

#include "cdkf/error.hpp"

namespace cdkf {

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::Gauss: return "gauss";
    case Experiment::Glint: return "glint";
    case Experiment::Illcond: return "illcond";
  }
  return "?";
}

Experiment parse_experiment(const std::string& name) {
  if (name == "gauss") return Experiment::Gauss;
  if (name == "glint") return Experiment::Glint;
  if (name == "illcond") return Experiment::Illcond;
  throw Error(ErrorKind::InvalidArgument, "unknown experiment '" + name + "'");
}

int ExperimentConfig::steps() const {
  return static_cast<int>(std::floor(horizon_s / delta_s * (1.0 + 1e-12)));
}

Scenario ExperimentConfig::scenario() const {
  switch (experiment) {
    case Experiment::Gauss: return radar_scenario(false);
    case Experiment::Glint: return radar_scenario(true);
    case Experiment::Illcond: return illcond_scenario(ill_delta);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown experiment");
}

void ExperimentConfig::validate() const {
  if (runs < 1) throw Error(ErrorKind::InvalidArgument, "--runs must be >= 1");
  if (!(delta_s > 0.0)) throw Error(ErrorKind::InvalidArgument, "--delta must be > 0");
  if (!(horizon_s >= delta_s)) {
    throw Error(ErrorKind::InvalidArgument, "--horizon must be at least one sampling period");
  }
  if (!(em_step_s > 0.0) || em_step_s > delta_s) {
    throw Error(ErrorKind::InvalidArgument, "--em-step must lie in (0, delta]");
  }
  if (!(tol > 0.0) || !std::isfinite(tol)) throw Error(ErrorKind::InvalidArgument, "--tol must be > 0");
  if (experiment == Experiment::Illcond && !(ill_delta > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "ill-conditioning delta must be > 0");
  }
  if (filters.empty()) throw Error(ErrorKind::InvalidArgument, "--filters must name at least one filter");
  for (const FilterSpec& f : filters) f.validate();
}

ArmseResult compute_armse(std::span<const FilterTrace> traces,
                          std::span<const SimulatedDataset> truths) {
  if (traces.size() != truths.size()) {
    throw Error(ErrorKind::LengthMismatch, "number of traces differs from number of truths");
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  double sum_p = 0.0;
  double sum_v = 0.0;
  std::size_t count = 0;
  bool failed = false;
  for (std::size_t r = 0; r < traces.size(); ++r) {
    const FilterTrace& trace = traces[r];
    const SimulatedDataset& truth = truths[r];
    if (trace.means.size() != truth.truth.size()) {
      throw Error(ErrorKind::LengthMismatch, "trace length differs from truth length");
    }
    if (trace.failed()) failed = true;
    for (std::size_t k = 0; k < trace.means.size(); ++k) {
      const Vector err = truth.truth[k] - trace.means[k];
      sum_p += err(0) * err(0) + err(2) * err(2) + err(4) * err(4);
      sum_v += err(1) * err(1) + err(3) * err(3) + err(5) * err(5);
      ++count;
    }
  }
  if (failed) return {inf, inf, true};
  if (count == 0) return {0.0, 0.0, false};
  ArmseResult out{std::sqrt(sum_p / count), std::sqrt(sum_v / count), false};
  if (!std::isfinite(out.position) || !std::isfinite(out.velocity)) {
    return {inf, inf, true};
  }
  out.failed = out.position > kFailureArmseP;
  return out;
}

unsigned worker_count() {
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv(kThreadsEnvVar)) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) workers = static_cast<unsigned>(v);
  }
  return workers;
}

namespace {

struct RunOutcome {
  std::vector<FilterTrace> traces;  // per filter
  SimulatedDataset data;
  std::uint64_t digest = 0;
  bool paired = true;
};

template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace

MonteCarloResult monte_carlo(const ExperimentConfig& cfg) {
  cfg.validate();
  const Scenario scenario = cfg.scenario();
  const int steps = cfg.steps();
  const auto runs = static_cast<std::size_t>(cfg.runs);
  std::vector<FilterSpec> filters = cfg.filters;
  for (FilterSpec& f : filters) f.tol = Tolerances::uniform(cfg.tol);

  std::vector<RunOutcome> outcomes(runs);
  parallel_for(runs, [&](std::size_t r) {
    RunOutcome& out = outcomes[r];
    out.data = simulate_dataset(scenario, cfg.delta_s, steps, cfg.em_step_s, cfg.seed + r);
    out.digest = dataset_digest(out.data);
    out.traces.reserve(filters.size());
    for (const FilterSpec& f : filters) {
      out.traces.push_back(run_filter(f, out.data, scenario));
      out.paired = out.paired && dataset_digest(out.data) == out.digest;
    }
  });

  MonteCarloResult result;
  std::vector<SimulatedDataset> truths;
  truths.reserve(runs);
  for (RunOutcome& o : outcomes) {
    result.digests.push_back(o.digest);
    result.paired = result.paired && o.paired;
    truths.push_back(std::move(o.data));
  }
  for (std::size_t f = 0; f < filters.size(); ++f) {
    std::vector<FilterTrace> traces;
    traces.reserve(runs);
    double seconds = 0.0;
    for (RunOutcome& o : outcomes) {
      seconds += o.traces[f].seconds;
      traces.push_back(std::move(o.traces[f]));
    }
    const ArmseResult armse = compute_armse(traces, truths);
    RunResult cell;
    cell.experiment = std::string(to_string(cfg.experiment));
    cell.filter = std::string(to_string(filters[f].family));
    cell.variant = std::string(to_string(filters[f].variant));
    cell.delta_s = cfg.delta_s;
    cell.delta_ill = cfg.experiment == Experiment::Illcond ? cfg.ill_delta : 0.0;
    cell.runs = cfg.runs;
    cell.seed = cfg.seed;
    cell.tol = cfg.tol;
    cell.armse_p = armse.position;
    cell.armse_v = armse.velocity;
    cell.failed = armse.failed;
    cell.cpu_s = seconds / static_cast<double>(runs);
    result.cells.push_back(std::move(cell));
  }
  return result;
}

std::vector<RunResult> sweep_delta(ExperimentConfig cfg, const std::vector<double>& deltas) {
  std::vector<RunResult> out;
  for (const double d : deltas) {
    cfg.delta_s = d;
    cfg.em_step_s = std::min(cfg.em_step_s, d);
    auto cells = monte_carlo(cfg).cells;
    out.insert(out.end(), cells.begin(), cells.end());
  }
  return out;
}

std::vector<Breakdown> find_breakdowns(const std::vector<RunResult>& cells) {
  std::vector<Breakdown> out;
  for (const RunResult& c : cells) {
    const std::string label = c.label();
    auto it = std::find_if(out.begin(), out.end(), [&](const Breakdown& b) { return b.label == label; });
    if (it == out.end()) {
      out.push_back({label, std::nullopt, true});
    }
  }
  for (Breakdown& b : out) {
    std::vector<const RunResult*> series;
    for (const RunResult& c : cells) {
      if (c.label() == b.label) series.push_back(&c);
    }
    std::sort(series.begin(), series.end(),
              [](const RunResult* a, const RunResult* c) { return a->delta_ill > c->delta_ill; });
    for (const RunResult* c : series) {
      if (c->failed) {
        if (!b.delta) b.delta = c->delta_ill;
      } else if (b.delta) {
        b.monotone = false;
      }
    }
  }
  return out;
}

IllcondSweep sweep_illcond(ExperimentConfig cfg, const std::vector<double>& ill_deltas) {
  cfg.experiment = Experiment::Illcond;
  std::vector<double> sorted = ill_deltas;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  IllcondSweep sweep;
  for (const double d : sorted) {
    cfg.ill_delta = d;
    auto cells = monte_carlo(cfg).cells;
    sweep.cells.insert(sweep.cells.end(), cells.begin(), cells.end());
  }
  sweep.breakdowns = find_breakdowns(sweep.cells);
  return sweep;
}

std::vector<double> parse_value_list(const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || !(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorKind::InvalidArgument, "invalid value '" + s + "' in list '" + text + "'");
    }
    return v;
  };
  std::vector<double> out;
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const double first = number(text.substr(0, colon));
    const double last = number(text.substr(colon + 1));
    const double lo = std::log10(first);
    const double hi = std::log10(last);
    auto is_decade = [](double e) { return std::abs(e - std::round(e)) < 1e-9; };
    if (!is_decade(lo) || !is_decade(hi)) {
      throw Error(ErrorKind::InvalidArgument, "decade range endpoints must be powers of ten in '" + text + "'");
    }
    const int decades = static_cast<int>(std::lround(std::abs(hi - lo)));
    const double dir = hi < lo ? -1.0 : 1.0;
    for (int i = 0; i <= decades; ++i) out.push_back(std::pow(10.0, std::round(lo) + dir * i));
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(number(item));
  }
  if (out.empty()) throw Error(ErrorKind::InvalidArgument, "empty value list");
  return out;
}

}  // namespace cdkf
