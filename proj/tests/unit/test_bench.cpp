#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cdkf/bench.hpp"
#include "cdkf/error.hpp"

using namespace cdkf;

namespace {

/// Dataset with the given truth trajectory and matching trace with a fixed
/// position and velocity offset on every step.
struct Pair {
  FilterTrace trace;
  SimulatedDataset truth;
};

Pair offset_pair(std::size_t steps, const Vector& offset) {
  Pair p;
  for (std::size_t k = 0; k < steps; ++k) {
    Vector x = Vector::LinSpaced(7, static_cast<double>(k), static_cast<double>(k) + 6.0);
    p.truth.times.push_back(static_cast<double>(k + 1));
    p.truth.truth.push_back(x);
    p.truth.measurements.push_back(Vector::Zero(3));
    p.trace.means.push_back(x + offset);
    p.trace.status.push_back(StepStatus::Ok);
  }
  return p;
}

Vector state(double e, double de, double n, double dn, double z, double dz) {
  Vector v(7);
  v << e, de, n, dn, z, dz, 0.0;
  return v;
}

ArmseResult armse_of(const std::vector<Pair>& pairs) {
  std::vector<FilterTrace> traces;
  std::vector<SimulatedDataset> truths;
  for (const Pair& p : pairs) {
    traces.push_back(p.trace);
    truths.push_back(p.truth);
  }
  return compute_armse(traces, truths);
}

bool same_except_timing(const RunResult& a, const RunResult& b) {
  RunResult x = a, y = b;
  x.cpu_s = y.cpu_s = 0.0;
  return x == y;
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.experiment = Experiment::Gauss;
  cfg.runs = 3;
  cfg.seed = 11;
  cfg.horizon_s = 20.0;
  cfg.filters = {FilterSpec::parse("ekf"), FilterSpec::parse("ekf-ukf:sr-joseph"),
                 FilterSpec::parse("ekf-5dckf")};
  return cfg;
}

class ScopedEnv {
 public:
  ScopedEnv(const char* name, const char* value) : name_(name) {
    if (const char* old = std::getenv(name)) old_ = old;
    ::setenv(name, value, 1);
  }
  ~ScopedEnv() {
    if (old_.empty())
      ::unsetenv(name_);
    else
      ::setenv(name_, old_.c_str(), 1);
  }

 private:
  const char* name_;
  std::string old_;
};

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("cdkf_bench_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("ARMSE of perfect estimates is zero") {
  const ArmseResult r = armse_of({offset_pair(10, Vector::Zero(7)), offset_pair(10, Vector::Zero(7))});
  CHECK(r.position == 0.0);
  CHECK(r.velocity == 0.0);
  CHECK_FALSE(r.failed);
}

TEST_CASE("ARMSE of a single 3-4-5 position error") {
  const ArmseResult r = armse_of({offset_pair(1, state(3, 0, 4, 0, 0, 0))});
  CHECK(r.position == doctest::Approx(5.0));
  CHECK(r.velocity == 0.0);
}

TEST_CASE("ARMSE of a constant per-axis error scales with the square root of three") {
  const double e = 7.5;
  const ArmseResult r = armse_of({offset_pair(20, state(e, -2, e, 2, -e, 2)), offset_pair(20, state(-e, 2, e, -2, e, 2))});
  CHECK(r.position == doctest::Approx(e * std::sqrt(3.0)));
  CHECK(r.velocity == doctest::Approx(2.0 * std::sqrt(3.0)));
}

TEST_CASE("a failed run or a large error marks the cell failed") {
  Pair broken = offset_pair(5, Vector::Zero(7));
  broken.trace.failed_step = 2;
  broken.trace.status[2] = StepStatus::Failed;
  const ArmseResult r = armse_of({offset_pair(5, Vector::Zero(7)), broken});
  CHECK(r.failed);
  CHECK(std::isinf(r.position));
  CHECK(std::isinf(r.velocity));

  const ArmseResult far = armse_of({offset_pair(5, state(501, 0, 0, 0, 0, 0))});
  CHECK(far.failed);
  CHECK(far.position == doctest::Approx(501.0));
  const ArmseResult near = armse_of({offset_pair(5, state(499, 0, 0, 0, 0, 0))});
  CHECK_FALSE(near.failed);
}

TEST_CASE("ARMSE rejects misaligned inputs") {
  std::vector<FilterTrace> traces(2);
  std::vector<SimulatedDataset> truths(1);
  CHECK_THROWS_AS(compute_armse(traces, truths), Error);
  Pair p = offset_pair(4, Vector::Zero(7));
  p.trace.means.pop_back();
  CHECK_THROWS_AS(armse_of({p}), Error);
}

TEST_CASE("Monte Carlo tables are reproducible and independent of the worker count") {
  const ExperimentConfig cfg = small_config();
  MonteCarloResult single, several, again;
  {
    ScopedEnv env(kThreadsEnvVar, "1");
    CHECK(worker_count() == 1);
    single = monte_carlo(cfg);
  }
  {
    ScopedEnv env(kThreadsEnvVar, "3");
    CHECK(worker_count() == 3);
    several = monte_carlo(cfg);
    again = monte_carlo(cfg);
  }
  REQUIRE(single.cells.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(same_except_timing(single.cells[i], several.cells[i]));
    CHECK(same_except_timing(several.cells[i], again.cells[i]));
  }
  CHECK(single.digests == several.digests);
  CHECK(single.paired);
  CHECK(single.digests.size() == 3);
  CHECK(single.digests[0] != single.digests[1]);

  const RunResult& cell = single.cells[1];
  CHECK(cell.experiment == "gauss");
  CHECK(cell.filter == "ekf-ukf");
  CHECK(cell.variant == "sr-joseph");
  CHECK(cell.runs == 3);
  CHECK(cell.seed == 11);
  CHECK(cell.tol == 1e-4);
  CHECK(cell.delta_s == 1.0);
  CHECK(cell.armse_p > 0.0);
  CHECK(cell.cpu_s >= 0.0);
}

TEST_CASE("worker count falls back on invalid environment values") {
  ScopedEnv env(kThreadsEnvVar, "zero");
  CHECK(worker_count() >= 1);
}

TEST_CASE("Monte Carlo seeds each run from the base seed") {
  ExperimentConfig cfg = small_config();
  cfg.runs = 2;
  const MonteCarloResult shifted_base = [&] {
    ExperimentConfig c = cfg;
    c.seed = 12;
    c.runs = 1;
    return monte_carlo(c);
  }();
  const MonteCarloResult both = monte_carlo(cfg);
  // Run 1 of a seed-11 experiment is run 0 of a seed-12 experiment.
  CHECK(both.digests[1] == shifted_base.digests[0]);
}

TEST_CASE("experiment configuration validation") {
  ExperimentConfig cfg = small_config();
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.steps() == 20);
  cfg.runs = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = small_config();
  cfg.delta_s = -1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = small_config();
  cfg.filters.clear();
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = small_config();
  cfg.experiment = Experiment::Illcond;
  CHECK_THROWS_AS(cfg.validate(), Error);  // needs a positive delta
  cfg.ill_delta = 1e-3;
  CHECK_NOTHROW(cfg.validate());

  CHECK(parse_experiment("glint") == Experiment::Glint);
  CHECK(to_string(Experiment::Illcond) == "illcond");
  CHECK_THROWS_AS(parse_experiment("sonar"), Error);
}

TEST_CASE("sweep value lists") {
  const std::vector<double> decades = parse_value_list("1e-1:1e-14");
  REQUIRE(decades.size() == 14);
  CHECK(decades.front() == doctest::Approx(1e-1));
  CHECK(decades.back() == doctest::Approx(1e-14));
  for (std::size_t i = 1; i < decades.size(); ++i) CHECK(decades[i] < decades[i - 1]);

  const std::vector<double> list = parse_value_list("1,2,5,12");
  CHECK(list == std::vector<double>{1, 2, 5, 12});
  CHECK_THROWS_AS(parse_value_list(""), Error);
  CHECK_THROWS_AS(parse_value_list("1,x"), Error);
  CHECK_THROWS_AS(parse_value_list("1e-1:3e-2"), Error);
}

TEST_CASE("breakdown detection and monotonicity flag") {
  auto cell = [](const std::string& variant, double delta, bool failed) {
    RunResult r;
    r.experiment = "illcond";
    r.filter = "ekf-ukf";
    r.variant = variant;
    r.delta_ill = delta;
    r.failed = failed;
    return r;
  };
  const std::vector<RunResult> cells = {
      cell("conventional", 1e-1, false), cell("sr-onesweep", 1e-1, false),
      cell("conventional", 1e-2, true),  cell("sr-onesweep", 1e-2, false),
      cell("conventional", 1e-3, false), cell("sr-onesweep", 1e-3, true),
      cell("conventional", 1e-4, true),  cell("sr-onesweep", 1e-4, true),
  };
  const std::vector<Breakdown> b = find_breakdowns(cells);
  REQUIRE(b.size() == 2);
  CHECK(b[0].label == "ekf-ukf:conventional");
  CHECK(*b[0].delta == doctest::Approx(1e-2));
  CHECK_FALSE(b[0].monotone);
  CHECK(b[1].label == "ekf-ukf:sr-onesweep");
  CHECK(*b[1].delta == doctest::Approx(1e-3));
  CHECK(b[1].monotone);

  const std::vector<Breakdown> none = find_breakdowns({cell("sr-joseph", 1e-1, false)});
  CHECK_FALSE(none[0].delta.has_value());
}

TEST_CASE("ill-conditioning sweep runs every delta in descending order") {
  ExperimentConfig cfg = small_config();
  cfg.experiment = Experiment::Illcond;
  cfg.runs = 1;
  cfg.horizon_s = 5.0;
  cfg.filters = {FilterSpec::parse("ekf-ukf:sr-onesweep")};
  const IllcondSweep sweep = sweep_illcond(cfg, {1e-3, 1e-1, 1e-2});
  REQUIRE(sweep.cells.size() == 3);
  CHECK(sweep.cells[0].delta_ill == 1e-1);
  CHECK(sweep.cells[2].delta_ill == 1e-3);
  CHECK(sweep.cells[0].experiment == "illcond");
  REQUIRE(sweep.breakdowns.size() == 1);
}

TEST_CASE("sampling-period sweep labels each cell with its period") {
  ExperimentConfig cfg = small_config();
  cfg.runs = 1;
  cfg.filters = {FilterSpec::parse("ekf-ukf")};
  const std::vector<RunResult> cells = sweep_delta(cfg, {1.0, 2.0});
  REQUIRE(cells.size() == 2);
  CHECK(cells[0].delta_s == 1.0);
  CHECK(cells[1].delta_s == 2.0);
}

TEST_CASE("results CSV: header-only for no results, exact round trip otherwise") {
  const auto dir = scratch_dir("csv");
  write_results_csv({}, dir / "empty.csv");
  std::ifstream empty(dir / "empty.csv");
  std::stringstream content;
  content << empty.rdbuf();
  CHECK(content.str() == std::string(kResultsCsvHeader) + "\n");

  ExperimentConfig cfg = small_config();
  cfg.runs = 2;
  std::vector<RunResult> cells = monte_carlo(cfg).cells;
  RunResult failed = cells[0];
  failed.armse_p = std::numeric_limits<double>::infinity();
  failed.armse_v = std::numeric_limits<double>::infinity();
  failed.failed = true;
  cells.push_back(failed);
  write_results_csv(cells, dir / "cells.csv");
  const std::vector<RunResult> back = read_results_csv(dir / "cells.csv");
  REQUIRE(back.size() == cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) CHECK(back[i] == cells[i]);

  CHECK_THROWS_AS(write_results_csv(cells, dir / "cells.csv" / "nested.csv"), Error);
}

TEST_CASE("sweep SVG has one polyline per filter variant") {
  auto cell = [](const std::string& variant, double delta, double armse, bool failed) {
    RunResult r;
    r.experiment = "illcond";
    r.filter = "ekf-5dckf";
    r.variant = variant;
    r.delta_ill = delta;
    r.armse_p = armse;
    r.failed = failed;
    return r;
  };
  const std::vector<RunResult> cells = {
      cell("conventional", 1e-1, 20.0, false), cell("sr-joseph", 1e-1, 21.0, false),
      cell("conventional", 1e-2, 1e9, true),   cell("sr-joseph", 1e-2, 22.0, false),
  };
  const std::string svg = render_sweep_svg(cells, SweepAxis::IllConditioning, "sweep <test>");
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("<svg ") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  std::size_t polylines = 0;
  for (std::size_t pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1))
    ++polylines;
  CHECK(polylines == 2);
  CHECK(svg.find("sweep &lt;test&gt;") != std::string::npos);
  std::size_t opens = 0, closes = 0;
  for (char c : svg) {
    opens += c == '<';
    closes += c == '>';
  }
  CHECK(opens == closes);
}
