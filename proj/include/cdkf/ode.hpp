#pragma once

#include <functional>
#include <vector>

#include "cdkf/linalg.hpp"
#include "cdkf/system.hpp"

namespace cdkf {

struct Tolerances {
  double abs_tol = 1e-4;
  double rel_tol = 1e-4;

  static Tolerances uniform(double tol) { return {tol, tol}; }
};

/// dy/dt = rhs(t, y)
using OdeRhs = std::function<Vector(double, const Vector&)>;

struct IntegrationStats {
  int accepted = 0;
  int rejected = 0;
  int evaluations = 0;
};

struct IntegrationResult {
  Vector y;
  IntegrationStats stats;
};

/// Dormand–Prince 5(4) with FSAL and per-component mixed error weighting
/// |err_i| / (abs_tol + rel_tol·max(|y_i|, |y_new_i|)); a step is accepted when
/// the RMS of the weighted error is ≤ 1. The first trial step is (t1−t0)/100
/// and the last step is shortened to land on t1.
///
/// Throws StepSizeUnderflow when the step drops below 1e-14·(t1−t0) and
/// NonFiniteState when the right-hand side produces NaN/Inf.
IntegrationResult integrate_adaptive(const OdeRhs& rhs, double t0, double t1, const Vector& y0,
                                     const Tolerances& tol);

/// Fixed-step Euler–Maruyama:
///   x ← x + f(t, x)·h + G·√h·Q^{1/2}·η,  η ~ N(0, I_q).
/// The final step is shortened when h does not divide the span. When `path`
/// is non-null every intermediate state (including x0) is appended to it.
Vector euler_maruyama_simulate(const ProcessModel& model, const Vector& x0, double t0, double t1,
                               double h, Rng& rng, std::vector<Vector>* path = nullptr);

}  // namespace cdkf
