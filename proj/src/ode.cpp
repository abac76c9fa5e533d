#include "cdkf/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cdkf/error.hpp"

namespace cdkf {

namespace {

// Dormand & Prince (1980) 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// Difference between the 5th-order and embedded 4th-order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;

Vector checked(Vector v, double t) {
  if (!v.allFinite()) {
    std::ostringstream os;
    os << "right-hand side is non-finite at t = " << t;
    throw Error(ErrorKind::NonFiniteState, os.str());
  }
  return v;
}

}  // namespace

IntegrationResult integrate_adaptive(const OdeRhs& rhs, double t0, double t1, const Vector& y0,
                                     const Tolerances& tol) {
  if (!(t1 > t0)) throw Error(ErrorKind::InvalidArgument, "integration span must have t1 > t0");
  if (!(tol.abs_tol > 0.0) || !(tol.rel_tol > 0.0) || !std::isfinite(tol.abs_tol) ||
      !std::isfinite(tol.rel_tol)) {
    throw Error(ErrorKind::InvalidArgument, "tolerances must be positive and finite");
  }
  if (!y0.allFinite()) throw Error(ErrorKind::NonFiniteState, "initial state is non-finite");

  const double span = t1 - t0;
  const double h_min = 1e-14 * span;
  IntegrationResult result{y0, {}};
  Vector& y = result.y;
  IntegrationStats& stats = result.stats;

  double t = t0;
  double h = span / 100.0;
  Vector k1 = checked(rhs(t, y), t);
  stats.evaluations = 1;
  Vector k2, k3, k4, k5, k6, k7, y_new, err;
  bool last_rejected = false;

  while (t < t1) {
    bool final_step = false;
    if (t + h >= t1) {
      h = t1 - t;
      final_step = true;
    }
    k2 = checked(rhs(t + c2 * h, y + h * (a21 * k1)), t);
    k3 = checked(rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2)), t);
    k4 = checked(rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3)), t);
    k5 = checked(rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)), t);
    k6 = checked(rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)), t);
    y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const double t_new = final_step ? t1 : t + h;
    k7 = checked(rhs(t_new, y_new), t_new);
    stats.evaluations += 6;

    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const Vector scale =
        (tol.abs_tol + tol.rel_tol * y.cwiseAbs().cwiseMax(y_new.cwiseAbs()).array()).matrix();
    const double err_norm = std::sqrt((err.array() / scale.array()).square().mean());
    if (!std::isfinite(err_norm)) {
      throw Error(ErrorKind::NonFiniteState, "error estimate is non-finite");
    }

    if (err_norm <= 1.0) {
      t = t_new;
      y = y_new;
      k1 = k7;  // FSAL
      ++stats.accepted;
      double factor = err_norm == 0.0 ? kMaxFactor : kSafety * std::pow(err_norm, -0.2);
      factor = std::clamp(factor, kMinFactor, last_rejected ? 1.0 : kMaxFactor);
      h *= factor;
      last_rejected = false;
    } else {
      ++stats.rejected;
      const double factor = std::clamp(kSafety * std::pow(err_norm, -0.2), kMinFactor, 1.0);
      h *= factor;
      last_rejected = true;
      if (h < h_min) {
        std::ostringstream os;
        os << "step " << h << " below " << h_min << " at t = " << t;
        throw Error(ErrorKind::StepSizeUnderflow, os.str());
      }
    }
  }
  return result;
}

Vector euler_maruyama_simulate(const ProcessModel& model, const Vector& x0, double t0, double t1,
                               double h, Rng& rng, std::vector<Vector>* path) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "Euler-Maruyama step must be positive");
  if (!(t1 >= t0)) throw Error(ErrorKind::InvalidArgument, "simulation span must have t1 >= t0");

  const int q = model.noise_dim();
  Matrix noise_gain = Matrix::Zero(model.n, q);
  if (q > 0 && !model.diffusion.isZero(0.0)) {
    noise_gain = model.diffusion * cholesky_lower(model.diffusion_cov);
  }
  std::normal_distribution<double> normal(0.0, 1.0);

  Vector x = x0;
  Vector eta(q);
  if (path) path->push_back(x);
  double t = t0;
  // Count steps up front so the mesh is t0 + j·h regardless of roundoff.
  const double span = t1 - t0;
  const auto full_steps = static_cast<long long>(std::floor(span / h * (1.0 + 1e-12)));
  const long long total = full_steps + ((span - full_steps * h) > 1e-12 * h ? 1 : 0);
  for (long long j = 0; j < total; ++j) {
    const double t_next = (j + 1 == total) ? t1 : t0 + static_cast<double>(j + 1) * h;
    const double dt = t_next - t;
    for (int i = 0; i < q; ++i) eta(i) = normal(rng);
    x += model.drift(t, x) * dt + std::sqrt(dt) * (noise_gain * eta);
    if (!x.allFinite()) {
      std::ostringstream os;
      os << "Euler-Maruyama state non-finite at t = " << t_next;
      throw Error(ErrorKind::NonFiniteState, os.str());
    }
    t = t_next;
    if (path) path->push_back(x);
  }
  return x;
}

}  // namespace cdkf
