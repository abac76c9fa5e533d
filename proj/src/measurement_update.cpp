#include "cdkf/measurement_update.hpp"

#include <cmath>
#include <numbers>

#include "cdkf/error.hpp"

namespace cdkf {

namespace {

// Angle outputs of neighbouring sigma points can land on opposite sides of
// the ±π cut. Shift them by 2π onto the branch of the first point so that the
// weighted sums see a continuous angle; columns already within π of the
// reference are left untouched.
void align_angular_rows(Matrix& z, const MeasurementModel& model) {
  for (std::size_t row = 0; row < model.angular.size(); ++row) {
    if (!model.angular[row]) continue;
    const auto r = static_cast<Eigen::Index>(row);
    const double ref = z(r, 0);
    for (Eigen::Index c = 1; c < z.cols(); ++c) {
      const double diff = z(r, c) - ref;
      if (std::abs(diff) > std::numbers::pi) z(r, c) = ref + wrap_angle(diff);
    }
  }
}

Matrix propagate_points(const MeasurementModel& model, int k, const Matrix& x) {
  Matrix z = model.h(k, x);
  if (z.rows() != model.m || z.cols() != x.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "measurement function returned the wrong shape");
  }
  if (!z.allFinite()) {
    throw Error(ErrorKind::NonFiniteState, "measurement function produced non-finite values");
  }
  align_angular_rows(z, model);
  return z;
}

void check_measurement(const Vector& z, const MeasurementModel& model) {
  if (z.size() != model.m) {
    throw Error(ErrorKind::DimensionMismatch, "measurement vector length differs from model m");
  }
}

void check_posterior(const Vector& mean, const Matrix& m) {
  if (!mean.allFinite() || !m.allFinite()) {
    throw Error(ErrorKind::NonFiniteState, "posterior is non-finite");
  }
}

// K·L·Lᵀ = B  =>  K = B·(L·Lᵀ)⁻¹.
Matrix solve_gain(const Matrix& cross, const Matrix& lower) {
  return trisolve(lower, trisolve(lower, cross, Side::Right, true), Side::Right);
}

}  // namespace

UpdateResult mu_conventional(const GaussianBelief& prior, const Vector& z, int k,
                             const MeasurementModel& model, const SigmaRule& rule) {
  check_measurement(z, model);
  const Matrix sqrt_p = cholesky_lower(prior.cov);
  const Matrix x = draw_sigma_matrix(prior.mean, sqrt_p, rule);
  const Matrix zs = propagate_points(model, k, x);
  const Matrix& w = rule.weight_matrix;

  UpdateResult out;
  out.predicted = zs * rule.w;
  out.innovation_cov = symmetrize(zs * w * zs.transpose() + model.noise_cov);
  const Matrix cross = x * w * zs.transpose();
  const Matrix re_lower = cholesky_lower(out.innovation_cov);
  out.gain = solve_gain(cross, re_lower);
  out.innovation = model.wrap_innovation(z - out.predicted);
  out.posterior.mean = prior.mean + out.gain * out.innovation;
  out.posterior.cov =
      symmetrize(prior.cov - out.gain * out.innovation_cov * out.gain.transpose());
  check_posterior(out.posterior.mean, out.posterior.cov);
  return out;
}

SqrtUpdateResult mu_sqrt_onesweep(const SqrtGaussianBelief& prior, const Vector& z, int k,
                                  const MeasurementModel& model, const SigmaRule& rule) {
  check_measurement(z, model);
  const int m = model.m;
  const int n = rule.n;
  const int count = rule.size();
  const Matrix x = draw_sigma_matrix(prior.mean, prior.sqrt_cov, rule);
  const Matrix zs = propagate_points(model, k, x);

  Matrix pre = Matrix::Zero(m + n, m + count);
  pre.topLeftCorner(m, m) = model.sqrt_noise_cov;
  pre.topRightCorner(m, count) = zs * rule.sqrt_w_abs;
  pre.bottomRightCorner(n, count) = x * rule.sqrt_w_abs;
  const Matrix post =
      hyperbolic_block_triangularize(pre, Signature::positive(m).concat(rule.signature));

  SqrtUpdateResult out;
  out.predicted = zs * rule.w;
  out.sqrt_innovation_cov = post.topLeftCorner(m, m);
  out.normalized_cross_cov = post.block(m, 0, n, m);
  out.gain = trisolve(out.sqrt_innovation_cov, out.normalized_cross_cov, Side::Right);
  out.innovation = model.wrap_innovation(z - out.predicted);
  out.posterior.mean = prior.mean + out.gain * out.innovation;
  out.posterior.sqrt_cov = post.block(m, m, n, n);
  check_posterior(out.posterior.mean, out.posterior.sqrt_cov);
  return out;
}

SqrtUpdateResult mu_sqrt_joseph(const SqrtGaussianBelief& prior, const Vector& z, int k,
                                const MeasurementModel& model, const SigmaRule& rule) {
  check_measurement(z, model);
  const int m = model.m;
  const int n = rule.n;
  const int count = rule.size();
  const Signature j = Signature::positive(m).concat(rule.signature);
  const Matrix x = draw_sigma_matrix(prior.mean, prior.sqrt_cov, rule);
  const Matrix zs = propagate_points(model, k, x);
  const Matrix zw = zs * rule.sqrt_w_abs;
  const Matrix xw = x * rule.sqrt_w_abs;

  Matrix pre(m, m + count);
  pre << model.sqrt_noise_cov, zw;
  const Matrix post = hyperbolic_block_triangularize(pre, j);

  SqrtUpdateResult out;
  out.predicted = zs * rule.w;
  out.sqrt_innovation_cov = post.leftCols(m);
  const Matrix cross = xw * rule.signature.matrix() * zw.transpose();
  out.normalized_cross_cov = trisolve(out.sqrt_innovation_cov, cross, Side::Right, true);
  out.gain = trisolve(out.sqrt_innovation_cov, out.normalized_cross_cov, Side::Right);

  Matrix pre2(n, m + count);
  pre2 << out.gain * model.sqrt_noise_cov, (x - out.gain * zs) * rule.sqrt_w_abs;
  const Matrix post2 = hyperbolic_block_triangularize(pre2, j);

  out.innovation = model.wrap_innovation(z - out.predicted);
  out.posterior.mean = prior.mean + out.gain * out.innovation;
  out.posterior.sqrt_cov = post2.leftCols(n);
  check_posterior(out.posterior.mean, out.posterior.sqrt_cov);
  return out;
}

UpdateResult mu_ekf_linearized(const GaussianBelief& prior, const Vector& z, int k,
                               const MeasurementModel& model) {
  check_measurement(z, model);
  if (!model.jacobian) {
    throw Error(ErrorKind::InvalidArgument, "linearized update needs a measurement Jacobian");
  }
  const Eigen::Index n = prior.mean.size();
  const Matrix h = model.jacobian(k, prior.mean);
  if (h.rows() != model.m || h.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch, "measurement Jacobian has the wrong shape");
  }
  const Matrix& p = prior.cov;

  UpdateResult out;
  out.predicted = model.evaluate(k, prior.mean);
  if (!out.predicted.allFinite()) {
    throw Error(ErrorKind::NonFiniteState, "measurement function produced non-finite values");
  }
  out.innovation_cov = symmetrize(h * p * h.transpose() + model.noise_cov);
  out.gain = solve_gain(p * h.transpose(), cholesky_lower(out.innovation_cov));
  out.innovation = model.wrap_innovation(z - out.predicted);
  out.posterior.mean = prior.mean + out.gain * out.innovation;
  const Matrix a = Matrix::Identity(n, n) - out.gain * h;
  out.posterior.cov = symmetrize(a * p * a.transpose() +
                                 out.gain * model.noise_cov * out.gain.transpose());
  check_posterior(out.posterior.mean, out.posterior.cov);
  return out;
}

}  // namespace cdkf
