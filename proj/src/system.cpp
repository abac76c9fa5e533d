#include "cdkf/system.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "cdkf/error.hpp"

namespace cdkf {

Matrix ProcessModel::jacobian_at(double t, const Vector& x) const {
  if (jacobian) return jacobian(t, x);
  return finite_difference_jacobian(drift, t, x);
}

Matrix ProcessModel::process_noise() const {
  return diffusion * diffusion_cov * diffusion.transpose();
}

Matrix finite_difference_jacobian(const ProcessModel::Drift& f, double t, const Vector& x) {
  const Eigen::Index n = x.size();
  const double root_eps = std::sqrt(std::numeric_limits<double>::epsilon());
  Matrix jac(n, n);
  Vector probe = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = root_eps * std::max(1.0, std::abs(x(i)));
    probe(i) = x(i) + h;
    const Vector up = f(t, probe);
    probe(i) = x(i) - h;
    const Vector down = f(t, probe);
    probe(i) = x(i);
    jac.col(i) = (up - down) / (2.0 * h);
  }
  return jac;
}

Vector MeasurementModel::evaluate(int k, const Vector& x) const {
  return h(k, x).col(0);
}

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a + std::numbers::pi, two_pi);
  if (r <= 0.0) r += two_pi;
  return r - std::numbers::pi;
}

Vector MeasurementModel::wrap_innovation(Vector nu) const {
  for (std::size_t i = 0; i < angular.size() && i < static_cast<std::size_t>(nu.size()); ++i) {
    if (angular[i]) nu(static_cast<Eigen::Index>(i)) = wrap_angle(nu(static_cast<Eigen::Index>(i)));
  }
  return nu;
}

MeasurementModel make_measurement_model(int m, MeasurementModel::Function h,
                                        MeasurementModel::Jacobian jacobian, Matrix noise_cov,
                                        std::vector<bool> angular) {
  if (noise_cov.rows() != m || noise_cov.cols() != m) {
    throw Error(ErrorKind::DimensionMismatch, "measurement noise covariance must be m×m");
  }
  if (angular.empty()) angular.assign(static_cast<std::size_t>(m), false);
  if (angular.size() != static_cast<std::size_t>(m)) {
    throw Error(ErrorKind::DimensionMismatch, "angular mask length must equal m");
  }
  MeasurementModel model;
  model.m = m;
  model.h = std::move(h);
  model.jacobian = std::move(jacobian);
  model.sqrt_noise_cov = cholesky_lower(noise_cov);
  model.noise_cov = std::move(noise_cov);
  model.angular = std::move(angular);
  return model;
}

}  // namespace cdkf
