#include "cdkf/models.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "cdkf/error.hpp"
#include "cdkf/ode.hpp"

namespace cdkf {

Vector ct_drift(double /*t*/, const Vector& x) {
  const double omega = x(6);
  Vector f(7);
  f << x(1), -omega * x(3), x(3), omega * x(1), x(5), 0.0, 0.0;
  return f;
}

Matrix ct_jacobian(double /*t*/, const Vector& x) {
  const double omega = x(6);
  Matrix jac = Matrix::Zero(7, 7);
  jac(0, 1) = 1.0;
  jac(1, 3) = -omega;
  jac(1, 6) = -x(3);
  jac(2, 3) = 1.0;
  jac(3, 1) = omega;
  jac(3, 6) = x(1);
  jac(4, 5) = 1.0;
  return jac;
}

ProcessModel make_coordinated_turn_model(const CoordinatedTurnParams& params) {
  ProcessModel model;
  model.n = 7;
  model.drift = ct_drift;
  model.jacobian = ct_jacobian;
  Vector g(7);
  const double s1 = params.sigma_velocity;
  g << 0.0, s1, 0.0, s1, 0.0, s1, params.sigma_turn_rate;
  model.diffusion = g.asDiagonal();
  model.diffusion_cov = Matrix::Identity(7, 7);
  return model;
}

Matrix radar_h(int /*k*/, const Matrix& x) {
  Matrix z(3, x.cols());
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    const double e = x(0, i);
    const double h = x(2, i);
    const double v = x(4, i);
    const double planar = std::hypot(e, h);
    if (planar == 0.0) {
      throw Error(ErrorKind::DegenerateGeometry, "target directly above or below the radar");
    }
    z(0, i) = std::sqrt(e * e + h * h + v * v);
    z(1, i) = std::atan2(h, e);
    z(2, i) = std::atan(v / planar);
  }
  return z;
}

Matrix radar_jacobian(int /*k*/, const Vector& x) {
  const double e = x(0);
  const double h = x(2);
  const double v = x(4);
  const double planar2 = e * e + h * h;
  if (planar2 == 0.0) {
    throw Error(ErrorKind::DegenerateGeometry, "target directly above or below the radar");
  }
  const double planar = std::sqrt(planar2);
  const double range2 = planar2 + v * v;
  const double range = std::sqrt(range2);

  Matrix jac = Matrix::Zero(3, x.size());
  jac(0, 0) = e / range;
  jac(0, 2) = h / range;
  jac(0, 4) = v / range;
  jac(1, 0) = -h / planar2;
  jac(1, 2) = e / planar2;
  jac(2, 0) = -e * v / (planar * range2);
  jac(2, 2) = -h * v / (planar * range2);
  jac(2, 4) = planar / range2;
  return jac;
}

MeasurementModel make_radar_model(const RadarParams& params) {
  Vector sd(3);
  sd << params.sigma_range, params.sigma_azimuth, params.sigma_elevation;
  return make_measurement_model(3, radar_h, radar_jacobian, sd.array().square().matrix().asDiagonal(),
                                {false, true, true});
}

Matrix illcond_matrix(double delta) {
  Matrix h = Matrix::Ones(2, 7);
  h(1, 6) = 1.0 + delta;
  return h;
}

MeasurementModel make_illcond_model(double delta) {
  if (!(delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "ill-conditioning delta must be > 0");
  const Matrix h = illcond_matrix(delta);
  return make_measurement_model(
      2, [h](int, const Matrix& x) -> Matrix { return h * x; },
      [h](int, const Vector&) -> Matrix { return h; }, delta * delta * Matrix::Identity(2, 2));
}

Matrix MeasurementNoise::mixture_cov() const {
  if (glint_prob == 0.0) return cov;
  return (1.0 - glint_prob) * cov + glint_prob * glint_cov;
}

MeasurementNoise gaussian_noise(const Matrix& cov) { return {cov, 0.0, Matrix()}; }

MeasurementNoise glint_noise(const Matrix& cov, double glint_prob, double glint_scale) {
  if (!(glint_prob >= 0.0 && glint_prob < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "glint probability must lie in [0, 1)");
  }
  return {cov, glint_prob, glint_scale * cov};
}

Vector sample_measurement_noise(const MeasurementNoise& noise, Rng& rng) {
  const Eigen::Index m = noise.cov.rows();
  const Matrix* cov = &noise.cov;
  if (noise.glint_prob > 0.0) {
    std::bernoulli_distribution glint(noise.glint_prob);
    if (glint(rng)) cov = &noise.glint_cov;
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector eta(m);
  for (Eigen::Index i = 0; i < m; ++i) eta(i) = normal(rng);
  // Diagonal covariances (all experiment models) avoid a factorization.
  if (cov->isDiagonal(0.0)) return cov->diagonal().cwiseSqrt().cwiseProduct(eta);
  return cholesky_lower(*cov) * eta;
}

GaussianBelief coordinated_turn_initial_belief() {
  Vector mean(7);
  mean << 1000.0, 0.0, 2650.0, 150.0, 200.0, 0.0, deg_to_rad(3.0);
  return {mean, 0.01 * Matrix::Identity(7, 7)};
}

Scenario radar_scenario(bool glint) {
  Scenario s;
  s.name = "coordinated-turn-radar";
  s.process = make_coordinated_turn_model();
  s.measurement = make_radar_model();
  s.noise = glint ? glint_noise(s.measurement.noise_cov, 0.25, 100.0)
                  : gaussian_noise(s.measurement.noise_cov);
  s.noise_name = glint ? "glint" : "gauss";
  s.initial = coordinated_turn_initial_belief();
  return s;
}

Scenario illcond_scenario(double delta) {
  Scenario s;
  std::ostringstream os;
  os.precision(17);
  os << "coordinated-turn-illcond(delta=" << delta << ")";
  s.name = os.str();
  s.process = make_coordinated_turn_model();
  s.measurement = make_illcond_model(delta);
  s.noise = gaussian_noise(s.measurement.noise_cov);
  s.noise_name = "gauss";
  s.initial = coordinated_turn_initial_belief();
  return s;
}

SimulatedDataset simulate_dataset(const Scenario& scenario, double delta_s, int steps,
                                  double em_step_s, std::uint64_t seed) {
  if (!(delta_s > 0.0) || steps < 1 || !(em_step_s > 0.0) || em_step_s > delta_s) {
    throw Error(ErrorKind::InvalidArgument,
                "dataset needs delta > 0, at least one step and 0 < em_step <= delta");
  }
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  SimulatedDataset data;
  data.seed = seed;
  data.delta_s = delta_s;
  data.em_step_s = em_step_s;
  data.model = scenario.name;
  data.noise = scenario.noise_name;

  const Eigen::Index n = scenario.initial.mean.size();
  Vector eta(n);
  for (Eigen::Index i = 0; i < n; ++i) eta(i) = normal(rng);
  Vector x = scenario.initial.mean + cholesky_lower(scenario.initial.cov) * eta;
  data.initial_truth = x;

  data.times.reserve(static_cast<std::size_t>(steps));
  data.truth.reserve(static_cast<std::size_t>(steps));
  data.measurements.reserve(static_cast<std::size_t>(steps));
  for (int k = 1; k <= steps; ++k) {
    const double t0 = (k - 1) * delta_s;
    const double t1 = k * delta_s;
    x = euler_maruyama_simulate(scenario.process, x, t0, t1, em_step_s, rng);
    const Vector z = scenario.measurement.evaluate(k, x) + sample_measurement_noise(scenario.noise, rng);
    data.times.push_back(t1);
    data.truth.push_back(x);
    data.measurements.push_back(z);
  }
  return data;
}

std::uint64_t dataset_digest(const SimulatedDataset& data) {
  std::uint64_t hash = 1469598103934665603ULL;
  auto mix = [&hash](const double* p, std::size_t count) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < count * sizeof(double); ++i) {
      hash ^= bytes[i];
      hash *= 1099511628211ULL;
    }
  };
  mix(data.times.data(), data.times.size());
  mix(data.initial_truth.data(), static_cast<std::size_t>(data.initial_truth.size()));
  for (const Vector& v : data.truth) mix(v.data(), static_cast<std::size_t>(v.size()));
  for (const Vector& v : data.measurements) mix(v.data(), static_cast<std::size_t>(v.size()));
  return hash;
}

}  // namespace cdkf
