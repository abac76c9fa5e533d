#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "cdkf/linalg.hpp"
#include "cdkf/models.hpp"
#include "cdkf/system.hpp"
#include "cdkf/time_update.hpp"

namespace cdkf::testing {

inline Matrix random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

/// Well-conditioned SPD matrix: A·Aᵀ + n·I.
inline Matrix random_spd(std::mt19937_64& rng, int n) {
  const Matrix a = random_matrix(rng, n, n);
  return a * a.transpose() + n * Matrix::Identity(n, n);
}

/// Lower-triangular factor with a positive diagonal bounded away from zero.
inline Matrix random_lower(std::mt19937_64& rng, int n) {
  Matrix l = random_matrix(rng, n, n).triangularView<Eigen::Lower>();
  for (int i = 0; i < n; ++i) l(i, i) = 1.0 + std::abs(l(i, i));
  return l;
}

/// E[x^a] for x ~ N(0, 1): 0 for odd a, (a−1)!! for even a.
inline double gaussian_moment_1d(int a) {
  if (a % 2 != 0) return 0.0;
  double m = 1.0;
  for (int k = a - 1; k > 1; k -= 2) m *= k;
  return m;
}

/// Calls fn(exponents) for every multi-index of length n with total degree ≤ max_degree.
template <typename Fn>
void for_each_monomial(int n, int max_degree, Fn&& fn) {
  std::vector<int> alpha(static_cast<std::size_t>(n), 0);
  auto recurse = [&](auto&& self, int var, int remaining) -> void {
    if (var == n) {
      fn(alpha);
      return;
    }
    for (int d = 0; d <= remaining; ++d) {
      alpha[static_cast<std::size_t>(var)] = d;
      self(self, var + 1, remaining - d);
    }
    alpha[static_cast<std::size_t>(var)] = 0;
  };
  recurse(recurse, 0, max_degree);
}

/// Largest |Σᵢ wᵢ·Πⱼ Γⱼᵢ^αⱼ − E[Πⱼ xⱼ^αⱼ]| over all monomials up to max_degree.
inline double max_moment_error(const Matrix& gammas, const Vector& w, int max_degree) {
  const int n = static_cast<int>(gammas.rows());
  double worst = 0.0;
  for_each_monomial(n, max_degree, [&](const std::vector<int>& alpha) {
    double exact = 1.0;
    for (int j = 0; j < n; ++j) exact *= gaussian_moment_1d(alpha[static_cast<std::size_t>(j)]);
    double quad = 0.0;
    for (Eigen::Index i = 0; i < gammas.cols(); ++i) {
      double term = w(i);
      for (int j = 0; j < n; ++j) term *= std::pow(gammas(j, i), alpha[static_cast<std::size_t>(j)]);
      quad += term;
    }
    worst = std::max(worst, std::abs(quad - exact));
  });
  return worst;
}

/// dx = F·x·dt + G·dβ.
inline ProcessModel linear_process(const Matrix& f, const Matrix& g, const Matrix& q) {
  ProcessModel model;
  model.n = static_cast<int>(f.rows());
  model.drift = [f](double, const Vector& x) -> Vector { return f * x; };
  model.jacobian = [f](double, const Vector&) -> Matrix { return f; };
  model.diffusion = g;
  model.diffusion_cov = q;
  return model;
}

/// z = H·x + v.
inline MeasurementModel linear_measurement(const Matrix& h, const Matrix& r) {
  return make_measurement_model(
      static_cast<int>(h.rows()), [h](int, const Matrix& x) -> Matrix { return h * x; },
      [h](int, const Vector&) -> Matrix { return h; }, r);
}

/// Exact discretisation of dx = F·x·dt + G·dβ over dt (Van Loan):
/// x_k = Φ·x_{k−1} + w_k with Cov(w_k) = Q_d.
struct DiscreteLinearModel {
  Matrix phi;
  Matrix qd;
};

inline DiscreteLinearModel discretize(const Matrix& f, const Matrix& gqg, double dt) {
  const Eigen::Index n = f.rows();
  Matrix m = Matrix::Zero(2 * n, 2 * n);
  m.topLeftCorner(n, n) = -f;
  m.topRightCorner(n, n) = gqg;
  m.bottomRightCorner(n, n) = f.transpose();
  const Matrix e = (m * dt).exp();
  DiscreteLinearModel out;
  out.phi = e.bottomRightCorner(n, n).transpose();
  out.qd = out.phi * e.topRightCorner(n, n);
  out.qd = 0.5 * (out.qd + out.qd.transpose());
  return out;
}

/// Random linear-Gaussian scenario: stable drift, n states, m measurements.
inline Scenario random_linear_scenario(std::mt19937_64& rng, int n, int m) {
  Scenario s;
  s.name = "linear";
  s.noise_name = "gauss";
  const Matrix f = 0.3 * random_matrix(rng, n, n) - 0.5 * Matrix::Identity(n, n);
  s.process = linear_process(f, 0.5 * random_matrix(rng, n, n), Matrix::Identity(n, n));
  const Matrix h = random_matrix(rng, m, n);
  s.measurement = linear_measurement(h, 0.5 * Matrix::Identity(m, m) + 0.1 * random_spd(rng, m));
  s.noise = gaussian_noise(s.measurement.noise_cov);
  s.initial = {random_matrix(rng, n, 1), random_spd(rng, n)};
  return s;
}

/// Posterior means of the discrete Kalman filter run on the exact discretisation
/// of a linear scenario.
inline std::vector<Vector> kalman_filter_means(const Scenario& s, const SimulatedDataset& data) {
  const Matrix f = s.process.jacobian_at(0.0, s.initial.mean);
  const Matrix gqg = s.process.process_noise();
  const Matrix h = s.measurement.jacobian(0, s.initial.mean);
  const Matrix& r = s.measurement.noise_cov;
  Vector x = s.initial.mean;
  Matrix p = s.initial.cov;
  double t_prev = 0.0;
  std::vector<Vector> means;
  for (std::size_t k = 0; k < data.size(); ++k) {
    const DiscreteLinearModel d = discretize(f, gqg, data.times[k] - t_prev);
    x = d.phi * x;
    p = d.phi * p * d.phi.transpose() + d.qd;
    const Matrix re = h * p * h.transpose() + r;
    const Matrix k_gain = p * h.transpose() * re.llt().solve(Matrix::Identity(re.rows(), re.cols()));
    x += k_gain * (data.measurements[k] - h * x);
    const Matrix a = Matrix::Identity(p.rows(), p.cols()) - k_gain * h;
    p = a * p * a.transpose() + k_gain * r * k_gain.transpose();
    means.push_back(x);
    t_prev = data.times[k];
  }
  return means;
}

inline double rel_err(const Matrix& a, const Matrix& b) {
  const double scale = std::max(b.norm(), 1e-300);
  return (a - b).norm() / scale;
}

}  // namespace cdkf::testing
