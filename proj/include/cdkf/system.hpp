#pragma once

#include <functional>
#include <random>
#include <vector>

#include "cdkf/linalg.hpp"

namespace cdkf {

using Rng = std::mt19937_64;

/// dx = f(t, x)·dt + G·dβ,  E[dβ·dβᵀ] = Q·dt.
struct ProcessModel {
  using Drift = std::function<Vector(double, const Vector&)>;
  using Jacobian = std::function<Matrix(double, const Vector&)>;

  int n = 0;
  Drift drift;
  /// Optional; central differences of `drift` are used when empty.
  Jacobian jacobian;
  Matrix diffusion;      // G, n×q
  Matrix diffusion_cov;  // Q, q×q

  int noise_dim() const { return static_cast<int>(diffusion.cols()); }
  Matrix jacobian_at(double t, const Vector& x) const;
  /// G·Q·Gᵀ
  Matrix process_noise() const;
};

/// Central-difference Jacobian with step √eps·max(1, |xᵢ|).
Matrix finite_difference_jacobian(const ProcessModel::Drift& f, double t, const Vector& x);

/// z_k = h(k, x(t_k)) + v_k.
struct MeasurementModel {
  /// Maps an n×N matrix of states columnwise to an m×N matrix.
  using Function = std::function<Matrix(int, const Matrix&)>;
  using Jacobian = std::function<Matrix(int, const Vector&)>;

  int m = 0;
  Function h;
  Jacobian jacobian;  // optional, required by the linearized update
  Matrix noise_cov;
  Matrix sqrt_noise_cov;
  std::vector<bool> angular;

  Vector evaluate(int k, const Vector& x) const;
  /// Wraps components flagged as angular into (−π, π].
  Vector wrap_innovation(Vector nu) const;
};

/// Builds a measurement model, factoring R once.
MeasurementModel make_measurement_model(int m, MeasurementModel::Function h,
                                        MeasurementModel::Jacobian jacobian, Matrix noise_cov,
                                        std::vector<bool> angular = {});

/// Wraps an angle into (−π, π].
double wrap_angle(double a);

}  // namespace cdkf
