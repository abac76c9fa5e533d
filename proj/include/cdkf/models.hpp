#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cdkf/system.hpp"
#include "cdkf/time_update.hpp"

namespace cdkf {

constexpr double deg_to_rad(double deg) { return deg * 3.14159265358979323846 / 180.0; }

// ---------------------------------------------------------------------------
// Coordinated turn: x = [ε, ε̇, η, η̇, ζ, ζ̇, ω] (m, m/s, rad/s).

struct CoordinatedTurnParams {
  double sigma_velocity = 0.4472135954999579;  // √0.2
  double sigma_turn_rate = deg_to_rad(0.007);
};

/// f = [ε̇, −ω·η̇, η̇, ω·ε̇, ζ̇, 0, 0]
Vector ct_drift(double t, const Vector& x);
Matrix ct_jacobian(double t, const Vector& x);
ProcessModel make_coordinated_turn_model(const CoordinatedTurnParams& params = {});

// ---------------------------------------------------------------------------
// Radar at the origin: z = [range (m), azimuth (rad), elevation (rad)].

struct RadarParams {
  double sigma_range = 50.0;
  double sigma_azimuth = deg_to_rad(0.1);
  double sigma_elevation = deg_to_rad(0.1);
};

/// Columnwise r = √(ε²+η²+ζ²), θ = atan2(η, ε), φ = atan(ζ/√(ε²+η²)).
/// Throws DegenerateGeometry when a column has ε² + η² = 0.
Matrix radar_h(int k, const Matrix& x);
Matrix radar_jacobian(int k, const Vector& x);
MeasurementModel make_radar_model(const RadarParams& params = {});

/// Observation of the coordinated-turn state through two nearly parallel rows:
/// H = [1 … 1; 1 … 1+δ], R = δ²·I₂.
Matrix illcond_matrix(double delta);
MeasurementModel make_illcond_model(double delta);

// ---------------------------------------------------------------------------
// Measurement noise, optionally a glint mixture:
//   v ~ N(0, R) with probability 1 − p_g, N(0, R_g) with probability p_g.

struct MeasurementNoise {
  Matrix cov;
  double glint_prob = 0.0;
  Matrix glint_cov;

  Matrix mixture_cov() const;
};

MeasurementNoise gaussian_noise(const Matrix& cov);
MeasurementNoise glint_noise(const Matrix& cov, double glint_prob, double glint_scale);

Vector sample_measurement_noise(const MeasurementNoise& noise, Rng& rng);

// ---------------------------------------------------------------------------

/// Everything needed to simulate data for, and initialize, one experiment.
struct Scenario {
  std::string name;
  std::string noise_name;
  ProcessModel process;
  MeasurementModel measurement;
  MeasurementNoise noise;
  GaussianBelief initial;  // (x̄₀, Π₀)
};

/// x̄₀ = [1000 m, 0, 2650 m, 150 m/s, 200 m, 0, 3°/s], Π₀ = 0.01·I₇.
GaussianBelief coordinated_turn_initial_belief();

Scenario radar_scenario(bool glint);
Scenario illcond_scenario(double delta);

struct SimulatedDataset {
  std::vector<double> times;         // t_1 … t_K
  std::vector<Vector> truth;         // x(t_k)
  std::vector<Vector> measurements;  // z_k
  Vector initial_truth;              // x(t_0)
  std::uint64_t seed = 0;
  double delta_s = 0.0;
  double em_step_s = 0.0;
  std::string model;
  std::string noise;

  std::size_t size() const { return times.size(); }
  double horizon_s() const { return delta_s * static_cast<double>(times.size()); }
};

/// Draws x(t₀) ~ N(x̄₀, Π₀), integrates the SDE by Euler–Maruyama over each
/// sampling interval and adds measurement noise. Deterministic per seed.
SimulatedDataset simulate_dataset(const Scenario& scenario, double delta_s, int steps,
                                  double em_step_s, std::uint64_t seed);

/// FNV-1a over the raw bytes of times, truth and measurements.
std::uint64_t dataset_digest(const SimulatedDataset& data);

/// CSV (`t,x1..xn,z1..zm`, 17 significant digits) plus a JSON manifest
/// `{seed, delta_s, horizon_s, em_step_s, model, noise}` next to it.
void write_dataset(const SimulatedDataset& data, const std::filesystem::path& csv_path,
                   const std::filesystem::path& manifest_path);
SimulatedDataset read_dataset(const std::filesystem::path& csv_path,
                              const std::filesystem::path& manifest_path);

}  // namespace cdkf
