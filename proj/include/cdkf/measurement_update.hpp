#pragma once

#include "cdkf/sigma_rules.hpp"
#include "cdkf/system.hpp"
#include "cdkf/time_update.hpp"

namespace cdkf {

struct UpdateResult {
  GaussianBelief posterior;
  Vector predicted;   // ẑ
  Vector innovation;  // wrap(z − ẑ)
  Matrix gain;
  Matrix innovation_cov;  // R_e
};

struct SqrtUpdateResult {
  SqrtGaussianBelief posterior;
  Vector predicted;
  Vector innovation;
  Matrix gain;
  Matrix sqrt_innovation_cov;  // R_e^{1/2}, lower triangular
  Matrix normalized_cross_cov;  // P̄_xz = P_xz·R_e^{−ᵀ/2}
};

/// Sigma-rule update in covariance form:
///   R_e = Z·W·Zᵀ + R,  P_xz = X·W·Zᵀ,  K = P_xz·R_e⁻¹,  P⁺ = P − K·R_e·Kᵀ.
/// R_e is inverted through its Cholesky factor.
UpdateResult mu_conventional(const GaussianBelief& prior, const Vector& z, int k,
                             const MeasurementModel& model, const SigmaRule& rule);

/// One-sweep square-root update: J-orthogonal triangularization of
///   [ R^{1/2}   Z·|W|^{1/2} ]        [ R_e^{1/2}   0     0 ]
///   [ 0         X·|W|^{1/2} ] · Q  = [ P̄_xz       S⁺    0 ]
/// with J = diag(I_m, signature). K = P̄_xz·R_e^{−1/2}.
SqrtUpdateResult mu_sqrt_onesweep(const SqrtGaussianBelief& prior, const Vector& z, int k,
                                  const MeasurementModel& model, const SigmaRule& rule);

/// Two-sweep square-root update built on the Joseph-type form
///   P⁺ = (X − K·Z)·W·(X − K·Z)ᵀ + K·R·Kᵀ.
SqrtUpdateResult mu_sqrt_joseph(const SqrtGaussianBelief& prior, const Vector& z, int k,
                                const MeasurementModel& model, const SigmaRule& rule);

/// Linearized EKF update with Joseph-stabilized covariance. Requires
/// model.jacobian.
UpdateResult mu_ekf_linearized(const GaussianBelief& prior, const Vector& z, int k,
                               const MeasurementModel& model);

}  // namespace cdkf
