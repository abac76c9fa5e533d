#pragma once

#include "cdkf/linalg.hpp"
#include "cdkf/ode.hpp"
#include "cdkf/system.hpp"

namespace cdkf {

struct GaussianBelief {
  Vector mean;
  Matrix cov;
};

/// Mean plus lower-triangular Cholesky factor S of the covariance (P = S·Sᵀ).
struct SqrtGaussianBelief {
  Vector mean;
  Matrix sqrt_cov;

  GaussianBelief to_full() const { return {mean, sqrt_cov * sqrt_cov.transpose()}; }
  static SqrtGaussianBelief from_full(const GaussianBelief& b) {
    return {b.mean, cholesky_lower(b.cov)};
  }
};

// Column-stacked [mean | matrix] as a flat vector of length n·(n+1).
Vector pack_belief(const GaussianBelief& belief);
Vector pack_belief(const SqrtGaussianBelief& belief);
/// Throws LengthMismatch unless v.size() == n·(n+1).
GaussianBelief unpack_belief(const Vector& v, int n);
SqrtGaussianBelief unpack_sqrt_belief(const Vector& v, int n);

/// Moment equations on the packed (x̂, P):
///   dx̂/dt = f(t, x̂),   dP/dt = F·P + P·Fᵀ + G·Q·Gᵀ.
OdeRhs mde_rhs(const ProcessModel& model);

/// Cholesky-factor form on the packed (x̂, S):
///   dS/dt = S·Φ(A + Aᵀ + B),  A = S⁻¹·F·S,  B = S⁻¹·G·Q·Gᵀ·S⁻ᵀ.
/// A and B come from triangular solves; S must stay nonsingular.
OdeRhs sqrt_mde_rhs(const ProcessModel& model);

/// Integrates the moment equations over [t0, t1]. The covariance is
/// symmetrized on exit. A zero-length span returns the input.
GaussianBelief tu_ekf(const GaussianBelief& belief, const ProcessModel& model, double t0, double t1,
                      const Tolerances& tol);

/// Square-root counterpart of tu_ekf. If the integrated factor ends with a
/// non-positive diagonal entry, it is re-factorized from S·Sᵀ (throws
/// NotPositiveDefinite if that fails).
SqrtGaussianBelief tu_ekf_sqrt(const SqrtGaussianBelief& belief, const ProcessModel& model,
                               double t0, double t1, const Tolerances& tol);

}  // namespace cdkf
