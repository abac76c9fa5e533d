#pragma once

#include <string_view>

#include "cdkf/linalg.hpp"

namespace cdkf {

enum class RuleKind { Ukf, FifthDegreeCubature };

std::string_view to_string(RuleKind kind);

struct UkfParams {
  double alpha = 1.0;
  double beta = 0.0;
  double kappa = 0.0;

  /// α = 1, β = 0, κ = 3 − n.
  static UkfParams classical(int n) { return {1.0, 0.0, 3.0 - n}; }

  double lambda(int n) const { return alpha * alpha * (kappa + n) - n; }
};

/// Weighted point set for Gaussian integrals with unit covariance.
///
/// Columns of `gammas` are the generator vectors; a sigma matrix for mean μ and
/// factor L is μ·1ᵀ + L·gammas. Points carrying negative covariance weights are
/// stored last, so that `signature` = diag(sgn(wc)) has trailing -1 entries and
///   W = sqrt_w_abs · diag(signature) · sqrt_w_absᵀ
///     = [I − w·1ᵀ] diag(wc) [I − w·1ᵀ]ᵀ.
struct SigmaRule {
  RuleKind kind = RuleKind::Ukf;
  int n = 0;
  Matrix gammas;
  Vector w;
  Vector wc;
  Matrix sqrt_w_abs;
  Signature signature;
  /// The full N×N weight matrix W.
  Matrix weight_matrix;

  int size() const { return static_cast<int>(w.size()); }
};

/// Fifth-degree spherical-radial cubature rule with N = 2n²+1 points.
/// Throws InvalidDimension for n < 2.
SigmaRule make_5dckf_rule(int n);

/// Unscented rule with N = 2n+1 points. Throws DegenerateScaling if n+λ ≤ 0.
SigmaRule make_ukf_rule(int n, const UkfParams& params);

struct WeightFactor {
  Matrix sqrt_w_abs;
  Signature signature;
};

/// |W|^{1/2} = [I − w·1ᵀ]·diag(√|wc|), signature = sgn(wc) with sgn(0) = +1.
WeightFactor build_weight_factor(const Vector& w, const Vector& wc);

/// Column i = mean + sqrt_cov·γᵢ.
Matrix draw_sigma_matrix(const Vector& mean, const Matrix& sqrt_cov, const SigmaRule& rule);

}  // namespace cdkf
