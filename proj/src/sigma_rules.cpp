#include "cdkf/sigma_rules.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "cdkf/error.hpp"

namespace cdkf {

std::string_view to_string(RuleKind kind) {
  return kind == RuleKind::Ukf ? "ukf" : "5dckf";
}

WeightFactor build_weight_factor(const Vector& w, const Vector& wc) {
  const Eigen::Index count = w.size();
  if (wc.size() != count) {
    throw Error(ErrorKind::DimensionMismatch, "mean and covariance weights differ in length");
  }
  std::vector<int> signs(static_cast<std::size_t>(count));
  Vector root(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    signs[static_cast<std::size_t>(i)] = wc(i) < 0.0 ? -1 : 1;
    root(i) = std::sqrt(std::abs(wc(i)));
  }
  const Matrix centering = Matrix::Identity(count, count) - w * Vector::Ones(count).transpose();
  return {centering * root.asDiagonal(), Signature(std::move(signs))};
}

namespace {

void finish_rule(SigmaRule& rule) {
  WeightFactor factor = build_weight_factor(rule.w, rule.wc);
  rule.sqrt_w_abs = std::move(factor.sqrt_w_abs);
  rule.signature = std::move(factor.signature);
  const int count = rule.size();
  const Matrix centering =
      Matrix::Identity(count, count) - rule.w * Vector::Ones(count).transpose();
  rule.weight_matrix = centering * rule.wc.asDiagonal() * centering.transpose();
}

}  // namespace

SigmaRule make_5dckf_rule(int n) {
  if (n < 2) throw Error(ErrorKind::InvalidDimension, "5D-CKF rule needs n >= 2");

  const int pairs = n * (n - 1) / 2;
  const int count = 2 * n * n + 1;
  const double np2 = n + 2.0;
  const double scale = std::sqrt(np2);
  const double half = std::sqrt(0.5);

  SigmaRule rule;
  rule.kind = RuleKind::FifthDegreeCubature;
  rule.n = n;
  rule.gammas = Matrix::Zero(n, count);
  rule.w = Vector::Zero(count);

  rule.w(0) = 2.0 / np2;

  // s-family points: 1/(n+2)² each (the weight that makes the rule degree-5
  // exact and normalized).
  const double s_weight = 1.0 / (np2 * np2);
  const double axis_weight = (4.0 - n) / (2.0 * np2 * np2);

  int col = 1;
  for (const double sign : {1.0, -1.0}) {  // s⁺ family, then s⁻ family
    Matrix family = Matrix::Zero(n, pairs);
    int j = 0;
    for (int k = 0; k < n; ++k) {
      for (int l = k + 1; l < n; ++l) {
        family(k, j) = half;
        family(l, j) = sign * half;
        ++j;
      }
    }
    rule.gammas.middleCols(col, pairs) = scale * family;
    rule.gammas.middleCols(col + pairs, pairs) = -scale * family;
    rule.w.segment(col, 2 * pairs).setConstant(s_weight);
    col += 2 * pairs;
  }

  rule.gammas.middleCols(col, n) = scale * Matrix::Identity(n, n);
  rule.gammas.middleCols(col + n, n) = -scale * Matrix::Identity(n, n);
  rule.w.segment(col, 2 * n).setConstant(axis_weight);

  rule.wc = rule.w;
  finish_rule(rule);
  return rule;
}

SigmaRule make_ukf_rule(int n, const UkfParams& params) {
  if (n < 1) throw Error(ErrorKind::InvalidDimension, "UKF rule needs n >= 1");
  const double lambda = params.lambda(n);
  if (!(n + lambda > 0.0)) {
    throw Error(ErrorKind::DegenerateScaling, "UKF scaling n + lambda must be positive");
  }
  const int count = 2 * n + 1;
  const double spread = std::sqrt(n + lambda);

  Matrix gammas = Matrix::Zero(n, count);
  gammas.middleCols(1, n) = spread * Matrix::Identity(n, n);
  gammas.middleCols(1 + n, n) = -spread * Matrix::Identity(n, n);

  Vector w = Vector::Constant(count, 1.0 / (2.0 * (n + lambda)));
  w(0) = lambda / (n + lambda);
  Vector wc = w;
  wc(0) = w(0) + 1.0 - params.alpha * params.alpha + params.beta;

  // Stable partition: points with non-negative wc first, negative ones last.
  std::vector<int> order(static_cast<std::size_t>(count));
  std::iota(order.begin(), order.end(), 0);
  std::stable_partition(order.begin(), order.end(), [&](int i) { return wc(i) >= 0.0; });

  SigmaRule rule;
  rule.kind = RuleKind::Ukf;
  rule.n = n;
  rule.gammas.resize(n, count);
  rule.w.resize(count);
  rule.wc.resize(count);
  for (int i = 0; i < count; ++i) {
    const int src = order[static_cast<std::size_t>(i)];
    rule.gammas.col(i) = gammas.col(src);
    rule.w(i) = w(src);
    rule.wc(i) = wc(src);
  }
  finish_rule(rule);
  return rule;
}

Matrix draw_sigma_matrix(const Vector& mean, const Matrix& sqrt_cov, const SigmaRule& rule) {
  if (mean.size() != rule.n || sqrt_cov.rows() != rule.n || sqrt_cov.cols() != rule.n) {
    throw Error(ErrorKind::DimensionMismatch, "sigma rule, mean and factor dimensions differ");
  }
  Matrix x = sqrt_cov * rule.gammas;
  x.colwise() += mean;
  return x;
}

}  // namespace cdkf
