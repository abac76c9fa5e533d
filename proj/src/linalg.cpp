#include "cdkf/linalg.hpp"

#include <cmath>
#include <sstream>

#include "cdkf/error.hpp"

namespace cdkf {

Signature::Signature(std::vector<int> signs) : signs_(std::move(signs)) {
  bool seen_negative = false;
  for (std::size_t i = 0; i < signs_.size(); ++i) {
    const int s = signs_[i];
    if (s != 1 && s != -1) {
      throw Error(ErrorKind::InvalidArgument, "signature entries must be +1 or -1");
    }
    if (s == -1) {
      seen_negative = true;
    } else {
      if (seen_negative) {
        throw Error(ErrorKind::InvalidArgument,
                    "signature must place all -1 entries after the +1 entries");
      }
      ++positive_;
    }
  }
}

Signature Signature::positive(std::size_t count) { return with_counts(count, 0); }

Signature Signature::with_counts(std::size_t positive, std::size_t negative) {
  std::vector<int> signs(positive, 1);
  signs.insert(signs.end(), negative, -1);
  return Signature(std::move(signs));
}

Matrix Signature::matrix() const {
  Vector d(static_cast<Eigen::Index>(signs_.size()));
  for (std::size_t i = 0; i < signs_.size(); ++i) d(static_cast<Eigen::Index>(i)) = signs_[i];
  return d.asDiagonal();
}

Signature Signature::concat(const Signature& other) const {
  std::vector<int> signs = signs_;
  signs.insert(signs.end(), other.signs_.begin(), other.signs_.end());
  return Signature(std::move(signs));
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

bool all_finite(const Matrix& m) { return m.allFinite(); }

Matrix cholesky_lower(const Matrix& m) {
  const Eigen::Index n = m.rows();
  if (n < 1 || m.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch, "cholesky_lower needs a non-empty square matrix");
  }
  if (!m.allFinite()) {
    throw Error(ErrorKind::NonFiniteState, "cholesky_lower input has non-finite entries");
  }
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * m.norm()) {
    std::ostringstream os;
    os << "cholesky_lower input asymmetric (max |M - Mᵀ| = " << asym << ")";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  const Matrix a = symmetrize(m);

  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = a(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (!(pivot > 0.0)) {
      std::ostringstream os;
      os << "pivot " << j << " = " << pivot;
      throw Error(ErrorKind::NotPositiveDefinite, os.str());
    }
    const double d = std::sqrt(pivot);
    l(j, j) = d;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / d;
    }
  }
  return l;
}

Matrix trisolve(const Matrix& lower, const Matrix& b, Side side, bool transpose) {
  const Eigen::Index n = lower.rows();
  if (lower.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch, "trisolve needs a square triangular factor");
  }
  if ((side == Side::Left && b.rows() != n) || (side == Side::Right && b.cols() != n)) {
    throw Error(ErrorKind::DimensionMismatch, "trisolve right-hand side is not conformable");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lower(i, i) == 0.0) {
      throw Error(ErrorKind::SingularTriangular, "zero diagonal entry in triangular factor");
    }
  }
  const auto tri = lower.triangularView<Eigen::Lower>();
  if (side == Side::Left) {
    if (transpose) return tri.transpose().solve(b);
    return tri.solve(b);
  }
  // X·L = B  <=>  Lᵀ·Xᵀ = Bᵀ
  if (transpose) return tri.solve(b.transpose()).transpose();
  return tri.transpose().solve(b.transpose()).transpose();
}

Matrix phi_map(const Matrix& m) {
  Matrix out = m.triangularView<Eigen::StrictlyLower>();
  out.diagonal() = 0.5 * m.diagonal();
  return out;
}

Matrix hyperbolic_block_triangularize(const Matrix& pre, const Signature& j) {
  const Eigen::Index s = pre.rows();
  const Eigen::Index t = pre.cols();
  if (static_cast<std::size_t>(t) != j.size()) {
    throw Error(ErrorKind::DimensionMismatch, "signature length differs from pre-array width");
  }
  const auto p = static_cast<Eigen::Index>(j.positive_count());
  if (p < s) {
    throw Error(ErrorKind::InvalidDimension,
                "positive block of the signature is narrower than the pre-array height");
  }
  if (!pre.allFinite()) {
    throw Error(ErrorKind::NonFiniteState, "pre-array has non-finite entries");
  }

  Matrix a = pre;

  // Phase 1: orthogonal compression of the positive block into lower form.
  Vector v(p);
  for (Eigen::Index i = 0; i < s; ++i) {
    const Eigen::Index len = p - i;
    auto x = a.row(i).segment(i, len);
    const double norm = x.norm();
    if (norm == 0.0) continue;
    const double alpha = x(0) > 0.0 ? -norm : norm;
    auto vv = v.head(len);
    vv = x.transpose();
    vv(0) -= alpha;
    const double vtv = vv.squaredNorm();
    if (vtv == 0.0) continue;
    for (Eigen::Index r = i + 1; r < s; ++r) {
      auto seg = a.row(r).segment(i, len);
      const double scale = 2.0 * seg.dot(vv.transpose()) / vtv;
      seg -= scale * vv.transpose();
    }
    a(i, i) = alpha;
    a.row(i).segment(i + 1, len - 1).setZero();
  }

  // Phase 2: hyperbolic rotations against each negative column.
  for (Eigen::Index c = p; c < t; ++c) {
    for (Eigen::Index i = 0; i < s; ++i) {
      const double b = a(i, c);
      if (b == 0.0) continue;
      const double d = a(i, i);
      if (!(std::abs(b) < std::abs(d))) {
        std::ostringstream os;
        os << "row " << i << ", column " << c << ": |pivot| = " << std::abs(d)
           << " <= |entry| = " << std::abs(b);
        throw Error(ErrorKind::HyperbolicBreakdown, os.str());
      }
      const double rho = b / d;
      const double ch = 1.0 / std::sqrt((1.0 - rho) * (1.0 + rho));
      for (Eigen::Index r = i; r < s; ++r) {
        const double xr = a(r, i);
        const double yr = a(r, c);
        const double xn = ch * (xr - rho * yr);
        a(r, i) = xn;
        a(r, c) = yr / ch - rho * xn;
      }
      a(i, c) = 0.0;
    }
  }

  for (Eigen::Index i = 0; i < s; ++i) {
    if (a(i, i) < 0.0) a.col(i).tail(s - i) *= -1.0;
    if (!(a(i, i) > 0.0) || !std::isfinite(a(i, i))) {
      std::ostringstream os;
      os << "non-positive diagonal " << a(i, i) << " at " << i;
      throw Error(ErrorKind::HyperbolicBreakdown, os.str());
    }
  }
  return a;
}

}  // namespace cdkf
