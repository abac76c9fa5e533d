#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace cdkf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Diagonal ±1 matrix stored as a sign vector. All -1 entries trail the +1
/// entries, which is the layout the hyperbolic triangularization expects.
class Signature {
 public:
  Signature() = default;
  /// Throws InvalidArgument if an entry is not ±1 or a +1 follows a -1.
  explicit Signature(std::vector<int> signs);

  static Signature positive(std::size_t count);
  static Signature with_counts(std::size_t positive, std::size_t negative);

  std::size_t size() const { return signs_.size(); }
  std::size_t positive_count() const { return positive_; }
  std::size_t negative_count() const { return signs_.size() - positive_; }
  int operator[](std::size_t i) const { return signs_[i]; }
  const std::vector<int>& signs() const { return signs_; }

  Matrix matrix() const;

  /// diag(this, other); the result must still have trailing negatives.
  Signature concat(const Signature& other) const;

  friend bool operator==(const Signature&, const Signature&) = default;

 private:
  std::vector<int> signs_;
  std::size_t positive_ = 0;
};

/// Lower Cholesky factor L with L·Lᵀ = M and positive diagonal. M may carry
/// asymmetry up to 1e-9·‖M‖_F; it is symmetrized before factoring.
/// Throws NotPositiveDefinite on a non-positive pivot.
Matrix cholesky_lower(const Matrix& m);

enum class Side { Left, Right };

/// Solves with a triangular L without forming an inverse:
///   Left:  L·X = B   (transpose: Lᵀ·X = B)
///   Right: X·L = B   (transpose: X·Lᵀ = B)
/// Throws SingularTriangular on a zero diagonal entry.
Matrix trisolve(const Matrix& lower, const Matrix& b, Side side, bool transpose = false);

/// strict-lower(M) + diag(M)/2.
Matrix phi_map(const Matrix& m);

/// J-orthogonal block triangularization: finds Q with Q·J·Qᵀ = J and
/// pre·Q = [R | 0], R lower triangular with positive diagonal, so that
/// R·Rᵀ = pre·J·preᵀ.
///
/// Positive-signature columns are compressed with Householder reflectors,
/// then each negative column is annihilated row by row against the diagonal
/// using hyperbolic rotations in the mixed (downdating) form.
///
/// Throws HyperbolicBreakdown when a rotation would need |ρ| ≥ 1, i.e. the
/// implicit Gram matrix is numerically indefinite, and InvalidDimension when
/// the positive block has fewer columns than pre has rows.
Matrix hyperbolic_block_triangularize(const Matrix& pre, const Signature& j);

/// Leading rows×rows block of a post-array.
inline Matrix leading_block(const Matrix& post) {
  return post.leftCols(post.rows());
}

Matrix symmetrize(const Matrix& m);

bool all_finite(const Matrix& m);

}  // namespace cdkf
