#include "cdkf/time_update.hpp"

#include <sstream>

#include "cdkf/error.hpp"

namespace cdkf {

namespace {

Vector pack(const Vector& mean, const Matrix& m) {
  const Eigen::Index n = mean.size();
  if (m.rows() != n || m.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch, "belief mean and matrix dimensions differ");
  }
  Vector v(n * (n + 1));
  v.head(n) = mean;
  v.tail(n * n) = m.reshaped();
  return v;
}

void check_length(const Vector& v, int n) {
  if (n < 1 || v.size() != static_cast<Eigen::Index>(n) * (n + 1)) {
    std::ostringstream os;
    os << "packed belief has length " << v.size() << ", expected n(n+1) for n = " << n;
    throw Error(ErrorKind::LengthMismatch, os.str());
  }
}

}  // namespace

Vector pack_belief(const GaussianBelief& belief) { return pack(belief.mean, belief.cov); }

Vector pack_belief(const SqrtGaussianBelief& belief) { return pack(belief.mean, belief.sqrt_cov); }

GaussianBelief unpack_belief(const Vector& v, int n) {
  check_length(v, n);
  return {v.head(n), v.tail(n * n).reshaped(n, n)};
}

SqrtGaussianBelief unpack_sqrt_belief(const Vector& v, int n) {
  check_length(v, n);
  return {v.head(n), v.tail(n * n).reshaped(n, n)};
}

OdeRhs mde_rhs(const ProcessModel& model) {
  const Matrix gqg = model.process_noise();
  const int n = model.n;
  return [model, gqg, n](double t, const Vector& v) {
    const auto x = v.head(n);
    const auto p = v.tail(n * n).reshaped(n, n);
    const Matrix jac = model.jacobian_at(t, x);
    Vector out(v.size());
    out.head(n) = model.drift(t, x);
    const Matrix jp = jac * p;
    out.tail(n * n).reshaped(n, n) = jp + jp.transpose() + gqg;
    return out;
  };
}

OdeRhs sqrt_mde_rhs(const ProcessModel& model) {
  const Matrix gqg = model.process_noise();
  const int n = model.n;
  return [model, gqg, n](double t, const Vector& v) {
    const auto x = v.head(n);
    const Matrix s = v.tail(n * n).reshaped(n, n);
    const Matrix jac = model.jacobian_at(t, x);
    const Matrix a = trisolve(s, jac * s, Side::Left);
    const Matrix b = trisolve(s, trisolve(s, gqg, Side::Left), Side::Right, true);
    Vector out(v.size());
    out.head(n) = model.drift(t, x);
    out.tail(n * n).reshaped(n, n) = s * phi_map(a + a.transpose() + b);
    return out;
  };
}

GaussianBelief tu_ekf(const GaussianBelief& belief, const ProcessModel& model, double t0, double t1,
                      const Tolerances& tol) {
  if (!(t1 > t0)) return belief;
  const IntegrationResult r = integrate_adaptive(mde_rhs(model), t0, t1, pack_belief(belief), tol);
  GaussianBelief out = unpack_belief(r.y, model.n);
  out.cov = symmetrize(out.cov);
  return out;
}

SqrtGaussianBelief tu_ekf_sqrt(const SqrtGaussianBelief& belief, const ProcessModel& model,
                               double t0, double t1, const Tolerances& tol) {
  if (!(t1 > t0)) return belief;
  const IntegrationResult r =
      integrate_adaptive(sqrt_mde_rhs(model), t0, t1, pack_belief(belief), tol);
  SqrtGaussianBelief out = unpack_sqrt_belief(r.y, model.n);
  // Φ keeps the factor lower triangular; drop roundoff above the diagonal.
  out.sqrt_cov = out.sqrt_cov.triangularView<Eigen::Lower>();
  if ((out.sqrt_cov.diagonal().array() <= 0.0).any()) {
    out.sqrt_cov = cholesky_lower(out.sqrt_cov * out.sqrt_cov.transpose());
  }
  return out;
}

}  // namespace cdkf
