#include "pimex/models.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace pimex {

Eigen::Matrix2d LinearModelParams::matrix() const {
  Eigen::Matrix2d A;
  A << a11, a12, a21, a22;
  return A;
}

LinearScalarModel::LinearScalarModel(LinearModelParams p, Index index)
    : p_(std::move(p)), index_(index) {
  if (index != 0 && index != 1) throw DimensionError("linear model has subsystems 0 and 1");
  diag_ = index == 0 ? p_.a11 : p_.a22;
  off_ = index == 0 ? p_.a12 : p_.a21;
}

Vector LinearScalarModel::residual(const Vector& u, const Vector& c, const Vector&,
                                   double) const {
  return Vector::Constant(1, diag_ * u(0) + off_ * c(0));
}

Vector LinearScalarModel::coupling(StateSpan states, const Vector&, double) const {
  return states[static_cast<size_t>(1 - index_)];
}

Matrix LinearScalarModel::d_residual_d_state(const Vector&, const Vector&, const Vector&,
                                             double) const {
  return Matrix::Constant(1, 1, diag_);
}

Matrix LinearScalarModel::d_residual_d_coupling(const Vector&, const Vector&, const Vector&,
                                                double) const {
  return Matrix::Constant(1, 1, off_);
}

Matrix LinearScalarModel::d_residual_d_param(const Vector&, const Vector&, const Vector& mu,
                                             double) const {
  return Matrix::Zero(1, mu.size());
}

Matrix LinearScalarModel::d_coupling_d_state(Index k, StateSpan, const Vector&, double) const {
  return Matrix::Constant(1, 1, k == index_ ? 0.0 : 1.0);
}

Matrix LinearScalarModel::d_coupling_d_param(StateSpan, const Vector& mu, double) const {
  return Matrix::Zero(1, mu.size());
}

Vector LinearScalarModel::initial_state(const Vector& mu) const {
  return Vector::Constant(1, p_.u0(index_) + mu(0) * p_.v0(index_));
}

Matrix LinearScalarModel::d_initial_d_param(const Vector& mu) const {
  Matrix d = Matrix::Zero(1, mu.size());
  d(0, 0) = p_.v0(index_);
  return d;
}

CoupledSystem build_linear_model(const LinearModelParams& p) {
  std::vector<SubsystemPtr> subs{std::make_shared<LinearScalarModel>(p, 0),
                                 std::make_shared<LinearScalarModel>(p, 1)};
  return CoupledSystem(std::move(subs), Vector::Constant(1, p.mu));
}

Eigen::Vector2d linear_model_solution(const LinearModelParams& p, double t) {
  const Eigen::Matrix2d E = (p.matrix() * t).exp();
  return E * (p.u0 + p.mu * p.v0);
}

Vector ScalarDecayModel::residual(const Vector& u, const Vector&, const Vector& mu,
                                  double) const {
  return -mu(0) * u;
}

Vector ScalarDecayModel::coupling(StateSpan, const Vector&, double) const { return Vector(0); }

Matrix ScalarDecayModel::d_residual_d_state(const Vector&, const Vector&, const Vector& mu,
                                            double) const {
  return Matrix::Constant(1, 1, -mu(0));
}

Matrix ScalarDecayModel::d_residual_d_coupling(const Vector&, const Vector&, const Vector&,
                                               double) const {
  return Matrix::Zero(1, 0);
}

Matrix ScalarDecayModel::d_residual_d_param(const Vector& u, const Vector&, const Vector& mu,
                                            double) const {
  Matrix d = Matrix::Zero(1, mu.size());
  d(0, 0) = -u(0);
  return d;
}

Matrix ScalarDecayModel::d_coupling_d_state(Index, StateSpan states, const Vector&,
                                            double) const {
  return Matrix::Zero(0, states[0].size());
}

Matrix ScalarDecayModel::d_coupling_d_param(StateSpan, const Vector& mu, double) const {
  return Matrix::Zero(0, mu.size());
}

Vector ScalarDecayModel::initial_state(const Vector&) const { return Vector::Constant(1, u0_); }

Matrix ScalarDecayModel::d_initial_d_param(const Vector& mu) const {
  return Matrix::Zero(1, mu.size());
}

CoupledSystem build_scalar_decay(double mu, double u0) {
  return CoupledSystem({std::make_shared<ScalarDecayModel>(u0)}, Vector::Constant(1, mu));
}

double scalar_decay_objective(double mu, double T, double u0) {
  if (mu == 0.0) return u0 * u0 * T;
  return u0 * u0 * -std::expm1(-2.0 * mu * T) / (2.0 * mu);
}

double scalar_decay_gradient(double mu, double T, double u0) {
  // J = u0^2 T phi(x), x = 2 mu T, phi(x) = (1 - e^{-x}) / x, so
  // dJ/dmu = 2 u0^2 T^2 phi'(x). The closed form of phi' cancels
  // catastrophically for small x; use its series there.
  const double x = 2.0 * mu * T;
  double dphi = 0.0;
  if (std::abs(x) < 0.1) {
    // phi'(x) = sum_{k>=1} k (-x)^{k-1} (-1) / (k+1)!
    double term = 1.0;  // (-x)^{k-1} / (k+1)! for k = 1 is 1/2
    double fact = 2.0;
    for (int k = 1; k < 20; ++k) {
      dphi -= static_cast<double>(k) * term / fact;
      term *= -x;
      fact *= static_cast<double>(k + 2);
    }
  } else {
    dphi = (x * std::exp(-x) + std::expm1(-x)) / (x * x);
  }
  return 2.0 * u0 * u0 * T * T * dphi;
}

}  // namespace pimex
