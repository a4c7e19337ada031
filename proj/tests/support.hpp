#pragma once

// Shared fixtures: a small nonlinear coupled model with parameter-dependent
// coupling and residual, a QoI with explicit parameter dependence, and
// central-difference Jacobians.

#include "pimex/system.hpp"

#include <cmath>
#include <functional>
#include <memory>

namespace pimex::test {

/// Central differences of f around x, one column per component.
inline Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x,
                          double eps = 1e-6) {
  const Vector f0 = f(x);
  Matrix J(f0.size(), x.size());
  for (Index k = 0; k < x.size(); ++k) {
    Vector xp = x, xm = x;
    xp(k) += eps;
    xm(k) -= eps;
    J.col(k) = (f(xp) - f(xm)) / (2.0 * eps);
  }
  return J;
}

/// max |A - B| relative to max(1, max |B|).
inline double jacobian_error(const Matrix& analytic, const Matrix& fd) {
  if (analytic.rows() != fd.rows() || analytic.cols() != fd.cols()) return INFINITY;
  if (fd.size() == 0) return 0.0;
  const double scale = std::max(1.0, fd.cwiseAbs().maxCoeff());
  return (analytic - fd).cwiseAbs().maxCoeff() / scale;
}

/// Worst relative error over every analytic Jacobian block of subsystem i at
/// the given stacked state.
inline double subsystem_jacobian_error(const CoupledSystem& sys, Index i,
                                       const PartitionedState& states, double t,
                                       double eps = 1e-6) {
  const Subsystem& sub = sys[i];
  const Vector& mu = sys.mu();
  const Vector& u = states[static_cast<size_t>(i)];
  const Vector c = sub.coupling(states, mu, t);
  double worst = 0.0;
  auto track = [&](double e) { worst = std::max(worst, e); };

  track(jacobian_error(sub.d_residual_d_state(u, c, mu, t),
                       fd_jacobian([&](const Vector& x) { return sub.residual(x, c, mu, t); }, u, eps)));
  track(jacobian_error(sub.d_residual_d_coupling(u, c, mu, t),
                       fd_jacobian([&](const Vector& x) { return sub.residual(u, x, mu, t); }, c, eps)));
  track(jacobian_error(sub.d_residual_d_param(u, c, mu, t),
                       fd_jacobian([&](const Vector& x) { return sub.residual(u, c, x, t); }, mu, eps)));
  for (Index k = 0; k < sys.size(); ++k) {
    auto f = [&](const Vector& x) {
      PartitionedState s = states;
      s[static_cast<size_t>(k)] = x;
      return sub.coupling(s, mu, t);
    };
    const Matrix fd = fd_jacobian(f, states[static_cast<size_t>(k)], eps);
    if (!sub.coupling_depends_on(k)) {
      track(fd.size() ? fd.cwiseAbs().maxCoeff() : 0.0);
      continue;
    }
    track(jacobian_error(sub.d_coupling_d_state(k, states, mu, t), fd));
  }
  track(jacobian_error(sub.d_coupling_d_param(states, mu, t),
                       fd_jacobian([&](const Vector& x) { return sub.coupling(states, x, t); }, mu, eps)));
  track(jacobian_error(sub.d_initial_d_param(mu),
                       fd_jacobian([&](const Vector& x) { return sub.initial_state(x); }, mu, eps)));
  return worst;
}

/// Subsystem A, u in R^2, c in R^1:
///   M = [[2, 0.5], [0.5, 1]]
///   r = [-mu0 u0 + sin(c0) + 0.1 t, -u1 - 0.1 u1^3 + mu1 c0 u0]
///   c = mu1 uB0 + 0.5 uB0^2
/// Subsystem B, u in R^1, c in R^2:
///   M = [3],  r = -2 uB0 + c0 c1 - 0.1 mu0^2
///   c = (uA0, mu0 uA1)
class NonlinearA final : public Subsystem {
 public:
  std::string name() const override { return "nonlinear-a"; }
  Index state_dim() const override { return 2; }
  Index coupling_dim() const override { return 1; }
  Matrix mass_matrix() const override { return (Matrix(2, 2) << 2.0, 0.5, 0.5, 1.0).finished(); }
  Vector residual(const Vector& u, const Vector& c, const Vector& mu, double t) const override {
    return Eigen::Vector2d(-mu(0) * u(0) + std::sin(c(0)) + 0.1 * t,
                           -u(1) - 0.1 * u(1) * u(1) * u(1) + mu(1) * c(0) * u(0));
  }
  Vector coupling(StateSpan s, const Vector& mu, double) const override {
    const double b = s[1](0);
    return Vector::Constant(1, mu(1) * b + 0.5 * b * b);
  }
  Matrix d_residual_d_state(const Vector& u, const Vector& c, const Vector& mu,
                            double) const override {
    return (Matrix(2, 2) << -mu(0), 0.0, mu(1) * c(0), -1.0 - 0.3 * u(1) * u(1)).finished();
  }
  Matrix d_residual_d_coupling(const Vector& u, const Vector& c, const Vector& mu,
                               double) const override {
    return (Matrix(2, 1) << std::cos(c(0)), mu(1) * u(0)).finished();
  }
  Matrix d_residual_d_param(const Vector& u, const Vector& c, const Vector&,
                            double) const override {
    return (Matrix(2, 2) << -u(0), 0.0, 0.0, c(0) * u(0)).finished();
  }
  Matrix d_coupling_d_state(Index k, StateSpan s, const Vector& mu, double) const override {
    if (k == 0) return Matrix::Zero(1, 2);
    return Matrix::Constant(1, 1, mu(1) + s[1](0));
  }
  Matrix d_coupling_d_param(StateSpan s, const Vector&, double) const override {
    return (Matrix(1, 2) << 0.0, s[1](0)).finished();
  }
  bool coupling_depends_on(Index k) const override { return k == 1; }
  Vector initial_state(const Vector& mu) const override { return Eigen::Vector2d(1.0 + mu(0), 0.5); }
  Matrix d_initial_d_param(const Vector&) const override {
    return (Matrix(2, 2) << 1.0, 0.0, 0.0, 0.0).finished();
  }
};

class NonlinearB final : public Subsystem {
 public:
  std::string name() const override { return "nonlinear-b"; }
  Index state_dim() const override { return 1; }
  Index coupling_dim() const override { return 2; }
  Matrix mass_matrix() const override { return Matrix::Constant(1, 1, 3.0); }
  Vector residual(const Vector& u, const Vector& c, const Vector& mu, double) const override {
    return Vector::Constant(1, -2.0 * u(0) + c(0) * c(1) - 0.1 * mu(0) * mu(0));
  }
  Vector coupling(StateSpan s, const Vector& mu, double) const override {
    return Eigen::Vector2d(s[0](0), mu(0) * s[0](1));
  }
  Matrix d_residual_d_state(const Vector&, const Vector&, const Vector&, double) const override {
    return Matrix::Constant(1, 1, -2.0);
  }
  Matrix d_residual_d_coupling(const Vector&, const Vector& c, const Vector&,
                               double) const override {
    return (Matrix(1, 2) << c(1), c(0)).finished();
  }
  Matrix d_residual_d_param(const Vector&, const Vector&, const Vector& mu,
                            double) const override {
    return (Matrix(1, 2) << -0.2 * mu(0), 0.0).finished();
  }
  Matrix d_coupling_d_state(Index k, StateSpan, const Vector& mu, double) const override {
    if (k == 1) return Matrix::Zero(2, 1);
    return (Matrix(2, 2) << 1.0, 0.0, 0.0, mu(0)).finished();
  }
  Matrix d_coupling_d_param(StateSpan s, const Vector&, double) const override {
    return (Matrix(2, 2) << 0.0, 0.0, s[0](1), 0.0).finished();
  }
  bool coupling_depends_on(Index k) const override { return k == 0; }
  Vector initial_state(const Vector& mu) const override { return Vector::Constant(1, mu(1) * mu(1)); }
  Matrix d_initial_d_param(const Vector& mu) const override {
    return (Matrix(1, 2) << 0.0, 2.0 * mu(1)).finished();
  }
};

inline CoupledSystem nonlinear_system(double mu0 = 0.7, double mu1 = 0.4) {
  return CoupledSystem({std::make_shared<NonlinearA>(), std::make_shared<NonlinearB>()},
                       Eigen::Vector2d(mu0, mu1));
}

/// j = mu0 uA0^2 + sin(uB0) + 0.5 uA1 t
class NonlinearQoi final : public QoiModel {
 public:
  double integrand(StateSpan u, const Vector& mu, double t) const override {
    return mu(0) * u[0](0) * u[0](0) + std::sin(u[1](0)) + 0.5 * u[0](1) * t;
  }
  Vector d_integrand_d_state(Index i, StateSpan u, const Vector& mu, double t) const override {
    if (i == 0) return Eigen::Vector2d(2.0 * mu(0) * u[0](0), 0.5 * t);
    return Vector::Constant(1, std::cos(u[1](0)));
  }
  Vector d_integrand_d_param(StateSpan u, const Vector&, double) const override {
    return Eigen::Vector2d(u[0](0) * u[0](0), 0.0);
  }
};

/// u' = A u + B c, c = u of the other block; two states per block.
class LinearBlock final : public Subsystem {
 public:
  LinearBlock(Matrix A, Matrix B, Index other) : A_(std::move(A)), B_(std::move(B)), other_(other) {}

  std::string name() const override { return "block"; }
  Index state_dim() const override { return 2; }
  Index coupling_dim() const override { return 2; }
  Matrix mass_matrix() const override { return (Matrix(2, 2) << 2.0, 0.3, 0.1, 1.0).finished(); }
  Vector residual(const Vector& u, const Vector& c, const Vector&, double) const override {
    return A_ * u + B_ * c;
  }
  Vector coupling(StateSpan s, const Vector&, double) const override {
    return s[static_cast<size_t>(other_)];
  }
  Matrix d_residual_d_state(const Vector&, const Vector&, const Vector&, double) const override {
    return A_;
  }
  Matrix d_residual_d_coupling(const Vector&, const Vector&, const Vector&, double) const override {
    return B_;
  }
  Matrix d_residual_d_param(const Vector&, const Vector&, const Vector& mu, double) const override {
    return Matrix::Zero(2, mu.size());
  }
  Matrix d_coupling_d_state(Index k, StateSpan, const Vector&, double) const override {
    return k == other_ ? Matrix(Matrix::Identity(2, 2)) : Matrix(Matrix::Zero(2, 2));
  }
  Matrix d_coupling_d_param(StateSpan, const Vector& mu, double) const override {
    return Matrix::Zero(2, mu.size());
  }
  bool coupling_depends_on(Index k) const override { return k == other_; }
  Vector initial_state(const Vector&) const override { return Eigen::Vector2d(1.0, -1.0); }
  Matrix d_initial_d_param(const Vector& mu) const override { return Matrix::Zero(2, mu.size()); }

 private:
  Matrix A_, B_;
  Index other_;
};

class ZeroQoi final : public QoiModel {
 public:
  double integrand(StateSpan, const Vector&, double) const override { return 0.0; }
  Vector d_integrand_d_state(Index i, StateSpan u, const Vector&, double) const override {
    return Vector::Zero(u[static_cast<size_t>(i)].size());
  }
  Vector d_integrand_d_param(StateSpan, const Vector& mu, double) const override {
    return Vector::Zero(mu.size());
  }
};

CoupledSystem four_state_system() {
  Matrix A1(2, 2), B1(2, 2), A2(2, 2), B2(2, 2);
  A1 << -1.0, 0.4, -0.3, -2.0;
  B1 << 0.5, 0.1, 0.0, -0.7;
  A2 << -3.0, 1.0, 0.2, -0.5;
  B2 << 0.3, -0.2, 0.6, 0.1;
  return CoupledSystem({std::make_shared<LinearBlock>(A1, B1, 1), std::make_shared<LinearBlock>(A2, B2, 0)},
                       Vector::Zero(1));
}

Vector stack4(const PartitionedState& u) {
  Vector v(4);
  v << u[0], u[1];
  return v;
}

PartitionedState split4(const Vector& v) { return {v.head(2), v.tail(2)}; }

}  // namespace pimex::test
