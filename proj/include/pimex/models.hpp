#pragma once

// Small coupled problems with closed-form solutions.

#include "pimex/system.hpp"

#include <memory>

namespace pimex {

/// Two scalar subsystems
///   u1' = a11 u1 + a12 c1,  c1 = u2
///   u2' = a22 u2 + a21 c2,  c2 = u1
/// with initial state u0 + mu v0 (one parameter).
struct LinearModelParams {
  double a11 = -1.0;
  double a12 = 0.5;
  double a21 = -0.5;
  double a22 = -2.0;
  Eigen::Vector2d u0{1.0, 0.5};
  Eigen::Vector2d v0{0.0, 0.0};
  double mu = 0.0;

  Eigen::Matrix2d matrix() const;
};

class LinearScalarModel final : public Subsystem {
 public:
  /// Subsystem `index` (0 or 1) of the linear model.
  LinearScalarModel(LinearModelParams p, Index index);

  std::string name() const override { return index_ == 0 ? "linear-1" : "linear-2"; }
  Index state_dim() const override { return 1; }
  Index coupling_dim() const override { return 1; }
  Matrix mass_matrix() const override { return Matrix::Identity(1, 1); }
  Vector residual(const Vector& u, const Vector& c, const Vector& mu, double t) const override;
  Vector coupling(StateSpan states, const Vector& mu, double t) const override;
  Matrix d_residual_d_state(const Vector& u, const Vector& c, const Vector& mu,
                            double t) const override;
  Matrix d_residual_d_coupling(const Vector& u, const Vector& c, const Vector& mu,
                               double t) const override;
  Matrix d_residual_d_param(const Vector& u, const Vector& c, const Vector& mu,
                            double t) const override;
  Matrix d_coupling_d_state(Index k, StateSpan states, const Vector& mu, double t) const override;
  Matrix d_coupling_d_param(StateSpan states, const Vector& mu, double t) const override;
  bool coupling_depends_on(Index k) const override { return k != index_; }
  Vector initial_state(const Vector& mu) const override;
  Matrix d_initial_d_param(const Vector& mu) const override;

 private:
  LinearModelParams p_;
  Index index_;
  double diag_, off_;
};

CoupledSystem build_linear_model(const LinearModelParams& p);

/// exp(A t) (u0 + mu v0).
Eigen::Vector2d linear_model_solution(const LinearModelParams& p, double t);

/// u' = -mu u, u(0) = u0, single subsystem without coupling.
class ScalarDecayModel final : public Subsystem {
 public:
  explicit ScalarDecayModel(double u0 = 1.0) : u0_(u0) {}

  std::string name() const override { return "decay"; }
  Index state_dim() const override { return 1; }
  Index coupling_dim() const override { return 0; }
  Matrix mass_matrix() const override { return Matrix::Identity(1, 1); }
  Vector residual(const Vector& u, const Vector& c, const Vector& mu, double t) const override;
  Vector coupling(StateSpan states, const Vector& mu, double t) const override;
  Matrix d_residual_d_state(const Vector& u, const Vector& c, const Vector& mu,
                            double t) const override;
  Matrix d_residual_d_coupling(const Vector& u, const Vector& c, const Vector& mu,
                               double t) const override;
  Matrix d_residual_d_param(const Vector& u, const Vector& c, const Vector& mu,
                            double t) const override;
  Matrix d_coupling_d_state(Index k, StateSpan states, const Vector& mu, double t) const override;
  Matrix d_coupling_d_param(StateSpan states, const Vector& mu, double t) const override;
  bool coupling_depends_on(Index) const override { return false; }
  Vector initial_state(const Vector& mu) const override;
  Matrix d_initial_d_param(const Vector& mu) const override;

 private:
  double u0_;
};

CoupledSystem build_scalar_decay(double mu, double u0 = 1.0);

/// J(mu) = int_0^T (u0 e^{-mu t})^2 dt and its derivative.
double scalar_decay_objective(double mu, double T, double u0 = 1.0);
double scalar_decay_gradient(double mu, double T, double u0 = 1.0);

}  // namespace pimex
