#pragma once

#include "pimex/types.hpp"

#include <memory>
#include <string>
#include <vector>

namespace pimex {

/// One physical system of a coupled problem, in semi-discrete form
///
///   M^i du^i/dt = r^i(u^i, c^i, mu, t),   c^i = c^i(u^1, ..., u^m, mu, t).
///
/// The mass matrix is constant in time. All Jacobian blocks are partial
/// derivatives of the function counterparts at the given arguments.
/// Implementations must be safe for concurrent const use.
class Subsystem {
 public:
  virtual ~Subsystem() = default;

  virtual std::string name() const = 0;
  virtual Index state_dim() const = 0;
  virtual Index coupling_dim() const = 0;

  virtual Matrix mass_matrix() const = 0;

  virtual Vector residual(const Vector& u, const Vector& c, const Vector& mu, double t) const = 0;
  virtual Vector coupling(StateSpan states, const Vector& mu, double t) const = 0;

  virtual Matrix d_residual_d_state(const Vector& u, const Vector& c, const Vector& mu,
                                    double t) const = 0;
  virtual Matrix d_residual_d_coupling(const Vector& u, const Vector& c, const Vector& mu,
                                       double t) const = 0;
  virtual Matrix d_residual_d_param(const Vector& u, const Vector& c, const Vector& mu,
                                    double t) const = 0;

  /// dc^i/du^k, coupling_dim x state_dim(k).
  virtual Matrix d_coupling_d_state(Index k, StateSpan states, const Vector& mu,
                                    double t) const = 0;
  virtual Matrix d_coupling_d_param(StateSpan states, const Vector& mu, double t) const = 0;

  /// Structural sparsity hint: false only if dc^i/du^k is identically zero.
  virtual bool coupling_depends_on(Index /*k*/) const { return true; }

  virtual Vector initial_state(const Vector& mu) const = 0;
  virtual Matrix d_initial_d_param(const Vector& mu) const = 0;
};

using SubsystemPtr = std::shared_ptr<const Subsystem>;

/// Ordered collection of subsystems sharing a parameter vector. The order is
/// fixed for the lifetime of the object; the Gauss-Seidel predictor depends
/// on it.
class CoupledSystem {
 public:
  CoupledSystem(std::vector<SubsystemPtr> subsystems, Vector mu);

  Index size() const { return static_cast<Index>(subsystems_.size()); }
  const Subsystem& operator[](Index i) const { return *subsystems_[static_cast<size_t>(i)]; }
  const std::vector<SubsystemPtr>& subsystems() const { return subsystems_; }

  const Vector& mu() const { return mu_; }
  Index n_mu() const { return mu_.size(); }

  /// Copy of this system with a different parameter vector (same subsystems).
  CoupledSystem with_mu(Vector mu) const;

  const Matrix& mass(Index i) const { return masses_[static_cast<size_t>(i)]; }
  Vector mass_apply(Index i, const Vector& v) const;
  Vector mass_solve(Index i, const Vector& v) const;
  Vector mass_solve_transpose(Index i, const Vector& v) const;
  Matrix mass_solve_columns(Index i, const Matrix& v) const;

  std::vector<Index> state_dims() const;
  std::vector<Index> coupling_dims() const;

  PartitionedState initial_state() const;

  /// Throws DimensionError unless u matches the subsystem state dimensions.
  void check_state(const PartitionedState& u) const;

 private:
  std::vector<SubsystemPtr> subsystems_;
  Vector mu_;
  std::vector<Matrix> masses_;
  std::vector<std::shared_ptr<const Eigen::PartialPivLU<Matrix>>> mass_lu_;
};

/// Integrand j(u^1..u^m, mu, t) of an integral quantity of interest.
class QoiModel {
 public:
  virtual ~QoiModel() = default;

  virtual double integrand(StateSpan u, const Vector& mu, double t) const = 0;
  /// dj/du^i, length state_dim(i).
  virtual Vector d_integrand_d_state(Index i, StateSpan u, const Vector& mu, double t) const = 0;
  /// dj/dmu, length n_mu.
  virtual Vector d_integrand_d_param(StateSpan u, const Vector& mu, double t) const = 0;
};

/// j = (u^i_k)^2 for a single state component.
class SquaredComponentQoi final : public QoiModel {
 public:
  SquaredComponentQoi(Index subsystem, Index component)
      : subsystem_(subsystem), component_(component) {}

  double integrand(StateSpan u, const Vector& mu, double t) const override;
  Vector d_integrand_d_state(Index i, StateSpan u, const Vector& mu, double t) const override;
  Vector d_integrand_d_param(StateSpan u, const Vector& mu, double t) const override;

 private:
  Index subsystem_;
  Index component_;
};

/// j = sum_i |u^i|^2.
class StateSquaredQoi final : public QoiModel {
 public:
  double integrand(StateSpan u, const Vector& mu, double t) const override;
  Vector d_integrand_d_state(Index i, StateSpan u, const Vector& mu, double t) const override;
  Vector d_integrand_d_param(StateSpan u, const Vector& mu, double t) const override;
};

}  // namespace pimex
