#include "pimex/system.hpp"

#include <sstream>

namespace pimex {

CoupledSystem::CoupledSystem(std::vector<SubsystemPtr> subsystems, Vector mu)
    : subsystems_(std::move(subsystems)), mu_(std::move(mu)) {
  if (subsystems_.empty()) throw DimensionError("coupled system needs at least one subsystem");
  masses_.reserve(subsystems_.size());
  mass_lu_.reserve(subsystems_.size());
  for (const auto& sub : subsystems_) {
    if (!sub) throw DimensionError("null subsystem");
    Matrix m = sub->mass_matrix();
    if (m.rows() != sub->state_dim() || m.cols() != sub->state_dim()) {
      throw DimensionError("mass matrix of '" + sub->name() + "' has wrong shape");
    }
    auto lu = std::make_shared<const Eigen::PartialPivLU<Matrix>>(m);
    masses_.push_back(std::move(m));
    mass_lu_.push_back(std::move(lu));
  }
}

CoupledSystem CoupledSystem::with_mu(Vector mu) const {
  if (mu.size() != mu_.size()) throw DimensionError("parameter vector length changed");
  CoupledSystem copy = *this;
  copy.mu_ = std::move(mu);
  return copy;
}

Vector CoupledSystem::mass_apply(Index i, const Vector& v) const { return mass(i) * v; }

Vector CoupledSystem::mass_solve(Index i, const Vector& v) const {
  return mass_lu_[static_cast<size_t>(i)]->solve(v);
}

Vector CoupledSystem::mass_solve_transpose(Index i, const Vector& v) const {
  return mass_lu_[static_cast<size_t>(i)]->transpose().solve(v);
}

Matrix CoupledSystem::mass_solve_columns(Index i, const Matrix& v) const {
  return mass_lu_[static_cast<size_t>(i)]->solve(v);
}

std::vector<Index> CoupledSystem::state_dims() const {
  std::vector<Index> dims;
  for (const auto& sub : subsystems_) dims.push_back(sub->state_dim());
  return dims;
}

std::vector<Index> CoupledSystem::coupling_dims() const {
  std::vector<Index> dims;
  for (const auto& sub : subsystems_) dims.push_back(sub->coupling_dim());
  return dims;
}

PartitionedState CoupledSystem::initial_state() const {
  PartitionedState u;
  u.reserve(subsystems_.size());
  for (const auto& sub : subsystems_) u.push_back(sub->initial_state(mu_));
  check_state(u);
  return u;
}

void CoupledSystem::check_state(const PartitionedState& u) const {
  if (static_cast<Index>(u.size()) != size()) {
    std::ostringstream msg;
    msg << "state has " << u.size() << " parts, system has " << size() << " subsystems";
    throw DimensionError(msg.str());
  }
  for (Index i = 0; i < size(); ++i) {
    if (u[static_cast<size_t>(i)].size() != (*this)[i].state_dim()) {
      std::ostringstream msg;
      msg << "state of subsystem " << i << " ('" << (*this)[i].name() << "') has length "
          << u[static_cast<size_t>(i)].size() << ", expected " << (*this)[i].state_dim();
      throw DimensionError(msg.str());
    }
  }
}

double SquaredComponentQoi::integrand(StateSpan u, const Vector&, double) const {
  const double x = u[static_cast<size_t>(subsystem_)](component_);
  return x * x;
}

Vector SquaredComponentQoi::d_integrand_d_state(Index i, StateSpan u, const Vector&,
                                                double) const {
  Vector d = Vector::Zero(u[static_cast<size_t>(i)].size());
  if (i == subsystem_) d(component_) = 2.0 * u[static_cast<size_t>(i)](component_);
  return d;
}

Vector SquaredComponentQoi::d_integrand_d_param(StateSpan, const Vector& mu, double) const {
  return Vector::Zero(mu.size());
}

double StateSquaredQoi::integrand(StateSpan u, const Vector&, double) const {
  double sum = 0.0;
  for (const auto& part : u) sum += part.squaredNorm();
  return sum;
}

Vector StateSquaredQoi::d_integrand_d_state(Index i, StateSpan u, const Vector&, double) const {
  return 2.0 * u[static_cast<size_t>(i)];
}

Vector StateSquaredQoi::d_integrand_d_param(StateSpan, const Vector& mu, double) const {
  return Vector::Zero(mu.size());
}

}  // namespace pimex
