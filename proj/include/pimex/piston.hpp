#pragma once

// One-dimensional piston benchmark: a gas column on [0, L - u_s] closed by a
// spring-mounted piston. Three subsystems in the order (structure, mesh,
// fluid):
//
//   structure  (udot_s, u_s), M = diag(m_s, 1)
//              r = [f_ext - c_s udot_s - mu_k (u_s - u_eq); udot_s]
//              c = f_ext = -(p_interface - p_ref) A
//   mesh       interior node displacements/velocities (d, w) of the
//              pseudo-structure rho_m w' = E_m d'' - c_m w, Dirichlet data
//              d = 0 at X = 0 and d = -u_s at X = L, c = (-u_s, -udot_s)
//   fluid      transformed conservative variables g U per cell, first-order
//              ALE finite volumes with Roe's flux, c = node positions and
//              velocities of the deformed mesh.

#include "pimex/euler.hpp"
#include "pimex/system.hpp"

#include <memory>
#include <vector>

namespace pimex {

struct PistonConfig {
  Index n_cells = 100;
  double length = 1.0;
  double gamma = 1.4;
  double rho0 = 1.0;
  double p0 = 0.4;
  double m_s = 1.0;
  double c_s = 0.0;
  double mu_k = 1.0;
  /// Spring rest position and pressure reference of the interface force.
  double u_eq = 0.0;
  double p_ref = 0.0;
  double area = 1.0;
  double rho_m = 1.0;
  double E_m = 1.0;
  double c_m = 0.0;
  double entropy_fix = 0.1;
  double u_s0 = 0.0;
  double udot_s0 = 0.0;
  /// Initial displacement of the interior mesh nodes; empty means zero.
  std::vector<double> mesh_d0;

  double h() const { return length / static_cast<double>(n_cells); }
  RoeOptions roe() const { return {gamma, entropy_fix}; }
  /// Throws ConfigError on inadmissible values.
  void validate() const;
};

inline constexpr Index kStructure = 0;
inline constexpr Index kMesh = 1;
inline constexpr Index kFluid = 2;

class StructureModel final : public Subsystem {
 public:
  /// With `coupled` false the interface force is identically zero and the
  /// model can run on its own.
  StructureModel(PistonConfig cfg, bool coupled);

  std::string name() const override { return "structure"; }
  Index state_dim() const override { return 2; }
  Index coupling_dim() const override { return 1; }
  Matrix mass_matrix() const override;
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
  bool coupling_depends_on(Index k) const override { return coupled_ && k <= kFluid; }
  Vector initial_state(const Vector& mu) const override;
  Matrix d_initial_d_param(const Vector& mu) const override;

 private:
  PistonConfig cfg_;
  bool coupled_;
};

class MeshModel1D final : public Subsystem {
 public:
  explicit MeshModel1D(PistonConfig cfg);

  std::string name() const override { return "mesh"; }
  Index state_dim() const override { return 2 * (cfg_.n_cells - 1); }
  Index coupling_dim() const override { return 2; }
  Matrix mass_matrix() const override;
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
  bool coupling_depends_on(Index k) const override { return k == kStructure; }
  Vector initial_state(const Vector& mu) const override;
  Matrix d_initial_d_param(const Vector& mu) const override;

 private:
  PistonConfig cfg_;
};

class FluidModel1D final : public Subsystem {
 public:
  explicit FluidModel1D(PistonConfig cfg);

  std::string name() const override { return "fluid"; }
  Index state_dim() const override { return 3 * cfg_.n_cells; }
  Index coupling_dim() const override { return 2 * (cfg_.n_cells + 1); }
  Matrix mass_matrix() const override;
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
  bool coupling_depends_on(Index k) const override { return k != kFluid; }
  Vector initial_state(const Vector& mu) const override;
  Matrix d_initial_d_param(const Vector& mu) const override;

  /// Physical conservative state (rho, rho u, E) of every cell.
  Matrix physical_state(const Vector& u, const Vector& c) const;

 private:
  PistonConfig cfg_;
};

/// Assembles the three-field system with mu = (mu_k).
CoupledSystem build_piston(const PistonConfig& cfg);
CoupledSystem build_piston(double mu_k);

/// Objective integrand u_s^2.
std::shared_ptr<const QoiModel> piston_qoi();

/// Pressure on the piston face (momentum flux of the moving-wall face).
double piston_interface_pressure(const PistonConfig& cfg, StateSpan states);

/// Nodal positions x_0..x_N and velocities w_0..w_N of the deformed mesh.
Vector piston_mesh_geometry(const PistonConfig& cfg, const Vector& structure, const Vector& mesh);

}  // namespace pimex
