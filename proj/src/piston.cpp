#include "pimex/piston.hpp"

#include <cmath>
#include <sstream>

namespace pimex {
namespace {

using D9 = Dual<9>;
using D5 = Dual<5>;

// Slots of a face flux derivative: UX_left(3), UX_right(3), g_left, g_right, w.
constexpr int kSlotL = 0, kSlotR = 3, kSlotGL = 6, kSlotGR = 7, kSlotW = 8;

Vector cell_jacobians(const PistonConfig& cfg, const Vector& x) {
  const Index N = cfg.n_cells;
  Vector g(N);
  for (Index k = 0; k < N; ++k) {
    g(k) = (x(k + 1) - x(k)) / cfg.h();
    if (!(g(k) > 0.0)) {
      std::ostringstream msg;
      msg << "mesh cell " << k << " is inverted or degenerate (g = " << g(k) << ")";
      throw PhysicsError(msg.str());
    }
  }
  return g;
}

State3<double> cell_state(const Vector& u, Index k, double g) {
  return {u(3 * k) / g, u(3 * k + 1) / g, u(3 * k + 2) / g};
}

State3<double> face_flux(const PistonConfig& cfg, Index k, const Vector& u, const Vector& g,
                         const Vector& w) {
  const Index N = cfg.n_cells;
  const double v = w(k);
  if (k == 0) {
    const auto UR = cell_state(u, 0, g(0));
    return ale_roe_flux(wall_ghost(UR, v, cfg.gamma), UR, v, cfg.roe());
  }
  if (k == N) {
    const auto UL = cell_state(u, N - 1, g(N - 1));
    return ale_roe_flux(UL, wall_ghost(UL, v, cfg.gamma), v, cfg.roe());
  }
  return ale_roe_flux(cell_state(u, k - 1, g(k - 1)), cell_state(u, k, g(k)), v, cfg.roe());
}

State3<D9> face_flux_dual(const PistonConfig& cfg, Index k, const Vector& u, const Vector& g,
                          const Vector& w) {
  const Index N = cfg.n_cells;
  auto load = [&](Index cell, int slot, int gslot) {
    const D9 gc = D9::variable(g(cell), gslot);
    State3<D9> U;
    for (int q = 0; q < 3; ++q) U[static_cast<size_t>(q)] = D9::variable(u(3 * cell + q), slot + q) / gc;
    return U;
  };
  const D9 v = D9::variable(w(k), kSlotW);
  if (k == 0) {
    const auto UR = load(0, kSlotR, kSlotGR);
    return ale_roe_flux(wall_ghost(UR, v, cfg.gamma), UR, v, cfg.roe());
  }
  if (k == N) {
    const auto UL = load(N - 1, kSlotL, kSlotGL);
    return ale_roe_flux(UL, wall_ghost(UL, v, cfg.gamma), v, cfg.roe());
  }
  return ale_roe_flux(load(k - 1, kSlotL, kSlotGL), load(k, kSlotR, kSlotGR), v, cfg.roe());
}

// Flux on the piston face with derivative slots UX(3), g, w of the last cell.
State3<D5> piston_face_flux(const PistonConfig& cfg, const Vector& ux_last, double g_last,
                            double w_piston) {
  const D5 g = D5::variable(g_last, 3);
  const D5 v = D5::variable(w_piston, 4);
  State3<D5> U;
  for (int q = 0; q < 3; ++q) U[static_cast<size_t>(q)] = D5::variable(ux_last(q), q) / g;
  return ale_roe_flux(U, wall_ghost(U, v, cfg.gamma), v, cfg.roe());
}

struct PistonFace {
  Vector ux_last;
  double g_last;
  double w;
};

PistonFace piston_face(const PistonConfig& cfg, StateSpan states) {
  const Index N = cfg.n_cells;
  const Vector& us = states[kStructure];
  const Vector& um = states[kMesh];
  const Vector& uf = states[kFluid];
  const double x_last = static_cast<double>(N - 1) * cfg.h() + um(N - 2);
  const double x_piston = cfg.length - us(1);
  PistonFace face{uf.segment(3 * (N - 1), 3), (x_piston - x_last) / cfg.h(), -us(0)};
  if (!(face.g_last > 0.0)) throw PhysicsError("piston crossed the last mesh node");
  return face;
}

void check_mu(const Vector& mu) {
  if (mu.size() != 1) throw DimensionError("piston parameter vector must be (mu_k)");
}

}  // namespace

void PistonConfig::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " must be positive");
  };
  auto finite = [](double v, const char* what) {
    if (!std::isfinite(v)) throw ConfigError(std::string(what) + " must be finite");
  };
  if (n_cells < 2) throw ConfigError("n_cells must be at least 2");
  positive(length, "length");
  if (!(gamma > 1.0)) throw ConfigError("gamma must exceed 1");
  positive(rho0, "rho0");
  positive(p0, "p0");
  positive(m_s, "m_s");
  positive(area, "area");
  positive(rho_m, "rho_m");
  positive(E_m, "E_m");
  if (!(c_s >= 0.0)) throw ConfigError("c_s must be non-negative");
  if (!(c_m >= 0.0)) throw ConfigError("c_m must be non-negative");
  if (!(entropy_fix >= 0.0)) throw ConfigError("entropy_fix must be non-negative");
  finite(mu_k, "mu_k");
  finite(u_eq, "u_eq");
  finite(p_ref, "p_ref");
  finite(u_s0, "u_s0");
  finite(udot_s0, "udot_s0");
  if (!mesh_d0.empty() && static_cast<Index>(mesh_d0.size()) != n_cells - 1)
    throw ConfigError("mesh_d0 must list n_cells - 1 interior displacements");
}

Vector piston_mesh_geometry(const PistonConfig& cfg, const Vector& structure, const Vector& mesh) {
  const Index N = cfg.n_cells;
  Vector c(2 * (N + 1));
  c(0) = 0.0;
  for (Index k = 1; k < N; ++k) c(k) = static_cast<double>(k) * cfg.h() + mesh(k - 1);
  c(N) = cfg.length - structure(1);
  c(N + 1) = 0.0;
  for (Index k = 1; k < N; ++k) c(N + 1 + k) = mesh(N - 1 + k - 1);
  c(2 * N + 1) = -structure(0);
  return c;
}

double piston_interface_pressure(const PistonConfig& cfg, StateSpan states) {
  const PistonFace f = piston_face(cfg, states);
  return piston_face_flux(cfg, f.ux_last, f.g_last, f.w)[1].v;
}

// ---------------------------------------------------------------- structure

StructureModel::StructureModel(PistonConfig cfg, bool coupled)
    : cfg_(std::move(cfg)), coupled_(coupled) {
  cfg_.validate();
}

Matrix StructureModel::mass_matrix() const {
  Matrix M = Matrix::Identity(2, 2);
  M(0, 0) = cfg_.m_s;
  return M;
}

Vector StructureModel::residual(const Vector& u, const Vector& c, const Vector& mu, double) const {
  check_mu(mu);
  Vector r(2);
  r(0) = c(0) - cfg_.c_s * u(0) - mu(0) * (u(1) - cfg_.u_eq);
  r(1) = u(0);
  return r;
}

Vector StructureModel::coupling(StateSpan states, const Vector&, double) const {
  Vector c = Vector::Zero(1);
  if (!coupled_) return c;
  c(0) = -(piston_interface_pressure(cfg_, states) - cfg_.p_ref) * cfg_.area;
  return c;
}

Matrix StructureModel::d_residual_d_state(const Vector&, const Vector&, const Vector& mu,
                                          double) const {
  Matrix J(2, 2);
  J << -cfg_.c_s, -mu(0), 1.0, 0.0;
  return J;
}

Matrix StructureModel::d_residual_d_coupling(const Vector&, const Vector&, const Vector&,
                                             double) const {
  Matrix J = Matrix::Zero(2, 1);
  J(0, 0) = 1.0;
  return J;
}

Matrix StructureModel::d_residual_d_param(const Vector& u, const Vector&, const Vector& mu,
                                          double) const {
  Matrix J = Matrix::Zero(2, mu.size());
  J(0, 0) = -(u(1) - cfg_.u_eq);
  return J;
}

Matrix StructureModel::d_coupling_d_state(Index k, StateSpan states, const Vector&,
                                          double) const {
  const Index N = cfg_.n_cells;
  Matrix J = Matrix::Zero(1, states[static_cast<size_t>(k)].size());
  if (!coupled_) return J;
  const PistonFace f = piston_face(cfg_, states);
  const auto F = piston_face_flux(cfg_, f.ux_last, f.g_last, f.w);
  const auto& dp = F[1].d;
  const double s = -cfg_.area;
  const double inv_h = 1.0 / cfg_.h();
  if (k == kStructure) {
    J(0, 0) = s * dp[4] * -1.0;    // w = -udot_s
    J(0, 1) = s * dp[3] * -inv_h;  // g_last = (L - u_s - x_last) / h
  } else if (k == kMesh) {
    J(0, N - 2) = s * dp[3] * -inv_h;
  } else if (k == kFluid) {
    for (int q = 0; q < 3; ++q) J(0, 3 * (N - 1) + q) = s * dp[static_cast<size_t>(q)];
  }
  return J;
}

Matrix StructureModel::d_coupling_d_param(StateSpan, const Vector& mu, double) const {
  return Matrix::Zero(1, mu.size());
}

Vector StructureModel::initial_state(const Vector& mu) const {
  check_mu(mu);
  Vector u(2);
  u << cfg_.udot_s0, cfg_.u_s0;
  return u;
}

Matrix StructureModel::d_initial_d_param(const Vector& mu) const {
  return Matrix::Zero(2, mu.size());
}

// --------------------------------------------------------------------- mesh

MeshModel1D::MeshModel1D(PistonConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

Matrix MeshModel1D::mass_matrix() const {
  const Index n = cfg_.n_cells - 1;
  Vector diag(2 * n);
  diag.head(n).setOnes();
  diag.tail(n).setConstant(cfg_.rho_m);
  return diag.asDiagonal();
}

Vector MeshModel1D::residual(const Vector& u, const Vector& c, const Vector&, double) const {
  const Index n = cfg_.n_cells - 1;
  const double kappa = cfg_.E_m / (cfg_.h() * cfg_.h());
  Vector r(2 * n);
  r.head(n) = u.tail(n);
  for (Index k = 0; k < n; ++k) {
    const double left = k > 0 ? u(k - 1) : 0.0;
    const double right = k + 1 < n ? u(k + 1) : c(0);
    r(n + k) = kappa * (right - 2.0 * u(k) + left) - cfg_.c_m * u(n + k);
  }
  return r;
}

Vector MeshModel1D::coupling(StateSpan states, const Vector&, double) const {
  const Vector& us = states[kStructure];
  Vector c(2);
  c << -us(1), -us(0);
  return c;
}

Matrix MeshModel1D::d_residual_d_state(const Vector&, const Vector&, const Vector&,
                                       double) const {
  const Index n = cfg_.n_cells - 1;
  const double kappa = cfg_.E_m / (cfg_.h() * cfg_.h());
  Matrix J = Matrix::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n).setIdentity();
  for (Index k = 0; k < n; ++k) {
    J(n + k, k) = -2.0 * kappa;
    if (k > 0) J(n + k, k - 1) = kappa;
    if (k + 1 < n) J(n + k, k + 1) = kappa;
    J(n + k, n + k) = -cfg_.c_m;
  }
  return J;
}

Matrix MeshModel1D::d_residual_d_coupling(const Vector&, const Vector&, const Vector&,
                                          double) const {
  const Index n = cfg_.n_cells - 1;
  Matrix J = Matrix::Zero(2 * n, 2);
  J(2 * n - 1, 0) = cfg_.E_m / (cfg_.h() * cfg_.h());
  return J;
}

Matrix MeshModel1D::d_residual_d_param(const Vector& u, const Vector&, const Vector& mu,
                                       double) const {
  return Matrix::Zero(u.size(), mu.size());
}

Matrix MeshModel1D::d_coupling_d_state(Index k, StateSpan states, const Vector&, double) const {
  Matrix J = Matrix::Zero(2, states[static_cast<size_t>(k)].size());
  if (k == kStructure) {
    J(0, 1) = -1.0;
    J(1, 0) = -1.0;
  }
  return J;
}

Matrix MeshModel1D::d_coupling_d_param(StateSpan, const Vector& mu, double) const {
  return Matrix::Zero(2, mu.size());
}

Vector MeshModel1D::initial_state(const Vector&) const {
  const Index n = cfg_.n_cells - 1;
  Vector u = Vector::Zero(2 * n);
  for (Index k = 0; k < static_cast<Index>(cfg_.mesh_d0.size()); ++k) u(k) = cfg_.mesh_d0[static_cast<size_t>(k)];
  return u;
}

Matrix MeshModel1D::d_initial_d_param(const Vector& mu) const {
  return Matrix::Zero(state_dim(), mu.size());
}

// -------------------------------------------------------------------- fluid

FluidModel1D::FluidModel1D(PistonConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

Matrix FluidModel1D::mass_matrix() const {
  return cfg_.h() * Matrix::Identity(state_dim(), state_dim());
}

Vector FluidModel1D::residual(const Vector& u, const Vector& c, const Vector&, double) const {
  const Index N = cfg_.n_cells;
  const Vector g = cell_jacobians(cfg_, c.head(N + 1));
  const Vector w = c.tail(N + 1);
  Vector r(3 * N);
  State3<double> F_left = face_flux(cfg_, 0, u, g, w);
  for (Index k = 0; k < N; ++k) {
    const State3<double> F_right = face_flux(cfg_, k + 1, u, g, w);
    for (int q = 0; q < 3; ++q) r(3 * k + q) = F_left[static_cast<size_t>(q)] - F_right[static_cast<size_t>(q)];
    F_left = F_right;
  }
  return r;
}

Vector FluidModel1D::coupling(StateSpan states, const Vector&, double) const {
  return piston_mesh_geometry(cfg_, states[kStructure], states[kMesh]);
}

Matrix FluidModel1D::d_residual_d_state(const Vector& u, const Vector& c, const Vector&,
                                        double) const {
  const Index N = cfg_.n_cells;
  const Vector g = cell_jacobians(cfg_, c.head(N + 1));
  const Vector w = c.tail(N + 1);
  Matrix J = Matrix::Zero(3 * N, 3 * N);
  for (Index k = 0; k <= N; ++k) {
    const auto F = face_flux_dual(cfg_, k, u, g, w);
    // Face k adds +F to cell k and -F to cell k - 1.
    for (int sgn = 0; sgn < 2; ++sgn) {
      const Index row_cell = sgn == 0 ? k : k - 1;
      if (row_cell < 0 || row_cell >= N) continue;
      const double sign = sgn == 0 ? 1.0 : -1.0;
      for (int q = 0; q < 3; ++q) {
        const auto& d = F[static_cast<size_t>(q)].d;
        for (int p = 0; p < 3; ++p) {
          if (k >= 1) J(3 * row_cell + q, 3 * (k - 1) + p) += sign * d[static_cast<size_t>(kSlotL + p)];
          if (k < N) J(3 * row_cell + q, 3 * k + p) += sign * d[static_cast<size_t>(kSlotR + p)];
        }
      }
    }
  }
  return J;
}

Matrix FluidModel1D::d_residual_d_coupling(const Vector& u, const Vector& c, const Vector&,
                                           double) const {
  const Index N = cfg_.n_cells;
  const Vector g = cell_jacobians(cfg_, c.head(N + 1));
  const Vector w = c.tail(N + 1);
  const double inv_h = 1.0 / cfg_.h();
  Matrix J = Matrix::Zero(3 * N, 2 * (N + 1));
  for (Index k = 0; k <= N; ++k) {
    const auto F = face_flux_dual(cfg_, k, u, g, w);
    for (int sgn = 0; sgn < 2; ++sgn) {
      const Index row_cell = sgn == 0 ? k : k - 1;
      if (row_cell < 0 || row_cell >= N) continue;
      const double sign = sgn == 0 ? 1.0 : -1.0;
      for (int q = 0; q < 3; ++q) {
        const auto& d = F[static_cast<size_t>(q)].d;
        const Index row = 3 * row_cell + q;
        if (k >= 1) {  // g_{k-1} = (x_k - x_{k-1}) / h
          J(row, k) += sign * d[kSlotGL] * inv_h;
          J(row, k - 1) -= sign * d[kSlotGL] * inv_h;
        }
        if (k < N) {  // g_k = (x_{k+1} - x_k) / h
          J(row, k + 1) += sign * d[kSlotGR] * inv_h;
          J(row, k) -= sign * d[kSlotGR] * inv_h;
        }
        J(row, N + 1 + k) += sign * d[kSlotW];
      }
    }
  }
  return J;
}

Matrix FluidModel1D::d_residual_d_param(const Vector& u, const Vector&, const Vector& mu,
                                        double) const {
  return Matrix::Zero(u.size(), mu.size());
}

Matrix FluidModel1D::d_coupling_d_state(Index k, StateSpan states, const Vector&, double) const {
  const Index N = cfg_.n_cells;
  Matrix J = Matrix::Zero(coupling_dim(), states[static_cast<size_t>(k)].size());
  if (k == kStructure) {
    J(N, 1) = -1.0;
    J(2 * N + 1, 0) = -1.0;
  } else if (k == kMesh) {
    for (Index n = 1; n < N; ++n) {
      J(n, n - 1) = 1.0;
      J(N + 1 + n, N - 1 + n - 1) = 1.0;
    }
  }
  return J;
}

Matrix FluidModel1D::d_coupling_d_param(StateSpan, const Vector& mu, double) const {
  return Matrix::Zero(coupling_dim(), mu.size());
}

Vector FluidModel1D::initial_state(const Vector&) const {
  const Index N = cfg_.n_cells;
  Vector mesh = Vector::Zero(2 * (N - 1));
  for (size_t k = 0; k < cfg_.mesh_d0.size(); ++k) mesh(static_cast<Index>(k)) = cfg_.mesh_d0[k];
  Vector structure(2);
  structure << cfg_.udot_s0, cfg_.u_s0;
  const Vector g = cell_jacobians(cfg_, piston_mesh_geometry(cfg_, structure, mesh).head(N + 1));
  const double E0 = cfg_.p0 / (cfg_.gamma - 1.0);
  Vector u(3 * N);
  for (Index k = 0; k < N; ++k) {
    u(3 * k) = g(k) * cfg_.rho0;
    u(3 * k + 1) = 0.0;
    u(3 * k + 2) = g(k) * E0;
  }
  return u;
}

Matrix FluidModel1D::d_initial_d_param(const Vector& mu) const {
  return Matrix::Zero(state_dim(), mu.size());
}

Matrix FluidModel1D::physical_state(const Vector& u, const Vector& c) const {
  const Index N = cfg_.n_cells;
  const Vector g = cell_jacobians(cfg_, c.head(N + 1));
  Matrix U(N, 3);
  for (Index k = 0; k < N; ++k) U.row(k) = u.segment(3 * k, 3).transpose() / g(k);
  return U;
}

// ----------------------------------------------------------------- assembly

CoupledSystem build_piston(const PistonConfig& cfg) {
  cfg.validate();
  std::vector<SubsystemPtr> subs{std::make_shared<StructureModel>(cfg, true),
                                 std::make_shared<MeshModel1D>(cfg),
                                 std::make_shared<FluidModel1D>(cfg)};
  Vector mu(1);
  mu << cfg.mu_k;
  return CoupledSystem(std::move(subs), std::move(mu));
}

CoupledSystem build_piston(double mu_k) {
  PistonConfig cfg;
  cfg.mu_k = mu_k;
  return build_piston(cfg);
}

std::shared_ptr<const QoiModel> piston_qoi() {
  return std::make_shared<SquaredComponentQoi>(kStructure, 1);
}

}  // namespace pimex
