#pragma once

// Jacobian blocks of one stage/subsystem of a recorded step, shared by the
// forward sensitivity and the adjoint sweeps.

#include "linear_solver.hpp"
#include "pimex/stepper.hpp"

#include <optional>

namespace pimex::detail {

struct StageLinearization {
  // g = r(u, chat): implicit split velocity.
  SparseMatrix A_g, B_g;
  Matrix P_g;
  // f = r(u, c(u_stage)) - r(u, chat): explicit split velocity.
  std::vector<std::optional<SparseMatrix>> df_du;  // df/du^k; empty if identically zero
  Matrix df_dmu;
  // Predictor partials w.r.t. each of its argument slots.
  std::vector<std::optional<SparseMatrix>> dpred_du;
  Matrix dpred_dmu;
  // Factorization of M - dt a_jj A_g.
  StageSolver lu;
};

inline StageLinearization linearize_stage(const CoupledSystem& sys, const ImexTableauPair& tab,
                                          const StageRecord& rec, Index j, Index i) {
  const auto js = static_cast<size_t>(j);
  const auto is = static_cast<size_t>(i);
  const Subsystem& sub = sys[i];
  const Vector& mu = sys.mu();
  const double t = rec.stage_time[js];
  const double dt = rec.dt;
  const Index m = sys.size();
  const Vector& u = rec.stage_state[js][is];
  const Vector& chat = rec.predictor[js][is];

  StageLinearization L;
  const Matrix A_g = sub.d_residual_d_state(u, chat, mu, t);
  L.A_g = A_g.sparseView();
  L.B_g = sub.d_residual_d_coupling(u, chat, mu, t).sparseView();
  L.P_g = sub.d_residual_d_param(u, chat, mu, t);

  const PartitionedState& ustage = rec.stage_state[js];
  const Vector cfull = sub.coupling(ustage, mu, t);
  const SparseMatrix A_f = sub.d_residual_d_state(u, cfull, mu, t).sparseView();
  const SparseMatrix B_f = sub.d_residual_d_coupling(u, cfull, mu, t).sparseView();
  const Matrix P_f = sub.d_residual_d_param(u, cfull, mu, t);

  L.df_du.resize(static_cast<size_t>(m));
  for (Index k = 0; k < m; ++k) {
    std::optional<SparseMatrix> blk;
    if (sub.coupling_depends_on(k) && sub.coupling_dim() > 0) {
      const SparseMatrix dc = sub.d_coupling_d_state(k, ustage, mu, t).sparseView();
      blk = SparseMatrix(B_f * dc);
    }
    if (k == i) {
      const SparseMatrix diff = A_f - L.A_g;
      if (blk)
        *blk += diff;
      else
        blk = diff;
    }
    L.df_du[static_cast<size_t>(k)] = std::move(blk);
  }
  L.df_dmu = P_f - L.P_g;
  if (sub.coupling_dim() > 0) L.df_dmu += B_f * sub.d_coupling_d_param(ustage, mu, t);

  const PartitionedState args = predictor_arguments(ustage, rec.u_prev, i);
  L.dpred_du.resize(static_cast<size_t>(m));
  for (Index k = 0; k < m; ++k) {
    if (sub.coupling_depends_on(k) && sub.coupling_dim() > 0)
      L.dpred_du[static_cast<size_t>(k)] = sub.d_coupling_d_state(k, args, mu, t).sparseView();
  }
  L.dpred_dmu = sub.coupling_dim() > 0 ? sub.d_coupling_d_param(args, mu, t)
                                       : Matrix::Zero(0, sys.n_mu());

  L.lu.compute(sys.mass(i) - dt * tab.a(j, j) * A_g);
  if (!L.lu.ok()) {
    throw SingularMatrixError("implicit stage matrix of subsystem " + std::to_string(i) +
                              " at stage " + std::to_string(j + 1) + " of step " +
                              std::to_string(rec.step) + " is singular");
  }
  return L;
}

inline void check_trajectory(const CoupledSystem& sys, const ImexTableauPair& tab,
                             const TrajectoryStore& store) {
  const TrajectoryLayout& lay = store.layout();
  if (lay.stages != tab.s || lay.state_dims != sys.state_dims() ||
      lay.coupling_dims != sys.coupling_dims() || lay.n_mu != sys.n_mu()) {
    throw DimensionError("trajectory does not match the coupled system or scheme");
  }
}

/// J recomputed from the recorded stage states, identical to step()'s sum.
inline double objective_increment(const CoupledSystem& sys, const ImexTableauPair& tab,
                                  const QoiModel& qoi, const StageRecord& rec) {
  double dJ = 0.0;
  for (Index p = 0; p < tab.s; ++p) {
    if (tab.b(p) == 0.0) continue;
    dJ += rec.dt * tab.b(p) *
          qoi.integrand(rec.stage_state[static_cast<size_t>(p)], sys.mu(),
                        rec.stage_time[static_cast<size_t>(p)]);
  }
  return dJ;
}

}  // namespace pimex::detail
