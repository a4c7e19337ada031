#include "pimex/sensitivity.hpp"

#include "linearize.hpp"

namespace pimex {

SensitivityState initial_sensitivity(const CoupledSystem& sys) {
  SensitivityState s;
  for (Index i = 0; i < sys.size(); ++i) {
    Matrix d = sys[i].d_initial_d_param(sys.mu());
    if (d.rows() != sys[i].state_dim() || d.cols() != sys.n_mu())
      throw DimensionError("d_initial_d_param of '" + sys[i].name() + "' has wrong shape");
    s.du_dmu.push_back(std::move(d));
  }
  return s;
}

SensitivityStepResult step_sensitivity(const CoupledSystem& sys, const ImexTableauPair& tab,
                                       const QoiModel& qoi, const StageRecord& rec,
                                       const SensitivityState& prev) {
  const Index m = sys.size();
  const Index s = tab.s;
  const Index nmu = sys.n_mu();
  const double dt = rec.dt;
  const auto ms = static_cast<size_t>(m);
  const auto& Su = prev.du_dmu;

  SensitivityStepResult out;
  out.stage_du.assign(static_cast<size_t>(s), std::vector<Matrix>(ms));
  out.dk_implicit = out.stage_du;
  out.dk_explicit = out.stage_du;
  out.dpredictor = out.stage_du;
  out.dJ = Vector::Zero(nmu);

  for (Index j = 0; j < s; ++j) {
    const auto js = static_cast<size_t>(j);
    std::vector<detail::StageLinearization> lin;
    lin.reserve(ms);

    for (Index i = 0; i < m; ++i) {
      const auto is = static_cast<size_t>(i);
      lin.push_back(detail::linearize_stage(sys, tab, rec, j, i));
      const auto& L = lin.back();

      Matrix dc = L.dpred_dmu;
      for (Index k = 0; k < m; ++k) {
        const auto& blk = L.dpred_du[static_cast<size_t>(k)];
        if (!blk) continue;
        dc += *blk * (k < i ? out.stage_du[js][static_cast<size_t>(k)] : Su[static_cast<size_t>(k)]);
      }

      Matrix seed = Su[is];
      for (Index p = 0; p < j; ++p) {
        const auto ps = static_cast<size_t>(p);
        seed += tab.a_hat(j, p) * out.dk_explicit[ps][is] + tab.a(j, p) * out.dk_implicit[ps][is];
      }
      Matrix rhs = L.P_g + L.A_g * seed;
      if (dc.rows() > 0) rhs += L.B_g * dc;
      out.dk_implicit[js][is] = L.lu.solve(Matrix(dt * rhs));
      out.stage_du[js][is] = seed + tab.a(j, j) * out.dk_implicit[js][is];
      out.dpredictor[js][is] = std::move(dc);
    }

    for (Index i = 0; i < m; ++i) {
      const auto is = static_cast<size_t>(i);
      const auto& L = lin[is];
      Matrix df = L.df_dmu;
      for (Index k = 0; k < m; ++k) {
        const auto& blk = L.df_du[static_cast<size_t>(k)];
        if (blk) df += *blk * out.stage_du[js][static_cast<size_t>(k)];
      }
      if (out.dpredictor[js][is].rows() > 0) df -= L.B_g * out.dpredictor[js][is];
      out.dk_explicit[js][is] = dt * sys.mass_solve_columns(i, df);
    }
  }

  out.state.du_dmu = Su;
  for (Index i = 0; i < m; ++i) {
    const auto is = static_cast<size_t>(i);
    for (Index p = 0; p < s; ++p) {
      const auto ps = static_cast<size_t>(p);
      out.state.du_dmu[is] += tab.b_hat(p) * out.dk_explicit[ps][is] + tab.b(p) * out.dk_implicit[ps][is];
    }
  }

  for (Index p = 0; p < s; ++p) {
    if (tab.b(p) == 0.0) continue;
    const auto ps = static_cast<size_t>(p);
    const PartitionedState& up = rec.stage_state[ps];
    const double tp = rec.stage_time[ps];
    Vector g = qoi.d_integrand_d_param(up, sys.mu(), tp);
    for (Index i = 0; i < m; ++i) {
      const auto is = static_cast<size_t>(i);
      g += out.stage_du[ps][is].transpose() * qoi.d_integrand_d_state(i, up, sys.mu(), tp);
    }
    out.dJ += dt * tab.b(p) * g;
  }
  return out;
}

GradientResult gradient_direct(const CoupledSystem& sys, const ImexTableauPair& tab,
                               const QoiModel& qoi, const TrajectoryStore& trajectory) {
  detail::check_trajectory(sys, tab, trajectory);
  GradientResult res;
  res.method = "direct";
  res.grad = Vector::Zero(sys.n_mu());
  SensitivityState sens = initial_sensitivity(sys);
  for (Index n = 1; n <= trajectory.size(); ++n) {
    const StageRecord rec = trajectory.get(n);
    res.J += detail::objective_increment(sys, tab, qoi, rec);
    SensitivityStepResult sr = step_sensitivity(sys, tab, qoi, rec, sens);
    res.grad += sr.dJ;
    sens = std::move(sr.state);
  }
  return res;
}

GradientResult gradient_direct(const CoupledSystem& sys, const ImexTableauPair& tab,
                               const QoiModel& qoi, std::span<const double> t_grid,
                               const NewtonOptions& newton) {
  MemoryTrajectory store;
  integrate(sys, tab, qoi, t_grid, store, newton);
  return gradient_direct(sys, tab, qoi, store);
}

}  // namespace pimex
