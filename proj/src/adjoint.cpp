#include "pimex/adjoint.hpp"

#include "linearize.hpp"

namespace pimex {

AdjointState sweep_adjoint_step(const CoupledSystem& sys, const ImexTableauPair& tab,
                                const QoiModel& qoi, const StageRecord& rec,
                                const std::vector<Vector>& lambda_n, Vector& grad) {
  const Index m = sys.size();
  const Index s = tab.s;
  const double dt = rec.dt;
  const auto ms = static_cast<size_t>(m);
  const auto ss = static_cast<size_t>(s);
  const Vector& mu = sys.mu();
  if (lambda_n.size() != ms) throw DimensionError("adjoint terminal state has wrong length");

  AdjointState out;
  out.kappa_implicit.assign(ss, std::vector<Vector>(ms));
  out.kappa_explicit = out.kappa_implicit;
  out.tau = out.kappa_implicit;
  out.sigma = out.kappa_implicit;
  out.lambda = lambda_n;

  // Linearizations of all stages of the step; dpred_du of stage j is also
  // needed when forming lambda_{n-1}.
  std::vector<std::vector<detail::StageLinearization>> lin(ss);

  for (Index j = s - 1; j >= 0; --j) {
    const auto js = static_cast<size_t>(j);
    lin[js].reserve(ms);
    for (Index i = 0; i < m; ++i) lin[js].push_back(detail::linearize_stage(sys, tab, rec, j, i));

    for (Index i = m - 1; i >= 0; --i) {
      const auto is = static_cast<size_t>(i);
      Vector rhs = tab.b_hat(j) * lambda_n[is];
      for (Index p = j + 1; p < s; ++p) rhs += tab.a_hat(p, j) * out.tau[static_cast<size_t>(p)][is];
      out.kappa_explicit[js][is] = sys.mass_solve_transpose(i, rhs);
    }

    const PartitionedState& uj = rec.stage_state[js];
    const double tj = rec.stage_time[js];
    for (Index i = m - 1; i >= 0; --i) {
      const auto is = static_cast<size_t>(i);
      const auto& L = lin[js][is];

      Vector tt = (dt * tab.b(j)) * qoi.d_integrand_d_state(i, uj, mu, tj);
      for (Index k = 0; k < m; ++k) {
        const auto& blk = lin[js][static_cast<size_t>(k)].df_du[is];
        if (blk) tt += dt * (blk->transpose() * out.kappa_explicit[js][static_cast<size_t>(k)]);
      }
      for (Index p = i + 1; p < m; ++p) {
        const auto& blk = lin[js][static_cast<size_t>(p)].dpred_du[is];
        if (blk) tt += blk->transpose() * out.sigma[js][static_cast<size_t>(p)];
      }

      Vector rhs = tab.b(j) * lambda_n[is] + tab.a(j, j) * tt;
      for (Index p = j + 1; p < s; ++p) rhs += tab.a(p, j) * out.tau[static_cast<size_t>(p)][is];
      const Vector kI = L.lu.solve_transpose(rhs);

      out.tau[js][is] = tt + dt * (L.A_g.transpose() * kI);
      if (L.B_g.cols() > 0)
        out.sigma[js][is] = dt * (L.B_g.transpose() * (kI - out.kappa_explicit[js][is]));
      else
        out.sigma[js][is] = Vector::Zero(0);

      grad += dt * (L.P_g.transpose() * kI) + dt * (L.df_dmu.transpose() * out.kappa_explicit[js][is]);
      if (L.dpred_dmu.rows() > 0) grad += L.dpred_dmu.transpose() * out.sigma[js][is];
      out.kappa_implicit[js][is] = kI;
    }
  }

  for (Index i = 0; i < m; ++i) {
    const auto is = static_cast<size_t>(i);
    for (Index j = 0; j < s; ++j) {
      const auto js = static_cast<size_t>(j);
      out.lambda[is] += out.tau[js][is];
      // Lagged predictor slots: subsystems p <= i read u^i_{n-1}.
      for (Index p = 0; p <= i; ++p) {
        const auto& blk = lin[js][static_cast<size_t>(p)].dpred_du[is];
        if (blk) out.lambda[is] += blk->transpose() * out.sigma[js][static_cast<size_t>(p)];
      }
    }
  }

  // Explicit parameter dependence of the integrand.
  for (Index p = 0; p < s; ++p) {
    if (tab.b(p) == 0.0) continue;
    const auto ps = static_cast<size_t>(p);
    grad += (dt * tab.b(p)) * qoi.d_integrand_d_param(rec.stage_state[ps], mu, rec.stage_time[ps]);
  }
  return out;
}

GradientResult gradient_adjoint(const CoupledSystem& sys, const ImexTableauPair& tab,
                                const QoiModel& qoi, const TrajectoryStore& trajectory,
                                const AdjointObserver& observer) {
  detail::check_trajectory(sys, tab, trajectory);
  GradientResult res;
  res.method = "adjoint";
  res.grad = Vector::Zero(sys.n_mu());

  std::vector<double> dJ(static_cast<size_t>(trajectory.size()));
  std::vector<Vector> lambda;
  for (Index d : sys.state_dims()) lambda.push_back(Vector::Zero(d));
  for (Index n = trajectory.size(); n >= 1; --n) {
    const StageRecord rec = trajectory.get(n);
    if (rec.step != n) throw FormatError("trajectory record " + std::to_string(n) + " is out of order");
    dJ[static_cast<size_t>(n - 1)] = detail::objective_increment(sys, tab, qoi, rec);
    AdjointState st = sweep_adjoint_step(sys, tab, qoi, rec, lambda, res.grad);
    lambda = std::move(st.lambda);
    if (observer) observer(n - 1, lambda);
  }

  for (double d : dJ) res.J += d;  // same summation order as the forward run
  for (Index i = 0; i < sys.size(); ++i)
    res.grad += sys[i].d_initial_d_param(sys.mu()).transpose() * lambda[static_cast<size_t>(i)];
  return res;
}

}  // namespace pimex
