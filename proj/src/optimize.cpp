#include "pimex/optimize.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <sstream>

namespace pimex {

BoxConstraints BoxConstraints::unbounded(Index n) {
  const double inf = std::numeric_limits<double>::infinity();
  return {Vector::Constant(n, -inf), Vector::Constant(n, inf)};
}

void BoxConstraints::validate() const {
  if (lower.size() != upper.size()) throw DimensionError("box bounds have different lengths");
  for (Index k = 0; k < lower.size(); ++k) {
    if (std::isnan(lower(k)) || std::isnan(upper(k)) || lower(k) > upper(k)) {
      std::ostringstream msg;
      msg << "invalid bounds for component " << k << ": [" << lower(k) << ", " << upper(k) << "]";
      throw ConfigError(msg.str());
    }
  }
}

bool BoxConstraints::contains(const Vector& x) const {
  return x.size() == lower.size() && (x.array() >= lower.array()).all() &&
         (x.array() <= upper.array()).all();
}

Vector BoxConstraints::project(const Vector& x) const {
  return x.cwiseMax(lower).cwiseMin(upper);
}

double projected_gradient_norm(const BoxConstraints& box, const Vector& mu, const Vector& g) {
  return (box.project(mu - g) - mu).lpNorm<Eigen::Infinity>();
}

namespace {

GradientResult evaluate(const ObjectiveGradient& fn, const Vector& mu) {
  GradientResult r = fn(mu);
  if (!std::isfinite(r.J)) throw OptimizationError("objective is not finite");
  if (r.grad.size() != mu.size() || !r.grad.allFinite())
    throw OptimizationError("gradient is not finite or has the wrong length");
  return r;
}

// Variables held at a bound with the gradient pushing outward.
std::vector<bool> active_set(const BoxConstraints& box, const Vector& x, const Vector& g) {
  std::vector<bool> act(static_cast<size_t>(x.size()));
  for (Index k = 0; k < x.size(); ++k)
    act[static_cast<size_t>(k)] = (x(k) <= box.lower(k) && g(k) > 0.0) ||
                                  (x(k) >= box.upper(k) && g(k) < 0.0);
  return act;
}

}  // namespace

MinimizeResult minimize(const ObjectiveGradient& fn, const Vector& mu0, const BoxConstraints& box,
                        const MinimizeOptions& opt) {
  box.validate();
  if (mu0.size() != box.size()) throw DimensionError("initial point and bounds differ in length");
  if (!box.contains(mu0)) throw OptimizationError("initial point lies outside the bounds");

  const Index n = mu0.size();
  MinimizeResult res;
  Vector x = mu0;
  GradientResult cur = evaluate(fn, x);
  Matrix H = Matrix::Identity(n, n);
  bool fresh = true;  // H is the identity: scale the first trial step
  double last_step = 0.0;

  for (int iter = 0;; ++iter) {
    const double pg = projected_gradient_norm(box, x, cur.grad);
    res.trace.iterates.push_back({iter, x, cur.J, cur.grad, pg, last_step, cur.method});
    if (pg <= opt.pg_tolerance) {
      res.converged = true;
      res.reason = "projected gradient below tolerance";
      break;
    }
    if (iter >= opt.max_iterations) {
      res.reason = "iteration limit reached";
      break;
    }

    const auto act = active_set(box, x, cur.grad);
    Matrix Hf = H;
    Vector gf = cur.grad;
    for (Index k = 0; k < n; ++k) {
      if (!act[static_cast<size_t>(k)]) continue;
      Hf.row(k).setZero();
      Hf.col(k).setZero();
      gf(k) = 0.0;
    }
    Vector d = -Hf * gf;
    if (!(d.dot(gf) < 0.0)) {
      H.setIdentity();
      fresh = true;
      d = -gf;
    }

    // Unit-length first trial step while no curvature is known.
    double alpha = fresh ? 1.0 / gf.norm() : 1.0;
    Vector x_new;
    GradientResult next;
    while (true) {
      x_new = box.project(x + alpha * d);
      const Vector s = x_new - x;
      if (s.lpNorm<Eigen::Infinity>() == 0.0 || alpha < opt.min_step) {
        res.mu = x;
        res.J = cur.J;
        res.grad = cur.grad;
        std::ostringstream msg;
        msg << "line search failed at iteration " << iter << " (step underflow); last iterate mu = "
            << x.transpose() << ", J = " << cur.J;
        throw OptimizationError(msg.str());
      }
      next = evaluate(fn, x_new);
      if (next.J <= cur.J + opt.armijo * cur.grad.dot(s)) break;
      alpha *= 0.5;
    }

    const Vector s = x_new - x;
    // Curvature pairs live in the free subspace: pinned variables do not move,
    // and their gradient change must not leak into the free block of H.
    Vector y = next.grad - cur.grad;
    for (Index k = 0; k < n; ++k)
      if (act[static_cast<size_t>(k)] && s(k) == 0.0) y(k) = 0.0;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Matrix I = Matrix::Identity(n, n);
      H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) +
          rho * s * s.transpose();
      fresh = false;
    }
    last_step = s.norm();
    x = x_new;
    cur = std::move(next);
  }

  res.mu = x;
  res.J = cur.J;
  res.grad = cur.grad;
  return res;
}

Vector gradient_fd(const CoupledSystem& sys, const ImexTableauPair& tab, const QoiModel& qoi,
                   std::span<const double> t_grid, double eps, bool parallel,
                   const NewtonOptions& newton) {
  if (!(eps > 0.0)) throw Error("finite-difference step must be positive");
  const Index n = sys.n_mu();
  auto run = [&](Index k, double sign) {
    Vector mu = sys.mu();
    mu(k) += sign * eps;
    try {
      return evaluate_objective(sys.with_mu(mu), tab, qoi, t_grid, newton);
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "finite-difference evaluation of component " << k << (sign > 0 ? " (+eps)" : " (-eps)")
          << " failed: " << e.what();
      throw Error(msg.str());
    }
  };

  std::vector<double> plus(static_cast<size_t>(n)), minus(static_cast<size_t>(n));
  if (parallel) {
    std::vector<std::future<double>> fp, fm;
    for (Index k = 0; k < n; ++k) {
      fp.push_back(std::async(std::launch::async, run, k, 1.0));
      fm.push_back(std::async(std::launch::async, run, k, -1.0));
    }
    for (Index k = 0; k < n; ++k) {
      plus[static_cast<size_t>(k)] = fp[static_cast<size_t>(k)].get();
      minus[static_cast<size_t>(k)] = fm[static_cast<size_t>(k)].get();
    }
  } else {
    for (Index k = 0; k < n; ++k) {
      plus[static_cast<size_t>(k)] = run(k, 1.0);
      minus[static_cast<size_t>(k)] = run(k, -1.0);
    }
  }
  Vector g(n);
  for (Index k = 0; k < n; ++k)
    g(k) = (plus[static_cast<size_t>(k)] - minus[static_cast<size_t>(k)]) / (2.0 * eps);
  return g;
}

}  // namespace pimex
