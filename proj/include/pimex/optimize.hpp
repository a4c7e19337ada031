#pragma once

#include "pimex/sensitivity.hpp"

#include <functional>
#include <string>
#include <vector>

namespace pimex {

struct BoxConstraints {
  Vector lower;
  Vector upper;

  /// Unbounded box of dimension n.
  static BoxConstraints unbounded(Index n);
  Index size() const { return lower.size(); }
  /// Throws DimensionError / ConfigError on inconsistent bounds.
  void validate() const;
  bool contains(const Vector& x) const;
  Vector project(const Vector& x) const;
};

struct OptimizationIterate {
  Index iter = 0;
  Vector mu;
  double J = 0.0;
  Vector grad;
  double pg_norm = 0.0;
  double step = 0.0;
  std::string method;
};

struct OptimizationTrace {
  std::vector<OptimizationIterate> iterates;
};

struct MinimizeOptions {
  double pg_tolerance = 1e-8;
  int max_iterations = 100;
  double armijo = 1e-4;
  double min_step = 1e-20;
};

struct MinimizeResult {
  Vector mu;
  double J = 0.0;
  Vector grad;
  bool converged = false;
  std::string reason;
  OptimizationTrace trace;
};

/// Returns J and dJ/dmu at mu.
using ObjectiveGradient = std::function<GradientResult(const Vector&)>;

/// Infinity norm of P(mu - g) - mu.
double projected_gradient_norm(const BoxConstraints& box, const Vector& mu, const Vector& g);

/// Projected quasi-Newton (BFGS on the free variables) with backtracking
/// Armijo line search along the projection arc.
MinimizeResult minimize(const ObjectiveGradient& fn, const Vector& mu0, const BoxConstraints& box,
                        const MinimizeOptions& options = {});

/// Central differences (J(mu + eps e_k) - J(mu - eps e_k)) / (2 eps).
Vector gradient_fd(const CoupledSystem& sys, const ImexTableauPair& tab, const QoiModel& qoi,
                   std::span<const double> t_grid, double eps = 1e-6, bool parallel = false,
                   const NewtonOptions& newton = {});

}  // namespace pimex
