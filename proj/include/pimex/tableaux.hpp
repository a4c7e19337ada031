#pragma once

#include "pimex/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace pimex {

/// Paired explicit/implicit Butcher tableaux of an s-stage IMEX Runge-Kutta
/// scheme. The explicit part (a_hat, b_hat, c_hat) integrates the non-stiff
/// velocity, the diagonally implicit part (a, b, c) the stiff one.
struct ImexTableauPair {
  std::string name;
  Index s = 0;
  Matrix a_hat;
  Vector b_hat;
  Vector c_hat;
  Matrix a;
  Vector b;
  Vector c;
  int design_order = 1;
};

/// Names of all registered schemes, in increasing order.
const std::vector<std::string>& scheme_names();

/// Returns the registered scheme `name` ("imex1" .. "imex4").
/// Throws UnknownSchemeError listing the valid identifiers otherwise.
ImexTableauPair get_scheme(std::string_view name);

struct TableauCheck {
  std::string name;
  bool passed = false;
  double defect = 0.0;
};

struct TableauReport {
  std::string scheme;
  std::vector<TableauCheck> checks;

  bool all_passed() const;
  const TableauCheck* find(std::string_view check_name) const;
};

/// Checks structural invariants and order conditions (up to
/// min(design_order, 3)) of a tableau pair. Failures are report entries.
TableauReport verify(const ImexTableauPair& tab, double tolerance = 1e-12);

/// Stability function R(z) = 1 + z b^T (I - z A)^{-1} 1 of the implicit part.
double implicit_stability_function(const ImexTableauPair& tab, double z);

}  // namespace pimex
