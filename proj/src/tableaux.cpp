#include "pimex/tableaux.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace pimex {
namespace {

ImexTableauPair make_pair(std::string name, int order, Matrix a_hat, Vector b_hat, Matrix a,
                          Vector b, Vector c) {
  ImexTableauPair tab;
  tab.name = std::move(name);
  tab.s = b.size();
  tab.design_order = order;
  tab.c_hat = c;
  tab.c = std::move(c);
  tab.a_hat = std::move(a_hat);
  tab.b_hat = std::move(b_hat);
  tab.a = std::move(a);
  tab.b = std::move(b);
  return tab;
}

// Forward/backward Euler written with an explicit first stage.
ImexTableauPair imex1() {
  Matrix a_hat{{0.0, 0.0}, {1.0, 0.0}};
  Vector b_hat{{1.0, 0.0}};
  Matrix a{{0.0, 0.0}, {0.0, 1.0}};
  Vector b{{0.0, 1.0}};
  return make_pair("imex1", 1, a_hat, b_hat, a, b, Vector{{0.0, 1.0}});
}

// ARS(2,3,2): L-stable, stiffly accurate, gamma = 1 - 1/sqrt(2).
ImexTableauPair imex2() {
  const double g = 1.0 - 1.0 / std::sqrt(2.0);
  const double d = -2.0 * std::sqrt(2.0) / 3.0;
  Matrix a_hat{{0.0, 0.0, 0.0}, {g, 0.0, 0.0}, {d, 1.0 - d, 0.0}};
  Vector b_hat{{0.0, 1.0 - g, g}};
  Matrix a{{0.0, 0.0, 0.0}, {0.0, g, 0.0}, {0.0, 1.0 - g, g}};
  Vector b{{0.0, 1.0 - g, g}};
  return make_pair("imex2", 2, a_hat, b_hat, a, b, Vector{{0.0, g, 1.0}});
}

// ARK3(2)4L[2]SA additive pair.
ImexTableauPair imex3() {
  const double g = 1767732205903.0 / 4055673282236.0;
  Vector b{{1471266399579.0 / 7840856788654.0, -4482444167858.0 / 7529755066697.0,
            11266239266428.0 / 11593286722821.0, g}};

  Matrix a_hat = Matrix::Zero(4, 4);
  a_hat(1, 0) = 1767732205903.0 / 2027836641118.0;
  a_hat(2, 0) = 5535828885825.0 / 10492691773637.0;
  a_hat(2, 1) = 788022342437.0 / 10882634858940.0;
  a_hat(3, 0) = 6485989280629.0 / 16251701735622.0;
  a_hat(3, 1) = -4246266847089.0 / 9704473918619.0;
  a_hat(3, 2) = 10755448449292.0 / 10357097424841.0;

  Matrix a = Matrix::Zero(4, 4);
  a(1, 0) = g;
  a(1, 1) = g;
  a(2, 0) = 2746238789719.0 / 10658868560708.0;
  a(2, 1) = -640167445237.0 / 6845629431997.0;
  a(2, 2) = g;
  a.row(3) = b.transpose();
  Vector c{{0.0, 1767732205903.0 / 2027836641118.0, 3.0 / 5.0, 1.0}};
  return make_pair("imex3", 3, a_hat, b, a, b, c);
}

// ARK4(3)6L[2]SA additive pair.
ImexTableauPair imex4() {
  Vector b{{82889.0 / 524892.0, 0.0, 15625.0 / 83664.0, 69875.0 / 102672.0, -2260.0 / 8211.0,
            0.25}};

  Matrix a_hat = Matrix::Zero(6, 6);
  a_hat(1, 0) = 0.5;
  a_hat(2, 0) = 13861.0 / 62500.0;
  a_hat(2, 1) = 6889.0 / 62500.0;
  a_hat(3, 0) = -116923316275.0 / 2393684061468.0;
  a_hat(3, 1) = -2731218467317.0 / 15368042101831.0;
  a_hat(3, 2) = 9408046702089.0 / 11113171139209.0;
  a_hat(4, 0) = -451086348788.0 / 2902428689909.0;
  a_hat(4, 1) = -2682348792572.0 / 7519795681897.0;
  a_hat(4, 2) = 12662868775082.0 / 11960479115383.0;
  a_hat(4, 3) = 3355817975965.0 / 11060851509271.0;
  a_hat(5, 0) = 647845179188.0 / 3216320057751.0;
  a_hat(5, 1) = 73281519250.0 / 8382639484533.0;
  a_hat(5, 2) = 552539513391.0 / 3454668386233.0;
  a_hat(5, 3) = 3354512671639.0 / 8306763924573.0;
  a_hat(5, 4) = 4040.0 / 17871.0;

  Matrix a = Matrix::Zero(6, 6);
  a(1, 0) = 0.25;
  a(1, 1) = 0.25;
  a(2, 0) = 8611.0 / 62500.0;
  a(2, 1) = -1743.0 / 31250.0;
  a(2, 2) = 0.25;
  a(3, 0) = 5012029.0 / 34652500.0;
  a(3, 1) = -654441.0 / 2922500.0;
  a(3, 2) = 174375.0 / 388108.0;
  a(3, 3) = 0.25;
  a(4, 0) = 15267082809.0 / 155376265600.0;
  a(4, 1) = -71443401.0 / 120774400.0;
  a(4, 2) = 730878875.0 / 902184768.0;
  a(4, 3) = 2285395.0 / 8070912.0;
  a(4, 4) = 0.25;
  a.row(5) = b.transpose();
  Vector c{{0.0, 0.5, 83.0 / 250.0, 31.0 / 50.0, 17.0 / 20.0, 1.0}};
  return make_pair("imex4", 4, a_hat, b, a, b, c);
}

void add(TableauReport& report, std::string name, double defect, double tol) {
  report.checks.push_back({std::move(name), std::isfinite(defect) && defect < tol, defect});
}

}  // namespace

const std::vector<std::string>& scheme_names() {
  static const std::vector<std::string> names{"imex1", "imex2", "imex3", "imex4"};
  return names;
}

ImexTableauPair get_scheme(std::string_view name) {
  if (name == "imex1") return imex1();
  if (name == "imex2") return imex2();
  if (name == "imex3") return imex3();
  if (name == "imex4") return imex4();
  std::ostringstream msg;
  msg << "unknown IMEX scheme '" << name << "'; valid schemes are:";
  for (const auto& n : scheme_names()) msg << ' ' << n;
  throw UnknownSchemeError(msg.str());
}

bool TableauReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const TableauCheck* TableauReport::find(std::string_view check_name) const {
  for (const auto& c : checks)
    if (c.name == check_name) return &c;
  return nullptr;
}

TableauReport verify(const ImexTableauPair& tab, double tol) {
  TableauReport report;
  report.scheme = tab.name;
  const Index s = tab.s;
  if (tab.a_hat.rows() != s || tab.a_hat.cols() != s || tab.a.rows() != s || tab.a.cols() != s ||
      tab.b.size() != s || tab.b_hat.size() != s || tab.c.size() != s || tab.c_hat.size() != s) {
    add(report, "dimensions", 1.0, tol);
    return report;
  }

  double upper_hat = 0.0;
  double upper = 0.0;
  for (Index j = 0; j < s; ++j) {
    for (Index p = j; p < s; ++p) upper_hat = std::max(upper_hat, std::abs(tab.a_hat(j, p)));
    for (Index p = j + 1; p < s; ++p) upper = std::max(upper, std::abs(tab.a(j, p)));
  }
  add(report, "explicit_strictly_lower_triangular", upper_hat, tol);
  add(report, "implicit_lower_triangular", upper, tol);
  add(report, "explicit_first_stage", std::abs(tab.a(0, 0)), tol);

  const Vector ones = Vector::Ones(s);
  add(report, "explicit_row_sums", (tab.a_hat * ones - tab.c_hat).cwiseAbs().maxCoeff(), tol);
  add(report, "implicit_row_sums", (tab.a * ones - tab.c).cwiseAbs().maxCoeff(), tol);
  add(report, "stiffly_accurate",
      (tab.a.row(s - 1).transpose() - tab.b).cwiseAbs().maxCoeff(), tol);
  add(report, "sum_b_equals_one", std::abs(tab.b.sum() - 1.0), tol);
  add(report, "sum_b_hat_equals_one", std::abs(tab.b_hat.sum() - 1.0), tol);
  add(report, "c_hat_equals_c", (tab.c_hat - tab.c).cwiseAbs().maxCoeff(), tol);

  const int order = std::min(tab.design_order, 3);
  if (order >= 2) {
    add(report, "order2_implicit", std::abs(tab.b.dot(tab.c) - 0.5), tol);
    add(report, "order2_explicit", std::abs(tab.b_hat.dot(tab.c_hat) - 0.5), tol);
    add(report, "order2_coupling",
        std::max(std::abs(tab.b.dot(tab.c_hat) - 0.5), std::abs(tab.b_hat.dot(tab.c) - 0.5)),
        tol);
  }
  if (order >= 3) {
    // All bushy and tall trees of order 3 with every mix of the two tableaux.
    const std::array<const Matrix*, 2> mats{&tab.a_hat, &tab.a};
    const std::array<const Vector*, 2> weights{&tab.b_hat, &tab.b};
    double bushy = 0.0;
    double tall = 0.0;
    for (const Vector* w : weights) {
      for (const Matrix* x : mats) {
        const Vector cx = *x * ones;
        for (const Matrix* y : mats) {
          const Vector cy = *y * ones;
          bushy = std::max(bushy, std::abs(w->dot(cx.cwiseProduct(cy)) - 1.0 / 3.0));
          tall = std::max(tall, std::abs(w->dot(*x * cy) - 1.0 / 6.0));
        }
      }
    }
    add(report, "order3_bushy", bushy, tol);
    add(report, "order3_tall", tall, tol);
  }
  return report;
}

double implicit_stability_function(const ImexTableauPair& tab, double z) {
  const Index s = tab.s;
  const Matrix lhs = Matrix::Identity(s, s) - z * tab.a;
  const Vector x = lhs.partialPivLu().solve(Vector::Ones(s));
  return 1.0 + z * tab.b.dot(x);
}

}  // namespace pimex
