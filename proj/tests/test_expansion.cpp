#include "dini/expansion.hpp"
#include "dini/fields.hpp"
#include "dini/rng.hpp"
#include "dini/frequency.hpp"
#include "dini/solver.hpp"

#include <doctest.h>

#include <cmath>

using namespace dini;

namespace {

Polynomial X(int d, int i) { return Polynomial::coordinate(d, i); }

Vec point(std::initializer_list<double> v) {
  Vec p(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) p(i++) = x;
  return p;
}

FlattenChart flat_chart(int d) {
  return FlattenChart(GraphDomain::from(GraphFunction::flat(d)), Vec::Zero(d - 1), 2.0);
}

}  // namespace

TEST_CASE("cutoff ramp") {
  double R = 0.5;
  CHECK(cutoff(0.0, R) == 1.0);
  CHECK(cutoff(R / 2, R) == 1.0);
  CHECK(cutoff(R, R) == 0.0);
  double prev = 1.0;
  for (int i = 0; i <= 100; ++i) {
    double c = cutoff(R / 2 + i * R / 200, R);
    CHECK(c <= prev + 1e-15);
    prev = c;
  }
  // first and second derivatives vanish at both ends
  double e = 1e-4;
  for (double x : {R / 2, R}) {
    double d1 = (cutoff(x + e, R) - cutoff(x - e, R)) / (2 * e);
    double d2 = (cutoff(x + e, R) - 2 * cutoff(x, R) + cutoff(x - e, R)) / (e * e);
    CHECK(std::abs(d1) < 1e3 * e * e);
    CHECK(std::abs(d2) < 1e3 * e);
  }
}

TEST_CASE("blow-up of the linear profile is scale free") {
  for (int d : {2, 3}) {
    PolynomialField u(X(d, d - 1), true);
    Polynomial expect = normalize_tangent(X(d, d - 1));
    Mat I = Mat::Identity(d, d);
    for (double r : {0.01, 0.1, 0.5}) {
      Blowup b = blowup(u, Vec::Zero(d), I, r, 1);
      CHECK(b.setdiff < 1e-12);
      CHECK((normalize_tangent(b.fit.poly) - expect).coef_max() < 1e-10);
    }
    TangentReport tr = tangent_from_blowups(u, Vec::Zero(d), I, {0.5, 0.25, 0.125}, 1, Modulus::zero(), ModulusConfig{});
    CHECK(l2_norm_halfball(tr.tangent) == doctest::Approx(1.0).epsilon(1e-12));
    for (double e : tr.epsilon) CHECK(e < 1e-10);
  }
}

TEST_CASE("blow-ups of t + 2xt converge at rate r") {
  PolynomialField u(X(2, 1) + 2.0 * X(2, 0) * X(2, 1), true);
  std::vector<double> radii;
  for (int k = 2; k <= 7; ++k) radii.push_back(std::ldexp(1.0, -k));
  TangentReport tr = tangent_from_blowups(u, Vec::Zero(2), Mat::Identity(2, 2), radii, 1, Modulus::zero(), ModulusConfig{});
  CHECK(tr.slope == doctest::Approx(1.0).epsilon(0.05));
  for (std::size_t i = 0; i < radii.size(); ++i) CHECK(tr.epsilon[i] <= 1.2 * tr.radii[i]);
  CHECK(tr.converged);
  // xt is orthogonal to t on the half ball, so the odd projection is exactly t
  CHECK((tr.tangent - normalize_tangent(X(2, 1))).coef_max() < 1e-10);
}

TEST_CASE("set difference of a curved graph") {
  double c0 = 0.2;
  GraphDomain dom = GraphDomain::from(GraphFunction::power(2, c0, 0.5));
  FlattenChart chart(dom, Vec::Zero(1), 1.0);
  UnflattenedField u(chart, std::make_shared<PolynomialField>(X(2, 1), false));
  for (double r : {1e-3, 1e-2, 0.05}) {
    Blowup b = blowup(u, Vec::Zero(2), Mat::Identity(2, 2), r, 1);
    // int_{-1}^{1} c0 r^{1/2} |y|^{3/2} dy, the first-order area between the graph and its tangent
    double expect = c0 * std::sqrt(r) * 0.8;
    CHECK(b.setdiff == doctest::Approx(expect).epsilon(0.05));
    CHECK(b.setdiff <= dom.theta(r));
  }
}

TEST_CASE("Newtonian potential") {
  ExpansionOptions opt;
  SUBCASE("flat chart gives zero") {
    SourceField src = SourceField::from_solution(flat_chart(2), std::make_shared<PolynomialField>(X(2, 1), false), 0.5);
    CHECK(src.is_zero());
    CHECK(newtonian_w(src, point({0.1, 0.05}), opt) == 0.0);
  }
  SUBCASE("constant field times the cutoff") {
    // grad Gamma * (e1 zeta) = d/dY1 of the radial potential of zeta; equals -Y1/d where zeta = 1
    for (int d : {2, 3}) {
      SourceField src(d, 0.5, [d](const Vec&) { return unit_vector(d, 0); });
      Vec Y = Vec::Zero(d);
      Y(0) = 0.1;
      Y(d - 1) = -0.07;
      CHECK(newtonian_w(src, Y, opt) == doctest::Approx(-0.1 / d).epsilon(1e-8));
    }
  }
  SUBCASE("out of range") {
    SourceField src(2, 0.5, [](const Vec&) { return unit_vector(2, 0); });
    CHECK_THROWS_AS(newtonian_w(src, point({0.3, 0.0}), opt), DomainError);
  }
  SUBCASE("Laplacian matches the divergence of the source") {
    double R = 0.5;
    auto F = [](const Vec& Z) {
      Vec f(2);
      f << Z(0) * Z(0), std::sin(3 * Z(1));
      return f;
    };
    SourceField src(2, R, F);
    ExpansionOptions fine = opt;
    fine.w_angular = 32;
    fine.w_radial = 16;
    CounterRng rng(11);
    double eta = 0.01, worst = 0;
    for (int p = 0; p < 50; ++p) {
      double a = 2 * M_PI * rng.uniform(), rr = 0.2 * rng.uniform();
      Vec Y = point({rr * std::cos(a), rr * std::sin(a)});
      double lap = 0;
      double w0 = newtonian_w(src, Y, fine);
      for (int i = 0; i < 2; ++i) {
        Vec e = unit_vector(2, i) * eta;
        lap += (newtonian_w(src, Y + e, fine) - 2 * w0 + newtonian_w(src, Y - e, fine)) / (eta * eta);
      }
      double div = 2 * Y(0) + 3 * std::cos(3 * Y(1));
      worst = std::max(worst, std::abs(-lap - div) / std::abs(div));
    }
    CHECK(worst <= 1e-2);
  }
}

TEST_CASE("P1 and P2 on flat fixtures") {
  ExpansionOptions opt;
  auto chart = flat_chart(2);
  SUBCASE("t + 2xt, N = 1") {
    auto v = std::make_shared<PolynomialField>(X(2, 1) + 2.0 * X(2, 0) * X(2, 1), false);
    SourceField src = SourceField::from_solution(chart, v, opt.kernel_R);
    P2Report p2 = polynomial_P2(src, 1, opt);
    CHECK(p2.P2.is_zero());
    P1Report p1 = polynomial_P1(*v, src, 1, opt);
    CHECK((p1.P1 - X(2, 1)).coef_max() < 1e-10);
    CHECK(p1.exponent == doctest::Approx(2.0).epsilon(1e-6));
    std::vector<double> radii = {0.25, 0.125, 0.0625};
    ExpansionResult ex = assemble_expansion(p1.P1, p2.P2, *v, 1, radii, Modulus::zero(), ModulusConfig{}, opt);
    CHECK((ex.PN - X(2, 1)).coef_max() < 1e-10);
    CHECK(ex.boundary_ratio <= 1e-10);
    CHECK(ex.lower_fraction == 0.0);
    for (std::size_t i = 0; i < radii.size(); ++i) {
      CHECK(ex.psi_max[i] <= 2 * radii[i] * radii[i]);
      CHECK(ex.psi_max[i] >= 0.9 * radii[i] * radii[i]);  // max of 2xt on the sphere is r^2
    }
    UnflattenReport un = unflatten_expansion(chart, *v, ex, Modulus::zero(), ModulusConfig{}, opt);
    for (double c : un.correction_max) CHECK(c == 0.0);
    CHECK(un.consistency < 1e-15);
  }
  SUBCASE("homogeneous v is reproduced") {
    auto v = std::make_shared<PolynomialField>(X(2, 0) * X(2, 1), false);
    SourceField src = SourceField::from_solution(chart, v, opt.kernel_R);
    P1Report p1 = polynomial_P1(*v, src, 2, opt);
    CHECK((p1.P1 - X(2, 0) * X(2, 1)).coef_max() < 1e-10);
    CHECK(std::isinf(p1.exponent));
  }
  SUBCASE("lower-degree contamination is rejected") {
    auto v = std::make_shared<PolynomialField>(X(2, 1) + 2.0 * X(2, 0) * X(2, 1), false);
    CHECK_THROWS_AS(assemble_expansion(X(2, 1) + X(2, 0) * X(2, 1), Polynomial(2), *v, 2, {0.1}, Modulus::zero(),
                                       ModulusConfig{}, opt),
                    ContractError);
  }
}

TEST_CASE("uniqueness distance") {
  Polynomial p = X(3, 2) * (X(3, 0) + X(3, 1));
  CHECK(uniqueness_check(p, 3.0 * p, 1e-12).distance < 1e-15);
  CHECK(uniqueness_check(p, p, 0).pass);
  CHECK_THROWS_AS(uniqueness_check(p, X(3, 2), 1), ContractError);
}

TEST_CASE("tangent continuity along the singular line of (x1 + x2) t") {
  Polynomial p = (X(3, 0) + X(3, 1)) * X(3, 2);
  PolynomialField u(p, true);
  Mat I = Mat::Identity(3, 3);
  std::vector<Vec> centers;
  std::vector<Mat> frames;
  std::vector<Polynomial> exact;
  for (int j : {2, 4, 8, 16}) {
    centers.push_back(point({1.0 / j, -1.0 / j, 0}));
    frames.push_back(I);
    // u(Xj + Z) = (z1 + z2) z3 exactly on the line x1 + x2 = 0
    exact.push_back(normalize_tangent(p));
  }
  std::vector<double> ladder = {1e-3, 2e-3};
  ContinuityReport rep = tangent_continuity(u, centers, frames, Vec::Zero(3), I, 2, 0.05, ladder, exact);
  CHECK(rep.monotone);
  for (double x : rep.distance) CHECK(x < 1e-10);
  for (double x : rep.reference) CHECK(x < 1e-10);
  std::vector<Vec> off = {point({0.25, 0, 0})};
  CHECK_THROWS_AS(tangent_continuity(u, off, {I}, Vec::Zero(3), I, 2, 0.05, ladder), ContractError);
}

TEST_CASE("curved chart: routes agree and the frequency curve is nearly monotone") {
  double c0 = 0.01;
  GraphDomain dom = GraphDomain::from(GraphFunction::power(2, c0, 0.5));
  FlattenChart chart(dom, Vec::Zero(1), 1.0);
  SolveOptions so;
  so.h = 1.0 / 128;
  so.bc = [](const Vec& Y) { return Y(1) + 0.5 * Y(0) * Y(1); };
  auto v = std::make_shared<DiscreteField>(solve_dirichlet(chart, so).field);
  UnflattenedField u(chart, v);
  ModulusConfig cfg;
  std::vector<double> radii;
  for (int k = 3; k <= 7; ++k) radii.push_back(std::ldexp(1.0, -k));
  FrequencyCurve fc = frequency_curve(u, Vec::Zero(2), radii, dom.theta, cfg);
  CHECK(fc.max_violation() <= 1e-2);
  CHECK(vanishing_order(fc).order == 1);

  ExpansionOptions opt;
  opt.p2_last_shell = 7;
  TangentReport tr = tangent_from_blowups(u, Vec::Zero(2), chart.frame().O(), radii, 1, dom.theta, cfg, opt);
  SourceField src = SourceField::from_solution(chart, v, opt.kernel_R);
  P2Report p2 = polynomial_P2(src, 1, opt);
  CHECK(p2.cauchy);
  CHECK(p2.asymmetry < 1e-10);
  P1Report p1 = polynomial_P1(*v, src, 1, opt);
  CHECK(p1.exponent >= 1.8);
  ExpansionResult ex = assemble_expansion(p1.P1, p2.P2, *v, 1, radii, dom.theta, cfg, opt);
  CHECK(uniqueness_check(tr.tangent, ex.PN, 5e-2).pass);
  UnflattenReport un = unflatten_expansion(chart, u, ex, dom.theta, cfg, opt);
  CHECK(un.consistency < 1e-12);
  CHECK(un.C <= 2 * ex.C);
}
