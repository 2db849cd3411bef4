#include "dini/rng.hpp"
#include "dini/solver.hpp"

#include <doctest.h>

#include <cmath>

using namespace dini;

namespace {

FlattenChart flat_chart(int d) {
  return FlattenChart(GraphDomain::from(GraphFunction::flat(d)), Vec::Zero(d - 1), 2.0);
}

FlattenChart curved_chart(double c0) {
  return FlattenChart(GraphDomain::from(GraphFunction::power(2, c0, 0.5)), Vec::Zero(1), 1.0);
}

double max_node_error(const DiscreteField& f, const PointFn& exact) {
  double e = 0;
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    if (f.type[k] == kOutside) continue;
    e = std::max(e, std::abs(f.values[k] - exact(f.grid.position(f.grid.unindex(k)))));
  }
  return e;
}

}  // namespace

TEST_CASE("grid indexing") {
  GridSpec g = GridSpec::half_ball(3, 1.0, 0.125);
  CHECK(g.M == 8);
  CHECK(g.nodes() == 17u * 17u * 9u);
  for (std::size_t k = 0; k < g.nodes(); k += 7) CHECK(g.index(g.unindex(k)) == k);
  CHECK_THROWS_AS(GridSpec::half_ball(2, 1.0, 0.3), DomainError);
  CHECK_THROWS_AS(GridSpec::half_ball(4, 1.0, 0.25), DomainError);
}

TEST_CASE("flat manufactured solution converges at second order") {
  FlattenChart chart = flat_chart(2);
  PointFn U = [](const Vec& X) { return std::exp(X(0)) * std::sin(X(1)); };
  std::vector<double> err;
  for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    SolveOptions o;
    o.h = h;
    o.bc = U;
    SolveResult r = solve_dirichlet(chart, o);
    CHECK(r.stats.scaled_residual < 1e-8);
    err.push_back(max_node_error(r.field, U));
  }
  double slope = std::log2(err[1] / err[2]);
  MESSAGE("errors " << err[0] << " " << err[1] << " " << err[2]);
  CHECK(slope >= 1.8);
  CHECK(err[2] < 1e-4);
}

TEST_CASE("linear data is reproduced exactly") {
  FlattenChart chart = flat_chart(3);
  SolveOptions o;
  o.h = 1.0 / 12;
  o.bc = [](const Vec& X) { return X(2) + 0.5 * X(0) * 0 + 0.25 * X(1) * X(2); };
  SolveResult r = solve_dirichlet(chart, o);
  CHECK(max_node_error(r.field, o.bc) < 1e-9);
}

TEST_CASE("zero data gives zero") {
  SolveOptions o;
  o.h = 1.0 / 32;
  o.bc = [](const Vec&) { return 0.0; };
  SolveResult r = solve_dirichlet(curved_chart(0.1), o);
  CHECK(r.field.max_abs() == 0.0);
}

TEST_CASE("maximum principle") {
  SolveOptions o;
  o.h = 1.0 / 32;
  o.bc = [](const Vec& X) { return std::cos(5 * X(0)) * X(1); };
  SolveResult r = solve_dirichlet(curved_chart(0.1), o);
  double m = 0;
  for (std::size_t k = 0; k < r.field.values.size(); ++k)
    if (r.field.type[k] == kBoundary) m = std::max(m, std::abs(r.field.values[k]));
  CHECK(r.field.max_abs() <= m * (1 + 1e-9));
}

TEST_CASE("curved chart reproduces a harmonic function pulled back through the flattening") {
  FlattenChart chart = curved_chart(0.1);
  auto U = [](const Vec& x) { return x(0) * x(0) - x(1) * x(1) + 0.7 * x(1) + 0.3 * x(0); };
  PointFn V = [&](const Vec& Y) { return U(chart.flatten(Y)); };
  std::vector<double> err;
  for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    SolveOptions o;
    o.h = h;
    o.bc = V;
    o.flat_bc = V;
    err.push_back(max_node_error(solve_dirichlet(chart, o).field, V));
  }
  MESSAGE("errors " << err[0] << " " << err[1] << " " << err[2]);
  CHECK(err[1] < err[0]);
  CHECK(err[2] < err[1]);
  CHECK(std::log2(err[1] / err[2]) > 1.2);
  CHECK(err[2] < 2e-3);
}

TEST_CASE("serial and parallel solves agree bitwise") {
  SolveOptions o;
  o.h = 1.0 / 32;
  o.bc = [](const Vec& X) { return X(1) * (1 + X(0)); };
  FlattenChart chart = curved_chart(0.1);
  o.exec = kernels::Exec::serial;
  SolveResult a = solve_dirichlet(chart, o);
  o.exec = kernels::Exec::parallel;
  SolveResult b = solve_dirichlet(chart, o);
  CHECK(a.field.values == b.field.values);
  CHECK(a.stats.iterations == b.stats.iterations);
}

TEST_CASE("odd extension solves the reflected problem") {
  FlattenChart chart = curved_chart(0.1);
  SolveOptions o;
  o.h = 1.0 / 32;
  o.bc = [](const Vec& X) { return X(1) + 2 * X(0) * X(1); };
  SolveResult r = solve_dirichlet(chart, o);
  DiscreteField e = extend_odd(r.field);
  CHECK(e.grid.full);
  CHECK(interface_residual(e, chart) < 1e-7);
  Vec p(2), q(2);
  p << 0.3, 0.2;
  q << 0.3, -0.2;
  CHECK(e.value(q) == doctest::Approx(-e.value(p)).epsilon(1e-14));
  CHECK(r.field.value(q) == doctest::Approx(-r.field.value(p)).epsilon(1e-14));

  SolveOptions bad = o;
  bad.flat_bc = [](const Vec&) { return 1.0; };
  CHECK_THROWS_AS(extend_odd(solve_dirichlet(chart, bad).field), ContractError);
}

TEST_CASE("field access outside the grid hull throws") {
  SolveOptions o;
  o.h = 1.0 / 16;
  o.bc = [](const Vec& X) { return X(1); };
  SolveResult r = solve_dirichlet(flat_chart(2), o);
  Vec p(2);
  p << 0.9, 0.9;
  CHECK_THROWS_AS(r.field.value(p), DomainError);
  CHECK_FALSE(r.field.in_hull(p));
}

TEST_CASE("Galerkin energy is minimal among functions with the same boundary values") {
  FlattenChart chart = curved_chart(0.1);
  SolveOptions o;
  o.h = 1.0 / 32;
  o.bc = [](const Vec& X) { return X(1) * X(1) - X(0) * X(0) + X(1); };
  SolveResult r = solve_dirichlet(chart, o);
  double e0 = discrete_energy(r.field, chart);
  CHECK(e0 > 0);
  CounterRng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    DiscreteField p = r.field;
    for (std::size_t k = 0; k < p.values.size(); ++k)
      if (p.type[k] == kInterior) p.values[k] += 1e-2 * rng.normal();
    CHECK(discrete_energy(p, chart) > e0);
  }
}

TEST_CASE("energy and L2 mass of the linear profile") {
  GridSpec g = GridSpec::half_ball(2, 1.0, 1.0 / 64);
  DiscreteField t = exact_field(Polynomial::coordinate(2, 1), g);
  CHECK(t.odd_reflect);
  // Q1 reproduces t; energy is the area of the active cells
  CHECK(discrete_energy(t, flat_chart(2)) == doctest::Approx(M_PI / 2).epsilon(0.05));
  for (double r : {0.25, 0.5, 0.9}) CHECK(l2_ball(t, r, true) == doctest::Approx(M_PI * std::pow(r, 4) / 8).epsilon(1e-10));
  SupProfile sp = sup_profile(t, {0.25, 0.5, 1.0});
  CHECK(sp.sup[0] == doctest::Approx(0.25));
  CHECK(sp.sup[2] == doctest::Approx(1.0 - 1.0 / 64));  // (0, 1) has no active cell
  CHECK(sp.annulus[1] == doctest::Approx(0.5));
  CHECK_THROWS_AS(exact_field(Polynomial::coordinate(2, 0) * Polynomial::coordinate(2, 0), g), DomainError);
}
