#include "doctest.h"

#include "dini/geometry.hpp"
#include "dini/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace dini;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Vec random_ball(CounterRng& rng, int n, double radius) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.normal();
  return v * (radius * std::pow(rng.uniform(), 1.0 / n) / v.norm());
}

GraphDomain curved(int d, double c0 = 0.2) { return GraphDomain::from(GraphFunction::power(d, c0, 0.5)); }

}  // namespace

TEST_CASE("build_frame examples") {
  OrthoFrame f = build_frame(Vec::Zero(2));
  CHECK((f.O() - Mat::Identity(3, 3)).norm() == 0.0);
  OrthoFrame g = build_frame(vec({1.0}));
  double s = 1 / std::sqrt(2.0);
  CHECK(g.c == doctest::Approx(s).epsilon(1e-15));
  CHECK(g.Ot(0, 0) == doctest::Approx(s).epsilon(1e-15));
  CHECK(g.b(0) == doctest::Approx(s).epsilon(1e-15));
  CHECK(g.dvec(0) == doctest::Approx(-s).epsilon(1e-15));
  Mat rot(2, 2);
  rot << s, s, -s, s;
  CHECK((g.O() - rot).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(frame_residuals(g).max() <= 1e-15);
  CHECK(!g.steep);
  CHECK(build_frame(vec({1.5, 0.0})).steep);
  CHECK_THROWS_AS(build_frame(vec({NAN})), DomainError);
}

TEST_CASE("frame invariants on random gradients") {
  CounterRng rng(7);
  double worst = 0;
  for (int d : {2, 3, 4}) {
    for (int i = 0; i < 1000; ++i) {
      Vec g = random_ball(rng, d - 1, 1.0);
      OrthoFrame f = build_frame(g);
      worst = std::max(worst, frame_residuals(f).max());
      CHECK(f.c > 0);
      CHECK(f.c == doctest::Approx(1 / std::sqrt(1 + g.squaredNorm())));
      CHECK((f.b - f.Ot * g).norm() < 1e-14);
      CHECK((f.dvec + f.c * g).norm() < 1e-15);
      CHECK((f.Ot - f.Ot.transpose()).norm() == 0.0);
      Eigen::SelfAdjointEigenSolver<Mat> es(f.Ot);
      CHECK(es.eigenvalues().minCoeff() >= 1 / std::sqrt(2.0) - 1e-14);
      CHECK(es.eigenvalues().maxCoeff() <= 1 + 1e-14);
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("frame residuals detect perturbations") {
  CHECK(frame_residuals(build_frame(Vec::Zero(3))).max() == 0.0);
  CounterRng rng(11);
  for (int i = 0; i < 50; ++i) {
    OrthoFrame f = build_frame(random_ball(rng, 2, 1.0));
    int k = static_cast<int>(rng.next() % 4);
    if (k == 0) f.Ot(0, 1) += 1e-3;
    if (k == 1) f.b(1) += 1e-3;
    if (k == 2) f.dvec(0) += 1e-3;
    if (k == 3) f.c += 1e-3;
    CHECK(frame_residuals(f).max() >= 5e-4);
  }
}

TEST_CASE("g map and inverse") {
  GraphDomain dom = curved(2);
  FlattenChart chart(dom, vec({0.1}), 0.2);
  CHECK(chart.g(vec({0.1})).norm() == 0.0);
  CHECK((chart.g_inverse(Vec::Zero(1)) - vec({0.1})).norm() < 1e-15);
  FlattenChart flat(GraphDomain::from(GraphFunction::flat(3)), vec({0.2, -0.1}));
  CHECK((flat.g(vec({0.5, 0.5})) - vec({0.3, 0.6})).norm() < 1e-15);
  // phi(x) = x, x0 = 0: g is multiplication by sqrt 2
  FlattenChart lin(GraphDomain::from(GraphFunction::combined(2, 0, 0.5, vec({1.0}), 0)), vec({0.0}));
  CHECK(lin.g(vec({0.3}))(0) == doctest::Approx(0.3 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(lin.g_inverse(vec({0.3}))(0) == doctest::Approx(0.3 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(lin.tilde_phi(vec({0.25})) == 0.0);
  // round trip on |x|^{1.5} at x0 = 0.1
  FlattenChart pw(GraphDomain::from(GraphFunction::power(2, 1.0, 0.5)), vec({0.1}), 0.1);
  CounterRng rng(3);
  for (int i = 0; i < 100; ++i) {
    Vec y = random_ball(rng, 1, 0.1);
    Vec x = pw.g_inverse(y);
    CHECK((pw.g(x) - y).norm() <= 1e-12);
    // Jacobian of the inverse against finite differences
    double h = 1e-6;
    double fd = (pw.g_inverse(y + vec({h}))(0) - pw.g_inverse(y - vec({h}))(0)) / (2 * h);
    CHECK(fd == doctest::Approx(1.0 / pw.Dg(x)(0, 0)).epsilon(1e-6));
  }
  // Dg(x0) = Ot^{-1}
  FlattenChart c3(curved(3), vec({0.2, 0.1}), 0.2);
  CHECK((c3.Dg(c3.x0()) - c3.frame().Ot.inverse()).cwiseAbs().maxCoeff() < 1e-14);
  Mat fd(2, 2);
  for (int j = 0; j < 2; ++j) {
    Vec e = Vec::Zero(2);
    e(j) = 1e-6;
    fd.col(j) = (c3.g(c3.x0() + e) - c3.g(c3.x0() - e)) / 2e-6;
  }
  CHECK((fd - c3.frame().Ot.inverse()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("tilde phi") {
  FlattenChart chart(curved(2, 1.0), vec({0.1}), 0.1);
  double v;
  Vec g;
  chart.tilde_phi_both(Vec::Zero(1), v, g);
  CHECK(v == 0.0);
  CHECK(g.norm() < 1e-15);
  FlattenChart flat(GraphDomain::from(GraphFunction::flat(2)), vec({0.3}));
  CHECK(flat.tilde_phi(vec({0.2})) == 0.0);
  // gradient against finite differences
  for (double y : {-0.05, 0.02, 0.07}) {
    double h = 1e-6;
    double fd = (chart.tilde_phi(vec({y + h})) - chart.tilde_phi(vec({y - h}))) / (2 * h);
    CHECK(chart.tilde_phi_grad(vec({y}))(0) == doctest::Approx(fd).epsilon(1e-7));
  }
  // modulus of continuity of grad phi_tilde: one constant over all sampled pairs
  CounterRng rng(5);
  const Modulus& th = chart.domain().theta;
  double K = 0;
  for (int i = 0; i < 500; ++i) {
    Vec a = random_ball(rng, 1, 0.1), b = random_ball(rng, 1, 0.1);
    if ((a - b).norm() < 1e-9) continue;
    K = std::max(K, (chart.tilde_phi_grad(a) - chart.tilde_phi_grad(b)).norm() / th(2 * (a - b).norm()));
  }
  CHECK(K < 2.0);
  MESSAGE("fitted constant for grad phi_tilde modulus: " << K);
}

TEST_CASE("gradient modulus of the power family") {
  CounterRng rng(9);
  for (int d : {2, 3, 4}) {
    GraphFunction f = GraphFunction::combined(d, 0.3, 0.5, Vec::Constant(d - 1, 0.1), 0.05);
    Modulus th = f.gradient_modulus();
    for (int i = 0; i < 2000; ++i) {
      Vec a = random_ball(rng, d - 1, 0.5), b = random_ball(rng, d - 1, 0.5);
      CHECK((f.gradient(a) - f.gradient(b)).norm() <= th((a - b).norm()) * (1 + 1e-12));
    }
  }
}

TEST_CASE("flatten and unflatten") {
  FlattenChart flat(GraphDomain::from(GraphFunction::flat(2)), vec({0.0}));
  CHECK((flat.flatten(vec({0.3, 0.2})) - vec({0.3, 0.2})).norm() == 0.0);
  FlattenChart quad(GraphDomain::from(GraphFunction::combined(2, 0, 0.5, vec({0.0}), 1.0)), vec({0.0}), 1.0);
  Vec X = quad.flatten(vec({0.1, 0.05}));
  CHECK(X(0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(X(1) == doctest::Approx(0.06).epsilon(1e-14));
  CounterRng rng(13);
  for (int d : {2, 3}) {
    FlattenChart c(curved(d), Vec::Constant(d - 1, 0.1), 0.25);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
      Vec p = random_ball(rng, d, 0.25);
      worst = std::max(worst, (c.unflatten(c.flatten(p)) - p).norm());
    }
    CHECK(worst <= 1e-12);
  }
  CHECK_THROWS_AS(quad.flatten(vec({2.0, 0.0})), DomainError);
}

TEST_CASE("graph mapping identity") {
  CounterRng rng(17);
  for (int d : {2, 3}) {
    FlattenChart c(curved(d), Vec::Constant(d - 1, 0.05), 0.5);
    for (int i = 0; i < 500; ++i) {
      Vec x = c.x0() + random_ball(rng, d - 1, 0.3);
      Vec X(d);
      X.head(d - 1) = x;
      X(d - 1) = c.domain().phi.value(x);
      Vec lhs = c.frame().O() * (X - c.base_point());
      Vec y = c.g(x);
      Vec rhs(d);
      rhs.head(d - 1) = y;
      rhs(d - 1) = c.tilde_phi(y);
      CHECK((lhs - rhs).norm() <= 1e-10);
    }
  }
}

TEST_CASE("coefficient matrix") {
  FlattenChart flat(GraphDomain::from(GraphFunction::flat(3)), vec({0.0, 0.0}));
  CHECK((flat.coefficient_matrix(vec({0.1, 0.2})) - Mat::Identity(3, 3)).norm() == 0.0);
  Mat A = coefficient_from_gradient(vec({1.0}), Side::upper);
  Mat expect(2, 2);
  expect << 1, -1, -1, 2;
  CHECK((A - expect).norm() == 0.0);
  CHECK(A.determinant() == doctest::Approx(1.0));
  Mat Al = coefficient_from_gradient(vec({1.0}), Side::lower);
  CHECK(Al(0, 1) == 1.0);
  FlattenChart c(curved(3), vec({0.1, 0.0}), 0.3);
  CHECK((c.coefficient_matrix(Vec::Zero(2)) - Mat::Identity(3, 3)).norm() < 1e-14);
  CounterRng rng(19);
  double worstK = 0;
  for (int i = 0; i < 300; ++i) {
    Vec y = random_ball(rng, 2, 0.3), yp = random_ball(rng, 2, 0.3);
    Mat M = c.coefficient_matrix(y);
    CHECK((M - M.transpose()).norm() == 0.0);
    CHECK(M.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    double G2 = c.tilde_phi_grad(y).squaredNorm();
    Eigen::SelfAdjointEigenSolver<Mat> es(M);
    CHECK(es.eigenvalues().minCoeff() >= 1 / (2 + G2) - 1e-14);
    CHECK(es.eigenvalues().maxCoeff() <= 2 + G2 + 1e-14);
    worstK = std::max(worstK, (M - c.coefficient_matrix(yp)).norm() / c.domain().theta(2 * (y - yp).norm()));
  }
  CHECK(worstK < 5.0);
}

TEST_CASE("psi map") {
  Vec X0 = vec({0.1, -0.2, 0.05});
  Vec Y = vec({0.3, 0.1, -0.2});
  CHECK((psi_map(X0, Y, Modulus::zero()) - (X0 + Y)).norm() == 0.0);
  Modulus th = Modulus::power(0.5, 0.02);
  CounterRng rng(23);
  double r = 0.05;
  Vec center = X0;
  center(2) += 3 * r * theta_hat(th, r);
  for (int i = 0; i < 200; ++i) {
    Vec u(3);
    for (int k = 0; k < 3; ++k) u(k) = rng.normal();
    u *= r / u.norm();
    CHECK(std::abs((psi_map(X0, u, th) - center).norm() - r) <= 1e-10);
  }
  // nested images along a ladder with theta(4 rho) < 1/26
  double rmax = smallness_radius(th);
  std::vector<double> rho;
  for (int k = 0; k < 12; ++k) rho.push_back(std::min(rmax, 0.5) * std::pow(0.7, k));
  for (size_t k = 1; k < rho.size(); ++k) {
    double small = rho[k], big = rho[k - 1];
    double cs = 3 * small * theta_hat(th, small), cb = 3 * big * theta_hat(th, big);
    for (int i = 0; i < 64; ++i) {
      double a = 2 * std::numbers::pi * i / 64;
      Vec u = vec({small * std::cos(a), 0.0, small * std::sin(a)});
      Vec p = psi_map(Vec::Zero(3), u, th);
      CHECK((p - vec({0, 0, cb})).norm() <= big);
    }
    CHECK(std::abs(cb - cs) + small <= big);
  }
}

TEST_CASE("frame continuity") {
  GraphDomain dom = curved(2, 1.0);
  FrameDeviation same = frame_continuity(dom, vec({0.1}), vec({0.1}), 0.05);
  CHECK(same.frame == 0.0);
  CHECK(same.phi_tilde == 0.0);
  GraphDomain flat = GraphDomain::from(GraphFunction::flat(3));
  FrameDeviation fz = frame_continuity(flat, vec({0.1, 0.0}), vec({-0.2, 0.3}), 0.05);
  CHECK(fz.frame == 0.0);
  CHECK(fz.c == 0.0);
  CHECK(fz.phi_tilde == 0.0);
  CounterRng rng(29);
  double K = 0, Kc = 0;
  for (int i = 0; i < 500; ++i) {
    Vec x = random_ball(rng, 1, 0.5), xp = random_ball(rng, 1, 0.5);
    if ((x - xp).norm() < 1e-6) continue;
    FrameDeviation dv = frame_continuity(dom, x, xp, 0.02);
    K = std::max(K, dv.frame / dv.theta);
    Kc = std::max(Kc, dv.c / dv.theta);
  }
  CHECK(K < 3.0);
  CHECK(Kc < 1.0);
  MESSAGE("frame ratio " << K << ", c ratio " << Kc);
}
