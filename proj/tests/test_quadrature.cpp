#include "doctest.h"

#include "dini/quadrature.hpp"
#include "dini/types.hpp"

#include <cmath>
#include <numbers>

using namespace dini;

TEST_CASE("gauss-legendre integrates polynomials of degree 2n-1 exactly") {
  for (int n : {1, 2, 5, 8, 16}) {
    const GaussRule& g = gauss_legendre(n);
    double wsum = 0;
    for (double w : g.weights) wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    int deg = 2 * n - 1;
    double s = 0;
    for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], deg - 1);
    double exact = (deg - 1) % 2 == 0 ? 2.0 / deg : 0.0;
    CHECK(s == doctest::Approx(exact).epsilon(1e-13));
  }
}

TEST_CASE("adaptive quadrature on smooth and kinked integrands") {
  CHECK(integrate([](double x) { return std::sin(x); }, 0, std::numbers::pi, 1e-13) ==
        doctest::Approx(2.0).epsilon(1e-13));
  CHECK(integrate([](double x) { return std::abs(x - 0.3); }, 0, 1, 1e-13) ==
        doctest::Approx(0.5 * 0.09 + 0.5 * 0.49).epsilon(1e-12));
  CHECK(integrate([](double x) { return std::sqrt(x); }, 0, 1, 1e-12) == doctest::Approx(2.0 / 3).epsilon(1e-11));
}

TEST_CASE("log-substituted integral from zero") {
  // f(s) = s^0.5: int_0^b s^{-1/2} ds = 2 sqrt(b)
  double v = integrate_dlog_from_zero([](double x) { return std::exp(0.5 * x); }, 0.25, 1e-13);
  CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  // constant f: divergent
  CHECK_THROWS_AS(integrate_dlog_from_zero([](double) { return 1.0; }, 1.0, 1e-10), DivergenceError);
}
