#pragma once

#include <functional>
#include <vector>

namespace dini {

struct GaussRule {
  std::vector<double> nodes;  // on [-1, 1]
  std::vector<double> weights;
};

// Gauss-Legendre rule with n points; cached per n.
const GaussRule& gauss_legendre(int n);

using ScalarFn = std::function<double(double)>;

// Adaptive Gauss-Kronrod (7/15) with interval bisection. abs_tol is the target on
// the total error estimate; throws ConvergenceError when max_depth bisections
// do not reach it.
double integrate(const ScalarFn& f, double a, double b, double abs_tol, int max_depth = 48);

// Integral of f(s)/s over (0, b] where f is supplied through its log-argument,
// flog(x) = f(e^x). Uses s = b e^{-x} on panels [0,1], [1,2], [2,4], ... until a
// panel contributes less than abs_tol/10. Throws DivergenceError when the
// panels keep contributing out to x ~ 1e15.
double integrate_dlog_from_zero(const ScalarFn& flog, double b, double abs_tol);

// Fixed Gauss-Legendre quadrature of f over [a, b] with n nodes.
double gauss_fixed(const ScalarFn& f, double a, double b, int n);

}  // namespace dini
