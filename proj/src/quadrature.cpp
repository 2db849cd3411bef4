#include "dini/quadrature.hpp"

#include "dini/types.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>

namespace dini {

namespace {

GaussRule build_gauss(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double pn = n == 1 ? x : p1;
      double pm = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pm) / (x * x - 1.0);
      double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // refresh derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    rule.nodes[n - 1 - i] = x;
    rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

// Kronrod 15-point extension of the 7-point Gauss rule (QUADPACK qk15 constants).
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, err;
  int depth;
};

Segment gk15(const ScalarFn& f, double a, double b, int depth) {
  double c = 0.5 * (a + b);
  double h = 0.5 * (b - a);
  double fc = f(c);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    double dx = h * kXgk[j];
    double f1 = f(c - dx), f2 = f(c + dx);
    resk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  return {a, b, resk * h, std::abs((resk - resg) * h), depth};
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_gauss(n)).first;
  return it->second;
}

double integrate(const ScalarFn& f, double a, double b, double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  if (b < a) return -integrate(f, b, a, abs_tol, max_depth);
  // global adaptive: always bisect the segment with the largest error estimate
  auto cmp = [](const Segment& x, const Segment& y) { return x.err < y.err; };
  std::priority_queue<Segment, std::vector<Segment>, decltype(cmp)> heap(cmp);
  Segment first = gk15(f, a, b, 0);
  heap.push(first);
  double total = first.value, err = first.err, mag = std::abs(first.value);
  const int max_segments = 4000;
  while (err > abs_tol && err > 1e-14 * mag) {
    Segment s = heap.top();
    if (s.depth >= max_depth || static_cast<int>(heap.size()) >= max_segments) {
      throw ConvergenceError("adaptive quadrature: no convergence on [" + std::to_string(a) + ", " +
                             std::to_string(b) + "], error estimate " + std::to_string(err));
    }
    heap.pop();
    double m = 0.5 * (s.a + s.b);
    Segment l = gk15(f, s.a, m, s.depth + 1), r = gk15(f, m, s.b, s.depth + 1);
    total += l.value + r.value - s.value;
    err += l.err + r.err - s.err;
    mag += std::abs(l.value) + std::abs(r.value) - std::abs(s.value);
    heap.push(l);
    heap.push(r);
  }
  // re-sum to drop the drift of the incremental updates
  total = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    heap.pop();
  }
  return total;
}

double integrate_dlog_from_zero(const ScalarFn& flog, double b, double abs_tol) {
  double lb = std::log(b);
  auto g = [&](double x) { return flog(lb - x); };
  double total = integrate(g, 0.0, 1.0, abs_tol / 4);
  double lo = 1.0;
  int quiet = 0;
  while (lo < 1e15) {
    double part = integrate(g, lo, 2 * lo, abs_tol / 4);
    total += part;
    lo *= 2;
    if (std::abs(part) < abs_tol / 10) {
      // two quiet panels in a row guard against an integrand that is zero on one panel only
      if (++quiet >= 2) return total;
    } else {
      quiet = 0;
    }
  }
  throw DivergenceError("integral of f(s)/s diverges at s = 0");
}

double gauss_fixed(const ScalarFn& f, double a, double b, int n) {
  const GaussRule& g = gauss_legendre(n);
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += g.weights[i] * f(c + h * g.nodes[i]);
  return s * h;
}

}  // namespace dini
