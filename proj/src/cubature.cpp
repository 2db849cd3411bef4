#include "dini/cubature.hpp"

#include "dini/quadrature.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

namespace dini {

namespace {

Cubature circle_rule(bool upper) {
  Cubature c;
  const GaussRule& g = gauss_legendre(64);
  int panels = upper ? 4 : 8;
  double width = std::numbers::pi / 4;
  for (int p = 0; p < panels; ++p) {
    for (int i = 0; i < 64; ++i) {
      double a = width * (p + 0.5 * (g.nodes[i] + 1));
      Vec x(2);
      x << std::cos(a), std::sin(a);
      c.points.push_back(x);
      c.weights.push_back(0.5 * width * g.weights[i]);
    }
  }
  return c;
}

Cubature sphere3_rule(bool upper) {
  Cubature c;
  const int nt = 24, nphi = 64;
  const GaussRule& g = gauss_legendre(nt);
  for (int hemi = upper ? 1 : 0; hemi < 2; ++hemi) {
    for (int i = 0; i < nt; ++i) {
      // cos(polar) in (-1, 0) or (0, 1)
      double ct = 0.5 * (g.nodes[i] + 1) - (hemi == 0 ? 1.0 : 0.0);
      double st = std::sqrt(1 - ct * ct);
      for (int k = 0; k < nphi; ++k) {
        double ph = 2 * std::numbers::pi * (k + 0.5) / nphi;
        Vec x(3);
        x << st * std::cos(ph), st * std::sin(ph), ct;
        c.points.push_back(x);
        c.weights.push_back(0.5 * g.weights[i] * 2 * std::numbers::pi / nphi);
      }
    }
  }
  return c;
}

}  // namespace

const Cubature& sphere_rule(int d, bool upper_only) {
  static std::once_flag once;
  static Cubature rules[2][2];
  std::call_once(once, [] {
    rules[0][0] = circle_rule(false);
    rules[0][1] = circle_rule(true);
    rules[1][0] = sphere3_rule(false);
    rules[1][1] = sphere3_rule(true);
  });
  if (d != 2 && d != 3) throw DomainError("sphere_rule: only d = 2, 3");
  return rules[d - 2][upper_only ? 1 : 0];
}

Cubature ball_rule(int d, int radial_nodes, bool upper_only) {
  const Cubature& s = sphere_rule(d, upper_only);
  const GaussRule& g = gauss_legendre(radial_nodes);
  Cubature c;
  for (int i = 0; i < radial_nodes; ++i) {
    double r = 0.5 * (g.nodes[i] + 1);
    double w = 0.5 * g.weights[i] * std::pow(r, d - 1);
    for (std::size_t k = 0; k < s.size(); ++k) {
      c.points.push_back(r * s.points[k]);
      c.weights.push_back(w * s.weights[k]);
    }
  }
  return c;
}

}  // namespace dini
