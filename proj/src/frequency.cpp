#include "dini/frequency.hpp"

#include "dini/cubature.hpp"
#include "dini/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace dini {

std::vector<std::pair<double, double>> ray_segments(const Field& u, const Vec& X, const Vec& dir, double r,
                                                       int samples) {
  auto inside = [&](double rho) { return u.level(X + rho * dir) > 0; };
  std::vector<std::pair<double, double>> seg;
  bool prev = inside(0.0);
  double start = 0.0, a = 0.0;
  for (int k = 1; k <= samples; ++k) {
    double b = r * k / samples;
    bool cur = inside(b);
    if (cur != prev) {
      double lo = a, hi = b;
      for (int it = 0; it < 60 && hi - lo > 1e-14 * r; ++it) {
        double m = 0.5 * (lo + hi);
        (inside(m) == prev ? lo : hi) = m;
      }
      double t = 0.5 * (lo + hi);
      if (prev) seg.emplace_back(start, t);
      start = t;
      prev = cur;
    }
    a = b;
  }
  if (prev) seg.emplace_back(start, r);
  return seg;
}

double ball_integral(const Field& u, const Vec& X, double r, bool need_grad,
                     const std::function<double(double, const Vec&)>& f, const PolarOptions& opt) {
  int d = u.dim();
  if (X.size() != d) throw DomainError("ball_integral: center has wrong dimension");
  if (!(r > 0)) throw DomainError("ball_integral: radius must be > 0");
  const Cubature& S = sphere_rule(d);
  const GaussRule& gl = gauss_legendre(opt.radial_nodes);
  double total = 0;
  for (std::size_t i = 0; i < S.size(); ++i) {
    const Vec& dir = S.points[i];
    double ray = 0;
    for (auto [a, b] : ray_segments(u, X, dir, r, opt.crossing_samples)) {
      double w = (b - a) / opt.panels;
      for (int p = 0; p < opt.panels; ++p) {
        double lo = a + p * w;
        for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
          double rho = lo + 0.5 * w * (gl.nodes[q] + 1);
          Vec P = X + rho * dir;
          double v;
          Vec g;
          if (need_grad) {
            u.value_and_gradient(P, v, g);
          } else {
            v = u.value(P);
          }
          ray += 0.5 * w * gl.weights[q] * f(v, g) * std::pow(rho, d - 1);
        }
      }
    }
    total += S.weights[i] * ray;
  }
  return total;
}

double ball_mass(const Field& u, const Vec& X, double r, const PolarOptions& opt) {
  return ball_integral(u, X, r, false, [](double v, const Vec&) { return v * v; }, opt);
}

double ball_sup(const Field& u, const Vec& X, double r, const PolarOptions& opt) {
  const Cubature& S = sphere_rule(u.dim());
  const GaussRule& gl = gauss_legendre(opt.radial_nodes);
  double m = 0;
  for (std::size_t i = 0; i < S.size(); ++i) {
    for (std::size_t q = 0; q <= gl.nodes.size(); ++q) {
      double rho = q < gl.nodes.size() ? 0.5 * r * (gl.nodes[q] + 1) : r;
      Vec P = X + rho * S.points[i];
      if (u.level(P) > 0) m = std::max(m, std::abs(u.value(P)));
    }
  }
  return m;
}

AlmgrenParts almgren_parts(const Field& u, const Vec& X, double r, const PolarOptions& opt) {
  int d = u.dim();
  const Cubature& S = sphere_rule(d);
  AlmgrenParts p;
  double sup = 0;
  for (std::size_t i = 0; i < S.size(); ++i) {
    Vec P = X + r * S.points[i];
    if (u.level(P) <= 0) continue;
    double v = u.value(P);
    sup = std::max(sup, std::abs(v));
    p.H += S.weights[i] * v * v;
  }
  double rd1 = std::pow(r, d - 1);
  p.H *= rd1;
  if (!(p.H > 1e-14 * sup * sup * rd1) || sup == 0)
    throw DegenerateError("almgren: boundary integral vanishes on the sphere");
  p.D = ball_integral(u, X, r, true, [](double, const Vec& g) { return g.squaredNorm(); }, opt);
  p.N = r * p.D / p.H;
  return p;
}

double almgren(const Field& u, const Vec& X, double r, const PolarOptions& opt) {
  return almgren_parts(u, X, r, opt).N;
}

double shift_band_constant() { return 3.0 + 3.0 / std::log(2.0); }

ModifiedFrequency modified_frequency(const Field& u, const Vec& X0, double r, const Modulus& mod,
                                     const ModulusConfig& cfg, const PolarOptions& opt) {
  if (!(r > 0)) throw DomainError("modified_frequency: radius must be > 0");
  double th4 = mod(4 * r);
  if (!(th4 < 1.0 / 26)) throw DomainError("modified_frequency: theta(4r) >= 1/26");
  int d = u.dim();
  ModifiedFrequency m;
  m.center = X0;
  if (!mod.is_zero()) m.center(d - 1) += 3 * r * theta_hat(mod, r, cfg.quad_tol);
  m.parts = almgren_parts(u, m.center, r, opt);
  m.standard = m.parts.N;
  m.factor = mod.is_zero() ? 1.0 : std::exp(cfg.freq_constant * dini_integral(mod, 0.0, r, cfg.quad_tol));
  m.value = m.standard * m.factor;
  double band = 1 + shift_band_constant() * th4;
  m.band_lo = m.value / band;
  m.band_hi = m.value * band;
  return m;
}

double FrequencyCurve::max_violation() const {
  double v = 0;
  for (std::size_t i = 1; i < modified.size(); ++i) v = std::max(v, modified[i - 1] - modified[i]);
  return v;
}

FrequencyCurve frequency_curve(const Field& u, const Vec& X0, std::vector<double> radii, const Modulus& mod,
                               const ModulusConfig& cfg, kernels::Exec ex, const PolarOptions& opt) {
  std::sort(radii.begin(), radii.end());
  std::size_t n = radii.size();
  FrequencyCurve c;
  c.center = X0;
  c.radii = radii;
  c.H.assign(n, 0);
  c.D.assign(n, 0);
  c.N.assign(n, 0);
  c.modified.assign(n, 0);
  c.band_lo.assign(n, 0);
  c.band_hi.assign(n, 0);
  std::vector<std::exception_ptr> err(n);
  auto one = [&](std::size_t i) {
    try {
      AlmgrenParts p = almgren_parts(u, X0, radii[i], opt);
      ModifiedFrequency m = mod.is_zero() ? ModifiedFrequency{} : modified_frequency(u, X0, radii[i], mod, cfg, opt);
      if (mod.is_zero()) {
        m.value = p.N;
        m.band_lo = m.band_hi = p.N;
      }
      c.H[i] = p.H;
      c.D[i] = p.D;
      c.N[i] = p.N;
      c.modified[i] = m.value;
      c.band_lo[i] = m.band_lo;
      c.band_hi[i] = m.band_hi;
    } catch (...) {
      err[i] = std::current_exception();
    }
  };
  if (ex == kernels::Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) one(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) one(i);
  }
  for (auto& e : err)
    if (e) std::rethrow_exception(e);
  for (double v : c.modified) c.lambda = std::max(c.lambda, v);
  return c;
}

VanishingOrderReport vanishing_order(const FrequencyCurve& curve, double alpha, double snap) {
  if (curve.radii.empty()) throw DomainError("vanishing_order: empty ladder");
  double m = curve.modified.front();
  double n = std::round(m);
  if (n < 1 || std::abs(m - n) > snap)
    throw IndeterminateError("vanishing_order: frequency curve did not settle near an integer", curve);
  VanishingOrderReport rep;
  rep.order = static_cast<int>(n);
  rep.radii = curve.radii;
  rep.tail = curve.modified;
  rep.alpha = alpha;
  for (std::size_t i = 0; i < curve.radii.size(); ++i) {
    if (curve.modified[i] > n + alpha) break;
    rep.R = curve.radii[i] / 4;
  }
  return rep;
}

VanishingOrderReport vanishing_order(const Field& u, const Vec& X0, const std::vector<double>& radii,
                                     const Modulus& mod, const ModulusConfig& cfg, double alpha, kernels::Exec ex) {
  return vanishing_order(frequency_curve(u, X0, radii, mod, cfg, ex), alpha);
}

DoublingReport doubling_exponents(const Field& u, const Vec& X0, const std::vector<std::pair<double, double>>& pairs,
                                  int order, const Modulus& mod, const ModulusConfig& cfg, const PolarOptions& opt) {
  int d = u.dim();
  DoublingReport rep;
  rep.order = order;
  for (auto [s, r] : pairs) {
    if (!(s > 0 && s < r)) throw DomainError("doubling: need 0 < s < r");
    double ms = ball_mass(u, X0, s, opt), mr = ball_mass(u, X0, r, opt);
    double us = ball_sup(u, X0, s, opt), ur = ball_sup(u, X0, r, opt);
    if (!(ms > 0 && mr > 0 && us > 0 && ur > 0)) throw DegenerateError("doubling: vanishing mass");
    double decay = mod.is_zero() ? 1.0 : std::exp(-cfg.freq_constant * dini_integral(mod, 0.0, 4 * r, cfg.quad_tol));
    double hi;
    if (mod.is_zero()) {
      hi = almgren(u, X0, 2 * r, opt);
    } else {
      hi = modified_frequency(u, X0, 2 * r, mod, cfg, opt).band_hi;
    }
    double lr = std::log(s / r);
    DoublingPair l2{s, r, std::log(ms / mr) / lr, d + 2 * order * decay, d + 2 * hi};
    DoublingPair li{s, r, std::log(us / ur) / lr, order * decay, hi};
    rep.l2.push_back(l2);
    rep.linf.push_back(li);
  }
  return rep;
}

}  // namespace dini
