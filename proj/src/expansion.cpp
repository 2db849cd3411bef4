#include "dini/expansion.hpp"

#include "dini/cubature.hpp"
#include "dini/frequency.hpp"
#include "dini/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dini {

namespace {

// Directions on S^{d-1} with weights summing to the sphere area.
// d = 2: Gauss panels in angle (8 panels, or 4 on the upper half).
// d = 3: Gauss in cos(polar angle) per hemisphere times a 4n-point azimuthal trapezoid.
Cubature angular_rule(int d, int n, bool upper_only = false) {
  Cubature c;
  const GaussRule& gl = gauss_legendre(n);
  if (d == 2) {
    int panels = upper_only ? 4 : 8;
    double w = M_PI / 4;
    for (int p = 0; p < panels; ++p) {
      for (int i = 0; i < n; ++i) {
        double a = w * (p + 0.5 * (gl.nodes[i] + 1));
        Vec x(2);
        x << std::cos(a), std::sin(a);
        c.points.push_back(x);
        c.weights.push_back(0.5 * w * gl.weights[i]);
      }
    }
    return c;
  }
  if (d != 3) throw DomainError("angular rule: only d = 2, 3");
  int m = 4 * n;
  for (int h = upper_only ? 1 : 0; h < 2; ++h) {
    for (int i = 0; i < n; ++i) {
      double z = 0.5 * (gl.nodes[i] + 1) * (h ? 1 : -1);
      double rho = std::sqrt(std::max(0.0, 1 - z * z));
      for (int j = 0; j < m; ++j) {
        double a = 2 * M_PI * (j + 0.5) / m;
        Vec x(3);
        x << rho * std::cos(a), rho * std::sin(a), z;
        c.points.push_back(x);
        c.weights.push_back(0.5 * gl.weights[i] * 2 * M_PI / m);
      }
    }
  }
  return c;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0 && y[i] > 0)) continue;
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double coef_distance(const Polynomial& a, const Polynomial& b) { return (a - b).coef_max(); }

// sup of |P| over B_1 and over the flat disc, by sampling
double sup_ball(const Polynomial& p, bool flat_disc) {
  int d = p.dim();
  Cubature c = angular_rule(d, 8);
  double m = 0;
  for (int k = 1; k <= 8; ++k) {
    double r = k / 8.0;
    for (const Vec& w : c.points) {
      Vec Y = r * w;
      if (flat_disc) {
        if (std::abs(w(d - 1)) > 1e-12) Y(d - 1) = 0;
      }
      m = std::max(m, std::abs(p(Y)));
    }
  }
  return m;
}

}  // namespace

double cutoff(double rho, double R) {
  if (rho <= R / 2) return 1.0;
  if (rho >= R) return 0.0;
  double x = (rho - R / 2) / (R / 2);
  return 1 - x * x * x * (10 - 15 * x + 6 * x * x);
}

double BlowupField::value(const Vec& Z) const { return u_.value(map(Z)) / norm_; }

Vec BlowupField::gradient(const Vec& Z) const { return (r_ / norm_) * (O_ * u_.gradient(map(Z))); }

Polynomial normalize_tangent(const Polynomial& p) {
  double n = l2_norm_halfball(p);
  if (!(n > 0)) throw DegenerateError("tangent: zero polynomial");
  return p * (1.0 / n);
}

Blowup blowup(const Field& u, const Vec& X0, const Mat& O, double r, int N, const ExpansionOptions& opt) {
  int d = u.dim();
  if (!(r > 0)) throw DomainError("blowup: radius must be > 0");
  Blowup b;
  b.r = r;
  double mass = ball_mass(u, X0, r);
  if (!(mass > 1e-300)) throw DegenerateError("blowup: vanishing L2 mass on the ball");
  b.normalizer = std::sqrt(mass / std::pow(r, d));
  const Cubature& S = sphere_rule(d);
  for (std::size_t i = 0; i < S.size(); ++i) {
    const Vec& w = S.points[i];
    double inside = 0;
    for (auto [a0, a1] : ray_segments(u, X0, O.transpose() * w, r)) inside += (std::pow(a1 / r, d) - std::pow(a0 / r, d)) / d;
    b.setdiff += S.weights[i] * (w(d - 1) > 0 ? 1.0 / d - inside : inside);
  }
  BlowupField T(u, X0, O, r, b.normalizer);
  Cubature B = ball_rule(d, opt.blowup_radial);
  std::vector<Vec> pts;
  std::vector<double> vals, wts;
  for (std::size_t i = 0; i < B.size(); ++i) {
    if (T.level(B.points[i]) <= 0) continue;
    pts.push_back(B.points[i]);
    vals.push_back(T.value(B.points[i]));
    wts.push_back(B.weights[i]);
  }
  if (pts.empty()) throw DegenerateError("blowup: no samples inside the domain");
  ProjectionOptions po;
  po.min_degree = po.max_degree = N;
  po.odd_only = opt.blowup_odd_only;  // the tangent vanishes on the tangent hyperplane
  b.fit = project(pts, vals, wts, po);
  return b;
}

TangentReport tangent_from_blowups(const Field& u, const Vec& X0, const Mat& O, std::vector<double> radii, int N,
                                   const Modulus& mod, const ModulusConfig& cfg, const ExpansionOptions& opt) {
  if (radii.empty()) throw DomainError("tangent: empty ladder");
  std::sort(radii.begin(), radii.end(), std::greater<>());
  int d = u.dim();
  std::size_t n = radii.size();
  std::vector<Blowup> seq(n);
  std::vector<std::exception_ptr> err(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      seq[i] = blowup(u, X0, O, radii[i], N, opt);
    } catch (...) {
      err[i] = std::current_exception();
    }
  }
  for (auto& e : err)
    if (e) std::rethrow_exception(e);
  TangentReport rep;
  rep.N = N;
  rep.radii = radii;
  rep.tangent = normalize_tangent(seq.back().fit.poly);
  Cubature H = ball_rule(d, 16, true);
  for (std::size_t i = 0; i < n; ++i) {
    BlowupField T(u, X0, O, radii[i], seq[i].normalizer);
    double e2 = 0;
    for (std::size_t q = 0; q < H.size(); ++q) {
      const Vec& Z = H.points[q];
      double t = T.level(Z) > 0 ? T.value(Z) : 0.0;
      double diff = t - rep.tangent(Z);
      e2 += H.weights[q] * diff * diff;
    }
    double eps = std::sqrt(e2);
    double tt = mod.is_zero() ? 0.0 : theta_tilde(mod, radii[i], cfg);
    rep.epsilon.push_back(eps);
    rep.theta_tilde.push_back(tt);
    rep.ratio.push_back(tt > 0 ? eps / tt : 0.0);
    rep.setdiff.push_back(seq[i].setdiff);
    double th = mod(radii[i]);
    if (th > 0) rep.setdiff_K = std::max(rep.setdiff_K, seq[i].setdiff / th);
    if (i > 0)
      rep.cauchy.push_back(coef_distance(normalize_tangent(seq[i].fit.poly), normalize_tangent(seq[i - 1].fit.poly)));
  }
  for (double r : rep.ratio) rep.ratio_max = std::max(rep.ratio_max, r);
  rep.slope = fit_slope(rep.radii, rep.epsilon);
  rep.converged = rep.cauchy.empty() || rep.cauchy.back() <= rep.cauchy.front() || rep.cauchy.back() < 1e-8;
  return rep;
}

SourceField SourceField::from_solution(const FlattenChart& chart, std::shared_ptr<const Field> v, double R) {
  int d = chart.dim();
  if (chart.radius() < R) throw DomainError("source: chart radius smaller than R");
  FlattenChart ch = chart;
  VecFn f = [ch, v, d](const Vec& Z) -> Vec {
    Vec y = Z.head(d - 1);
    Mat A = ch.coefficient_matrix(y, Z(d - 1) < 0 ? Side::lower : Side::upper);
    A.diagonal().array() -= 1.0;
    return A * v->gradient(Z);
  };
  return SourceField(d, R, f, chart.is_flat());
}

Vec SourceField::operator()(const Vec& Z) const {
  double rho = Z.norm();
  if (zero_ || rho >= R_) return Vec::Zero(d_);
  return cutoff(rho, R_) * f_(Z);
}

double newtonian_w(const SourceField& src, const Vec& Y, const ExpansionOptions& opt) {
  if (src.is_zero()) return 0.0;
  int d = src.dim();
  double R = src.R();
  if (!(Y.norm() < R / 2)) throw DomainError("newtonian_w: needs |Y| < R/2");
  Cubature dirs = angular_rule(d, opt.w_angular);
  const GaussRule& gl = gauss_legendre(opt.w_radial);
  auto exit_at = [&](const Vec& w, double rad) {
    double b = Y.dot(w);
    return -b + std::sqrt(b * b - Y.squaredNorm() + rad * rad);
  };
  double total = 0;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const Vec& w = dirs.points[i];
    double rmax = exit_at(w, R);
    std::vector<double> br = {0.0, exit_at(w, R / 2), rmax};
    for (int k = 0; k < d; ++k) {
      if (w(k) == 0) continue;
      double c = -Y(k) / w(k);
      if (c > 0 && c < rmax) br.push_back(c);
    }
    std::sort(br.begin(), br.end());
    double ray = 0;
    for (std::size_t p = 0; p + 1 < br.size(); ++p) {
      double a = br[p], b = br[p + 1];
      if (b - a <= 0) continue;
      int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / (R / 8))));
      double len = (b - a) / pieces;
      for (int q = 0; q < pieces; ++q) {
        double lo = a + q * len;
        for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
          double rho = lo + 0.5 * len * (gl.nodes[j] + 1);
          ray += 0.5 * len * gl.weights[j] * w.dot(src(Y + rho * w));
        }
      }
    }
    total += dirs.weights[i] * ray;
  }
  // grad Gamma(Y - Z) dZ = w rho^{1-d} / |S| * rho^{d-1} drho dw
  return total / sphere_area(d);
}

P2Report polynomial_P2(const SourceField& src, int N, const ExpansionOptions& opt) {
  int d = src.dim();
  P2Report rep;
  rep.P2 = Polynomial(d);
  int first = opt.p2_first_shell, last = opt.p2_last_shell;
  double R = src.R();
  for (int k = first; k <= last; ++k) rep.deltas.push_back(R * std::ldexp(1.0, -k));
  if (src.is_zero()) {
    rep.coef_max.assign(rep.deltas.size(), 0.0);
    rep.increments.assign(rep.deltas.size() > 0 ? rep.deltas.size() - 1 : 0, 0.0);
    return rep;
  }
  KernelTaylor kt(d, N);
  const auto& idx = kt.indices();
  std::size_t m = idx.size();
  const Cubature& S = sphere_rule(d);
  const GaussRule& gl = gauss_legendre(opt.p2_radial);
  std::vector<std::vector<double>> shell(last, std::vector<double>(m, 0.0));
#pragma omp parallel for schedule(dynamic, 1)
  for (int j = 0; j < last; ++j) {
    double hi = R * std::ldexp(1.0, -j), lo = hi / 2;
    std::vector<double> c;
    for (std::size_t i = 0; i < S.size(); ++i) {
      const Vec& w = S.points[i];
      for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
        double rho = lo + 0.5 * (hi - lo) * (gl.nodes[q] + 1);
        Vec Z = rho * w;
        Vec F = src(Z);
        kt.coefficients(Z, c);
        double wt = S.weights[i] * 0.5 * (hi - lo) * gl.weights[q] * std::pow(rho, d - 1);
        for (std::size_t b = 0; b < m; ++b) {
          double s = 0;
          for (int a = 0; a < d; ++a) s += c[b * d + a] * F(a);
          shell[j][b] += wt * s;
        }
      }
    }
  }
  auto to_poly = [&](const std::vector<double>& v) {
    Polynomial p(d);
    for (std::size_t b = 0; b < m; ++b) p.add_term(idx[b], v[b]);
    return p;
  };
  std::vector<double> acc(m, 0.0);
  std::vector<Polynomial> iter;
  for (int j = 0; j < last; ++j) {
    for (std::size_t b = 0; b < m; ++b) acc[b] += shell[j][b];
    if (j + 1 >= first) iter.push_back(to_poly(acc));
  }
  for (std::size_t i = 0; i < iter.size(); ++i) {
    rep.coef_max.push_back(iter[i].coef_max());
    if (i > 0) rep.increments.push_back(coef_distance(iter[i], iter[i - 1]));
  }
  Polynomial best = iter.back();
  if (rep.increments.size() >= 2) {
    double a = rep.increments[rep.increments.size() - 2], b = rep.increments.back();
    double q = a > 0 ? std::clamp(b / a, 0.0, 0.9) : 0.0;
    best = best + (iter.back() - iter[iter.size() - 2]) * (q / (1 - q));
    rep.cauchy = b <= rep.increments.front();
  }
  // f is odd-compatible (odd tangential part, even normal part), so P2 is odd in s
  Polynomial odd(d);
  double dropped = 0;
  for (const auto& [a, c] : best.terms()) {
    if (a[d - 1] % 2 == 1)
      odd.add_term(a, c);
    else
      dropped = std::max(dropped, std::abs(c));
  }
  double scale = best.coef_max();
  rep.asymmetry = scale > 0 ? dropped / scale : 0.0;
  rep.P2 = odd;
  return rep;
}

P1Report polynomial_P1(const Field& v, const SourceField& src, int N, const ExpansionOptions& opt) {
  int d = v.dim();
  double R4 = src.R() / 4;
  Cubature dirs = angular_rule(d, opt.p1_angular);
  const GaussRule& gl = gauss_legendre(opt.p1_radial);
  std::vector<Vec> pts;
  std::vector<double> wts;
  for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
    double rho = 0.5 * R4 * (gl.nodes[q] + 1);
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      pts.push_back(rho * dirs.points[i]);
      wts.push_back(0.5 * R4 * gl.weights[q] * std::pow(rho, d - 1) * dirs.weights[i]);
    }
  }
  std::vector<double> radii;
  for (int j = 0; j < 4; ++j) radii.push_back(R4 * std::ldexp(1.0, -j));
  std::size_t nfit = pts.size();
  for (double r : radii)
    for (const Vec& w : dirs.points) pts.push_back(r * w);
  std::vector<double> vals(pts.size());
  std::vector<std::exception_ptr> err(pts.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(pts.size()); ++i) {
    try {
      vals[i] = v.value(pts[i]) - newtonian_w(src, pts[i], opt);
    } catch (...) {
      err[i] = std::current_exception();
    }
  }
  for (auto& e : err)
    if (e) std::rethrow_exception(e);
  ProjectionOptions po;
  po.min_degree = 0;
  po.max_degree = N + opt.p1_extra_degree;
  po.odd_only = true;
  std::vector<Vec> fp(pts.begin(), pts.begin() + nfit);
  std::vector<double> fv(vals.begin(), vals.begin() + nfit);
  Projection pr = project(fp, fv, wts, po, R4);
  P1Report rep;
  rep.P1 = pr.poly.up_to_degree(N);
  rep.radii = radii;
  double scale = 0;
  for (std::size_t i = 0; i < nfit; ++i) scale = std::max(scale, std::abs(fv[i]));
  std::size_t k = nfit;
  for (std::size_t j = 0; j < radii.size(); ++j) {
    double m = 0;
    for (std::size_t i = 0; i < dirs.size(); ++i, ++k) m = std::max(m, std::abs(vals[k] - rep.P1(pts[k])));
    rep.residual.push_back(m);
  }
  if (rep.residual.front() <= 1e-12 * std::max(scale, 1e-300)) {
    rep.exponent = std::numeric_limits<double>::infinity();
  } else {
    rep.exponent = fit_slope(rep.radii, rep.residual);
  }
  if (!(rep.exponent >= N + 0.5))
    throw ContractError("polynomial_P1: residual decays with exponent " + std::to_string(rep.exponent) +
                        " < N + 0.5; v - w is not harmonic at this resolution");
  return rep;
}

ExpansionResult assemble_expansion(const Polynomial& P1, const Polynomial& P2, const Field& v, int N,
                                   const std::vector<double>& radii, const Modulus& mod, const ModulusConfig& cfg,
                                   const ExpansionOptions& opt) {
  int d = v.dim();
  ExpansionResult res;
  res.N = N;
  res.P1 = P1;
  res.P2 = P2.is_zero() ? Polynomial(d) : P2;
  Polynomial sum = (P1 + res.P2).up_to_degree(N);
  res.PN = sum.homogeneous_part(N);
  double lower = 0, total = 0;
  for (const auto& [a, c] : sum.terms()) {
    total += c * c;
    if (total_degree(a, d) < N) lower += c * c;
  }
  res.lower_fraction = total > 0 ? lower / total : 0.0;
  if (res.lower_fraction > opt.lower_degree_floor)
    throw ContractError("assemble_expansion: lower-degree part above the noise floor (wrong N or resolution)");
  res.norm = l2_norm_halfball(res.PN);
  if (!(res.norm > 1e-12)) throw DegenerateError("assemble_expansion: leading polynomial is trivial");
  res.boundary_ratio = sup_ball(res.PN, true) / sup_ball(res.PN, false);
  Cubature dirs = angular_rule(d, opt.probe_angular, true);
  Cubature all = angular_rule(d, opt.probe_angular);
  double R = cfg.R;
  for (double r : radii) {
    double m = 0;
    for (const Vec& w : dirs.points) {
      Vec Y = r * w;
      m = std::max(m, std::abs(v.value(Y) - res.PN(Y)));
    }
    double tt = mod.is_zero() || 2 * r >= R ? 0.0 : theta_tilde(mod, r, cfg);
    double bound = std::pow(r, N) * tt;
    res.radii.push_back(r);
    res.psi_max.push_back(m);
    res.psi_bound.push_back(bound);
    if (bound > 0) res.C = std::max(res.C, m / bound);
    double vbar = 0;
    for (const Vec& w : all.points) {
      Vec Y = std::min(4 * r, 0.9 * R) * w;
      vbar = std::max(vbar, std::abs(v.value(Y)));
    }
    res.split_I.push_back(mod(4 * r) * vbar);
    res.split_II.push_back(mod.is_zero() ? 0.0 : dini_integral(mod, 0.0, 4 * r, cfg.quad_tol) * std::pow(r, N));
    double III = 0;
    if (!mod.is_zero() && 4 * r < 2 * R)
      III = integrate([&](double s) { return mod(s) / (s * s); }, 4 * r, 2 * R, 1e-10);
    res.split_III.push_back(std::pow(r, N) * r * III);
  }
  return res;
}

UnflattenReport unflatten_expansion(const FlattenChart& chart, const Field& u, const ExpansionResult& res,
                                    const Modulus& mod, const ModulusConfig& cfg, const ExpansionOptions& opt) {
  int d = chart.dim(), N = res.N;
  UnflattenReport rep;
  Cubature dirs = angular_rule(d, opt.probe_angular, true);
  Mat Ot = chart.frame().O().transpose();
  Vec B = chart.base_point();
  const GaussRule& gl = gauss_legendre(8);
  Polynomial dPN = res.PN.derivative(d - 1);
  double gsup = 0;
  {
    Cubature c = angular_rule(d, 8);
    for (const Vec& w : c.points) gsup = std::max(gsup, res.PN.gradient(w).norm());
  }
  double umax = 0, worst = 0;
  for (double r : res.radii) {
    double pmax = 0, cmax = 0;
    for (const Vec& w : dirs.points) {
      Vec Z = r * w;
      Vec y = Z.head(d - 1);
      double ph = chart.tilde_phi(y);
      double s = Z(d - 1) - ph;
      if (s <= 0) continue;
      Vec X = B + Ot * Z;
      double uval = u.value(X);
      Vec Y = Z;
      Y(d - 1) = s;
      double psi = uval - res.PN(Y);
      double corr = 0;
      for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
        double tau = 0.5 * (gl.nodes[q] + 1);
        Vec P = Y;
        P(d - 1) = s + tau * ph;
        corr += 0.5 * gl.weights[q] * dPN(P);
      }
      corr *= ph;
      double pt = psi - corr;
      worst = std::max(worst, std::abs(pt - (uval - res.PN(Z))));
      umax = std::max(umax, std::abs(uval));
      pmax = std::max(pmax, std::abs(pt));
      cmax = std::max(cmax, std::abs(corr));
    }
    // radii with 2r >= R/2 lie outside the range of theta_tilde and are reported without a bound
    double tt = mod.is_zero() || 4 * r >= cfg.R ? 0.0 : theta_tilde(mod, 2 * r, cfg);
    double bound = std::pow(r, N) * tt;
    if (bound > 0) rep.C = std::max(rep.C, pmax / bound);
    double cb = gsup * std::pow(r, N) * mod(2 * r);
    if (cb > 0) rep.correction_K = std::max(rep.correction_K, cmax / cb);
    rep.radii.push_back(r);
    rep.psi_tilde_max.push_back(pmax);
    rep.correction_max.push_back(cmax);
    rep.correction_bound.push_back(cb);
  }
  rep.consistency = umax > 0 ? worst / umax : 0.0;
  return rep;
}

GradReport grad_error_check(const FlattenChart& chart, const Field& u, const Field& v, const ExpansionResult& res,
                            const Modulus& mod, const ModulusConfig& cfg, const ExpansionOptions& opt) {
  int d = chart.dim(), N = res.N;
  GradReport rep;
  Cubature dirs = angular_rule(d, opt.probe_angular, true);
  Mat O = chart.frame().O();
  Mat Ot = O.transpose();
  Vec B = chart.base_point();
  for (double r : res.radii) {
    double gmax = 0;
    for (const Vec& w : dirs.points) {
      Vec Z = r * w;
      Vec X = B + Ot * Z;
      if (u.level(X) <= 0) continue;
      Vec g = u.gradient(X) - Ot * res.PN.gradient(Z);
      gmax = std::max(gmax, g.norm());
    }
    double bound = mod.is_zero() || 12 * r >= cfg.R ? 0.0 : std::pow(r, N - 1) * theta_ring(mod, 2 * r, cfg);
    if (bound > 0) rep.C = std::max(rep.C, gmax / bound);
    rep.radii.push_back(r);
    rep.grad_max.push_back(gmax);
    rep.bound.push_back(bound);
  }

  // -div(A grad psi) against div g with g = (A - I) grad PN, by central differences
  double eta = opt.pde_step;
  auto A = [&](const Vec& Y) { return chart.coefficient_matrix(Y.head(d - 1)); };
  auto flux = [&](const Vec& Y) -> Vec { return A(Y) * (v.gradient(Y) - res.PN.gradient(Y)); };
  auto gfun = [&](const Vec& Y) -> Vec {
    Mat M = A(Y);
    M.diagonal().array() -= 1.0;
    return M * res.PN.gradient(Y);
  };
  std::vector<double> mism, scale;
  for (double r : res.radii) {
    for (const Vec& w : dirs.points) {
      Vec Y = r * w;
      bool ok = Y(d - 1) > 3 * eta;
      for (int i = 0; i < d - 1; ++i) ok = ok && std::abs(Y(i)) > 3 * eta;
      if (!ok || r + 2 * eta > cfg.R) continue;
      double lhs = 0, rhs = 0;
      try {
        for (int i = 0; i < d; ++i) {
          Vec e = unit_vector(d, i) * eta;
          lhs -= (flux(Y + e)(i) - flux(Y - e)(i)) / (2 * eta);
          rhs += (gfun(Y + e)(i) - gfun(Y - e)(i)) / (2 * eta);
        }
      } catch (const DomainError&) {
        continue;
      }
      mism.push_back(std::abs(lhs - rhs));
      scale.push_back(std::abs(rhs));
    }
  }
  auto median = [](std::vector<double> x) {
    if (x.empty()) return 0.0;
    std::nth_element(x.begin(), x.begin() + x.size() / 2, x.end());
    return x[x.size() / 2];
  };
  rep.pde_mismatch = median(mism);
  rep.pde_scale = median(scale);

  // omega_hat of the rescaled g_r(Y) = g(rY) on the upper unit half ball
  if (!mod.is_zero() && d == 2) {
    const int n = 16;
    for (double r : res.radii) {
      std::vector<Vec> pts, gv;
      for (int i = -n; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
          Vec Y(2);
          Y << double(i) / n, double(j) / n;
          if (Y.norm() > 1) continue;
          pts.push_back(Y);
          gv.push_back(gfun(r * Y));
        }
      }
      std::vector<double> ts = {0.0}, ws = {0.0};
      for (int k = 4; k >= 0; --k) {
        double t = std::ldexp(1.0, -k);
        double m = 0;
        for (std::size_t a = 0; a < pts.size(); ++a)
          for (std::size_t b = a + 1; b < pts.size(); ++b)
            if ((pts[a] - pts[b]).norm() <= t + 1e-12) m = std::max(m, (gv[a] - gv[b]).norm());
        ts.push_back(t);
        ws.push_back(m);
      }
      Modulus om = Modulus::table(ts, ws);
      double I = integrate([&](double x) { return omega_hat(om, std::exp(x), cfg); }, std::log(1e-6), std::log(0.5), 1e-8);
      double b = std::pow(r, N) * (mod(4 * r) + dini_integral(mod, 0.0, 4 * r, cfg.quad_tol) +
                                   sharp_dini_integral(mod, 4 * r, cfg));
      rep.omega_integral.push_back(I);
      rep.omega_bound.push_back(b);
      if (b > 0) rep.omega_K = std::max(rep.omega_K, I / b);
    }
  }
  return rep;
}

UniquenessReport uniqueness_check(const Polynomial& a, const Polynomial& b, double tol) {
  if (a.degree() != b.degree()) throw ContractError("uniqueness: degree mismatch between expansions");
  UniquenessReport rep;
  rep.distance = coef_distance(normalize_tangent(a), normalize_tangent(b));
  rep.pass = rep.distance <= tol;
  return rep;
}

ContinuityReport tangent_continuity(const Field& u, const std::vector<Vec>& centers, const std::vector<Mat>& frames,
                                    const Vec& X0, const Mat& O0, int N, double r,
                                    const std::vector<double>& order_ladder,
                                    const std::vector<Polynomial>& closed_form, const ExpansionOptions& opt) {
  if (centers.size() != frames.size()) throw DomainError("tangent_continuity: one frame per center");
  int d = u.dim();
  auto tangent_at = [&](const Vec& X, const Mat& O) {
    int n = vanishing_order(u, X, order_ladder, Modulus::zero(), ModulusConfig{}).order;
    if (n != N) {
      std::string c;
      for (int i = 0; i < d; ++i) c += (i ? ", " : "") + std::to_string(X(i));
      throw ContractError("tangent_continuity: vanishing order " + std::to_string(n) + " at (" + c + ")");
    }
    Polynomial p = normalize_tangent(blowup(u, X, O, r, N, opt).fit.poly);
    // back to original coordinates: Z' = O Z
    return p.substitute_affine(O, Vec::Zero(d));
  };
  Polynomial P0 = tangent_at(X0, O0);
  ContinuityReport rep;
  for (std::size_t j = 0; j < centers.size(); ++j) {
    Polynomial Pj = tangent_at(centers[j], frames[j]);
    rep.distance.push_back(coef_distance(Pj, P0));
    if (j < closed_form.size()) rep.reference.push_back(coef_distance(Pj, closed_form[j]));
  }
  rep.monotone = true;
  for (std::size_t j = 1; j < rep.distance.size(); ++j)
    if (rep.distance[j] > rep.distance[j - 1] + 1e-12) rep.monotone = false;
  return rep;
}

}  // namespace dini
