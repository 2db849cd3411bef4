#include "dini/solver.hpp"

#include "dini/cubature.hpp"

#include <algorithm>
#include <cmath>

namespace dini {

namespace {

int ipow(int b, int e) {
  int r = 1;
  while (e-- > 0) r *= b;
  return r;
}

const double kGauss[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};

bool cell_active(const GridSpec& g, const Index& c) {
  double R2 = g.R() * g.R() * (1 + 1e-12);
  for (int q = 0; q < (1 << g.d); ++q) {
    Index j = c;
    for (int i = 0; i < g.d; ++i) j[i] += (q >> i) & 1;
    if (!g.contains(j)) return false;
    double s = 0;
    for (int i = 0; i < g.d; ++i) s += (j[i] * g.h) * (j[i] * g.h);
    if (s > R2) return false;
  }
  return true;
}

std::vector<std::uint8_t> node_types(const GridSpec& g) {
  std::vector<std::uint8_t> t(g.nodes(), kOutside);
  for (std::size_t k = 0; k < t.size(); ++k) {
    Index j = g.unindex(k);
    int active = 0;
    for (int e = 0; e < (1 << g.d); ++e) {
      Index c = j;
      for (int i = 0; i < g.d; ++i) c[i] -= (e >> i) & 1;
      if (cell_active(g, c)) ++active;
    }
    if (active == 0) continue;
    bool on_flat = !g.full && j[g.d - 1] == 0;
    t[k] = (active == (1 << g.d) && !on_flat) ? kInterior : kBoundary;
  }
  return t;
}

}  // namespace

GridSpec GridSpec::half_ball(int d, double R, double h) {
  if (d < 2 || d > 3) throw DomainError("grid: only d = 2, 3");
  if (!(R > 0) || !(h > 0)) throw DomainError("grid: R and h must be > 0");
  int M = static_cast<int>(std::lround(R / h));
  if (M < 2 || std::abs(M * h - R) > 1e-9 * R) throw DomainError("grid: R must be an integer multiple of h");
  GridSpec g;
  g.d = d;
  g.M = M;
  g.h = R / M;
  return g;
}

std::size_t GridSpec::nodes() const {
  std::size_t n = 1;
  for (int i = 0; i < d; ++i) n *= static_cast<std::size_t>(count(i));
  return n;
}

std::size_t GridSpec::index(const Index& j) const {
  std::size_t k = 0, stride = 1;
  for (int i = 0; i < d; ++i) {
    k += static_cast<std::size_t>(j[i] - lo(i)) * stride;
    stride *= static_cast<std::size_t>(count(i));
  }
  return k;
}

Index GridSpec::unindex(std::size_t k) const {
  Index j{};
  for (int i = 0; i < d; ++i) {
    std::size_t c = static_cast<std::size_t>(count(i));
    j[i] = static_cast<int>(k % c) + lo(i);
    k /= c;
  }
  return j;
}

Vec GridSpec::position(const Index& j) const {
  Vec x(d);
  for (int i = 0; i < d; ++i) x(i) = j[i] * h;
  return x;
}

bool GridSpec::contains(const Index& j) const {
  for (int i = 0; i < d; ++i)
    if (j[i] < lo(i) || j[i] > M) return false;
  return true;
}

DiscreteField::DiscreteField(GridSpec g) : grid(g), values(g.nodes(), 0.0), type(node_types(g)) {}

bool DiscreteField::locate(const Vec& Y, Index& cell, Vec& frac) const {
  frac.resize(grid.d);
  for (int i = 0; i < grid.d; ++i) {
    double t = Y(i) / grid.h;
    int c = static_cast<int>(std::floor(t));
    c = std::clamp(c, grid.lo(i), grid.M - 1);
    double f = t - c;
    if (f < -1e-9 || f > 1 + 1e-9) return false;
    cell[i] = c;
    frac(i) = std::clamp(f, 0.0, 1.0);
  }
  for (int q = 0; q < (1 << grid.d); ++q) {
    Index j = cell;
    for (int i = 0; i < grid.d; ++i) j[i] += (q >> i) & 1;
    if (type[grid.index(j)] == kOutside) return false;
  }
  return true;
}

double DiscreteField::interpolate(const Vec& Y) const {
  Index cell{};
  Vec f;
  if (!locate(Y, cell, f)) throw DomainError("field evaluation outside the grid hull");
  double s = 0;
  for (int q = 0; q < (1 << grid.d); ++q) {
    Index j = cell;
    double w = 1;
    for (int i = 0; i < grid.d; ++i) {
      int b = (q >> i) & 1;
      j[i] += b;
      w *= b ? f(i) : 1 - f(i);
    }
    if (w != 0.0) s += w * values[grid.index(j)];
  }
  return s;
}

bool DiscreteField::in_hull(const Vec& Y) const {
  Vec Z = Y;
  if (!grid.full && odd_reflect && Z(grid.d - 1) < 0) Z(grid.d - 1) = -Z(grid.d - 1);
  Index cell{};
  Vec f;
  return locate(Z, cell, f);
}

double DiscreteField::value(const Vec& Y) const {
  if (!grid.full && odd_reflect && Y(grid.d - 1) < 0) {
    Vec Z = Y;
    Z(grid.d - 1) = -Z(grid.d - 1);
    return -interpolate(Z);
  }
  return interpolate(Y);
}

Vec DiscreteField::gradient(const Vec& Y) const {
  Vec g(grid.d);
  double h = grid.h;
  for (int i = 0; i < grid.d; ++i) {
    Vec a = Y, b = Y;
    a(i) += h;
    b(i) -= h;
    bool ia = in_hull(a), ib = in_hull(b);
    if (ia && ib) {
      g(i) = (value(a) - value(b)) / (2 * h);
    } else if (ia) {
      g(i) = (value(a) - value(Y)) / h;
    } else if (ib) {
      g(i) = (value(Y) - value(b)) / h;
    } else {
      throw DomainError("field gradient outside the grid hull");
    }
  }
  return g;
}

double DiscreteField::level(const Vec& Y) const { return grid.full || odd_reflect ? 1.0 : Y(grid.d - 1); }

double DiscreteField::max_abs() const {
  double m = 0;
  for (std::size_t k = 0; k < values.size(); ++k)
    if (type[k] != kOutside) m = std::max(m, std::abs(values[k]));
  return m;
}

CoefficientGrid::CoefficientGrid(const FlattenChart& chart, const GridSpec& grid) : grid_(grid) {
  if (chart.dim() != grid.d) throw DomainError("coefficient grid: chart dimension mismatch");
  if (chart.radius() < grid.R() * (1 - 1e-12)) throw DomainError("coefficient grid: chart radius smaller than R");
  flat_ = chart.is_flat();
  if (flat_) return;
  int n = grid.d - 1;
  per_axis_ = 4 * grid.M;
  std::size_t total = static_cast<std::size_t>(ipow(per_axis_, n));
  grads_.assign(total, Vec());
  double R2 = grid.R() * grid.R();
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(total); ++k) {
    Vec y(n);
    std::size_t r = static_cast<std::size_t>(k);
    for (int i = 0; i < n; ++i) {
      int a = static_cast<int>(r % per_axis_);
      r /= per_axis_;
      y(i) = (a / 2 - grid.M + kGauss[a % 2]) * grid.h;
    }
    if (y.squaredNorm() <= R2) {
      grads_[k] = chart.tilde_phi_grad(y);
      if (!grads_[k].allFinite()) grads_[k] = Vec();
    }
  }
}

Mat CoefficientGrid::at(const Index& cell, int q, Side side) const {
  int d = grid_.d;
  if (flat_) return Mat::Identity(d, d);
  std::size_t k = 0, stride = 1;
  for (int i = 0; i < d - 1; ++i) {
    int a = 2 * (cell[i] + grid_.M) + ((q >> i) & 1);
    k += static_cast<std::size_t>(a) * stride;
    stride *= static_cast<std::size_t>(per_axis_);
  }
  const Vec& G = grads_[k];
  if (G.size() == 0) throw DomainError("coefficient requested outside the chart or with non-finite gradient");
  return coefficient_from_gradient(G, side);
}

Operator assemble_operator(const CoefficientGrid& coeffs, kernels::Exec ex) {
  const GridSpec& g = coeffs.grid();
  const int d = g.d, nc = 1 << d, w = ipow(3, d);
  Operator op;
  op.grid = g;
  op.type = node_types(g);
  op.coef.assign(g.nodes() * w, 0.0);
  // reference gradients of the corner basis functions at the Gauss points
  std::vector<Vec> G(nc * nc);
  for (int q = 0; q < nc; ++q) {
    for (int a = 0; a < nc; ++a) {
      Vec v(d);
      for (int i = 0; i < d; ++i) {
        double p = ((a >> i) & 1) ? 1.0 : -1.0;
        for (int k = 0; k < d; ++k) {
          if (k == i) continue;
          double xi = kGauss[(q >> k) & 1];
          p *= ((a >> k) & 1) ? xi : 1 - xi;
        }
        v(i) = p;
      }
      G[q * nc + a] = v;
    }
  }
  const double scale = std::pow(g.h, d - 2) / nc;
  auto row = [&](std::size_t k) {
    if (op.type[k] == kOutside) return;
    Index j = g.unindex(k);
    double* out = &op.coef[k * w];
    for (int e = 0; e < nc; ++e) {
      Index c = j;
      for (int i = 0; i < d; ++i) c[i] -= (e >> i) & 1;
      if (!cell_active(g, c)) continue;
      Side side = c[d - 1] < 0 ? Side::lower : Side::upper;
      int a = e;
      for (int q = 0; q < nc; ++q) {
        Mat A = coeffs.at(c, q, side);
        Vec Aga = A * G[q * nc + a];
        for (int b = 0; b < nc; ++b) {
          int off = 0, p3 = 1;
          for (int i = 0; i < d; ++i) {
            off += (((b >> i) & 1) - ((a >> i) & 1) + 1) * p3;
            p3 *= 3;
          }
          out[off] += scale * Aga.dot(G[q * nc + b]);
        }
      }
    }
  };
  std::size_t n = g.nodes();
  if (ex == kernels::Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 256)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n); ++k) row(static_cast<std::size_t>(k));
  } else {
    for (std::size_t k = 0; k < n; ++k) row(k);
  }
  return op;
}

namespace {

// neighbor node of k at stencil offset `off`, or -1
long neighbor(const GridSpec& g, const Index& j, int off) {
  Index n = j;
  for (int i = 0; i < g.d; ++i) {
    n[i] += off % 3 - 1;
    off /= 3;
  }
  if (!g.contains(n)) return -1;
  return static_cast<long>(g.index(n));
}

}  // namespace

double apply_row(const Operator& op, const std::vector<double>& values, std::size_t node) {
  const int w = ipow(3, op.grid.d);
  Index j = op.grid.unindex(node);
  double s = 0;
  for (int off = 0; off < w; ++off) {
    double c = op.coef[node * w + off];
    if (c == 0.0) continue;
    long n = neighbor(op.grid, j, off);
    if (n >= 0) s += c * values[static_cast<std::size_t>(n)];
  }
  return s;
}

namespace {

double max_scaled_residual(const Operator& op, const std::vector<double>& values, double vmax,
                           const std::function<bool(const Index&)>& select) {
  const int w = ipow(3, op.grid.d), center = (w - 1) / 2;
  double worst = 0;
  if (vmax == 0) return 0;
  for (std::size_t k = 0; k < op.type.size(); ++k) {
    if (op.type[k] != kInterior) continue;
    if (!select(op.grid.unindex(k))) continue;
    worst = std::max(worst, std::abs(apply_row(op, values, k)) / (op.coef[k * w + center] * vmax));
  }
  return worst;
}

}  // namespace

SolveResult solve_dirichlet(const FlattenChart& chart, const SolveOptions& opt) {
  if (!opt.bc) throw DomainError("solve_dirichlet: boundary data missing");
  GridSpec g = GridSpec::half_ball(chart.dim(), opt.R, opt.h);
  CoefficientGrid coeffs(chart, g);
  Operator op = assemble_operator(coeffs, opt.exec);
  const int w = ipow(3, g.d), center = (w - 1) / 2;
  SolveResult out;
  DiscreteField& f = out.field;
  f.grid = g;
  f.type = op.type;
  f.values.assign(g.nodes(), 0.0);
  f.odd_reflect = !opt.flat_bc;
  std::vector<std::int32_t> unknown(g.nodes(), -1);
  std::int32_t nu = 0;
  for (std::size_t k = 0; k < g.nodes(); ++k) {
    if (op.type[k] == kInterior) {
      unknown[k] = nu++;
    } else if (op.type[k] == kBoundary) {
      Index j = g.unindex(k);
      Vec X = g.position(j);
      if (j[g.d - 1] == 0)
        f.values[k] = opt.flat_bc ? opt.flat_bc(X) : 0.0;
      else
        f.values[k] = opt.bc(X);
      if (!std::isfinite(f.values[k])) throw DomainError("solve_dirichlet: non-finite boundary data");
    }
  }
  kernels::StencilMatrix A;
  A.width = w;
  A.rows = static_cast<std::size_t>(nu);
  A.nbr.assign(A.rows * w, -1);
  A.coef.assign(A.rows * w, 0.0);
  A.diag.assign(A.rows, 0.0);
  std::vector<double> rhs(A.rows, 0.0);
  for (std::size_t k = 0; k < g.nodes(); ++k) {
    if (unknown[k] < 0) continue;
    std::size_t r = static_cast<std::size_t>(unknown[k]);
    Index j = g.unindex(k);
    for (int off = 0; off < w; ++off) {
      double c = op.coef[k * w + off];
      if (c == 0.0) continue;
      long n = neighbor(g, j, off);
      if (unknown[n] >= 0) {
        A.nbr[r * w + off] = unknown[n];
        A.coef[r * w + off] = c;
      } else {
        rhs[r] -= c * f.values[n];
      }
    }
    A.diag[r] = op.coef[k * w + center];
    if (!(A.diag[r] > 0)) throw DomainError("solve_dirichlet: operator is not elliptic at a node");
  }
  std::vector<double> x(A.rows, 0.0);
  kernels::CgResult cg = kernels::conjugate_gradient(A, rhs, x, opt.cg_tol, opt.max_iter, opt.exec);
  if (!cg.converged) throw ConvergenceError("solve_dirichlet: conjugate gradients did not converge");
  for (std::size_t k = 0; k < g.nodes(); ++k)
    if (unknown[k] >= 0) f.values[k] = x[static_cast<std::size_t>(unknown[k])];
  out.stats.iterations = cg.iterations;
  out.stats.cg_residual = cg.relative_residual;
  out.stats.unknowns = A.rows;
  out.stats.scaled_residual = max_scaled_residual(op, f.values, f.max_abs(), [](const Index&) { return true; });
  return out;
}

DiscreteField exact_field(const Polynomial& p, const GridSpec& grid) {
  if (!p.is_harmonic()) throw DomainError("exact_field: polynomial is not harmonic");
  DiscreteField f(grid);
  bool odd = true;
  for (const auto& [a, c] : p.terms())
    if (a[grid.d - 1] % 2 == 0) odd = false;
  f.odd_reflect = odd && !grid.full;
  for (std::size_t k = 0; k < f.values.size(); ++k)
    if (f.type[k] != kOutside) f.values[k] = p(grid.position(grid.unindex(k)));
  return f;
}

DiscreteField extend_odd(const DiscreteField& f, double trace_tol) {
  if (f.grid.full) throw DomainError("extend_odd: field is already on the full ball");
  const GridSpec& g = f.grid;
  double scale = std::max(f.max_abs(), 1e-300);
  for (std::size_t k = 0; k < g.nodes(); ++k) {
    Index j = g.unindex(k);
    if (j[g.d - 1] == 0 && f.type[k] != kOutside && std::abs(f.values[k]) > trace_tol * scale)
      throw ContractError("extend_odd: field does not vanish on {s = 0}");
  }
  GridSpec full = g;
  full.full = true;
  DiscreteField e(full);
  for (std::size_t k = 0; k < full.nodes(); ++k) {
    if (e.type[k] == kOutside) continue;
    Index j = full.unindex(k);
    int s = j[g.d - 1];
    if (s == 0) continue;
    Index m = j;
    m[g.d - 1] = std::abs(s);
    double v = f.values[g.index(m)];
    e.values[k] = s > 0 ? v : -v;
  }
  return e;
}

double scaled_residual(const DiscreteField& f, const FlattenChart& chart) {
  Operator op = assemble_operator(CoefficientGrid(chart, f.grid));
  return max_scaled_residual(op, f.values, f.max_abs(), [](const Index&) { return true; });
}

double interface_residual(const DiscreteField& ext, const FlattenChart& chart) {
  if (!ext.grid.full) throw DomainError("interface_residual: needs an odd-extended field");
  Operator op = assemble_operator(CoefficientGrid(chart, ext.grid));
  int last = ext.grid.d - 1;
  return max_scaled_residual(op, ext.values, ext.max_abs(), [last](const Index& j) { return j[last] == 0; });
}

double discrete_energy(const DiscreteField& f, const FlattenChart& chart) {
  Operator op = assemble_operator(CoefficientGrid(chart, f.grid));
  double e = 0;
  for (std::size_t k = 0; k < op.type.size(); ++k)
    if (op.type[k] != kOutside) e += f.values[k] * apply_row(op, f.values, k);
  return e;
}

SupProfile sup_profile(const DiscreteField& f, const std::vector<double>& radii) {
  SupProfile p;
  p.radii = radii;
  p.sup.assign(radii.size(), 0.0);
  p.annulus.assign(radii.size(), 0.0);
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    if (f.type[k] == kOutside) continue;
    double r = f.grid.position(f.grid.unindex(k)).norm();
    double v = std::abs(f.values[k]);
    for (std::size_t i = 0; i < radii.size(); ++i) {
      if (r <= radii[i]) {
        p.sup[i] = std::max(p.sup[i], v);
        if (r > radii[i] / 2) p.annulus[i] = std::max(p.annulus[i], v);
      }
    }
  }
  return p;
}

double l2_ball(const Field& f, double r, bool upper_half, int radial_nodes) {
  Cubature c = ball_rule(f.dim(), radial_nodes, upper_half);
  double s = 0, rd = std::pow(r, f.dim());
  for (std::size_t i = 0; i < c.size(); ++i) {
    Vec X = r * c.points[i];
    if (f.level(X) <= 0) continue;
    double v = f.value(X);
    s += c.weights[i] * v * v;
  }
  return s * rd;
}

}  // namespace dini
