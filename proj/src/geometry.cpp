#include "dini/geometry.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dini {

GraphFunction GraphFunction::flat(int d) { return combined(d, 0.0, 0.5, Vec::Zero(d - 1), 0.0); }

GraphFunction GraphFunction::power(int d, double c0, double alpha) {
  return combined(d, c0, alpha, Vec::Zero(d - 1), 0.0);
}

GraphFunction GraphFunction::combined(int d, double c0, double alpha, const Vec& linear, double quad) {
  if (d < 2 || d > kMaxDim) throw DomainError("graph function: dimension out of range");
  if (!(alpha > 0 && alpha <= 1)) throw DomainError("graph function: alpha must lie in (0, 1]");
  if (linear.size() != d - 1) throw DomainError("graph function: linear part has wrong size");
  GraphFunction f;
  f.d_ = d;
  f.c0_ = c0;
  f.alpha_ = alpha;
  f.lin_ = linear;
  f.quad_ = quad;
  return f;
}

GraphFunction GraphFunction::hermite_table(std::vector<double> x, std::vector<double> value,
                                           std::vector<double> slope) {
  if (x.size() < 2 || value.size() != x.size() || slope.size() != x.size())
    throw DomainError("hermite table: need >= 2 matching samples");
  for (size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) throw DomainError("hermite table: abscissae must be increasing");
  GraphFunction f;
  f.d_ = 2;
  f.table_ = true;
  f.lin_ = Vec::Zero(1);
  f.tx_ = std::move(x);
  f.tv_ = std::move(value);
  f.ts_ = std::move(slope);
  return f;
}

namespace {

// cubic Hermite on [x_i, x_{i+1}]; linear extrapolation outside the table
void hermite_eval(const std::vector<double>& tx, const std::vector<double>& tv, const std::vector<double>& ts, double x,
                  double& v, double& dv) {
  if (x <= tx.front()) {
    v = tv.front() + ts.front() * (x - tx.front());
    dv = ts.front();
    return;
  }
  if (x >= tx.back()) {
    v = tv.back() + ts.back() * (x - tx.back());
    dv = ts.back();
    return;
  }
  size_t i = static_cast<size_t>(std::upper_bound(tx.begin(), tx.end(), x) - tx.begin()) - 1;
  double h = tx[i + 1] - tx[i];
  double t = (x - tx[i]) / h;
  double h00 = 2 * t * t * t - 3 * t * t + 1, h10 = t * t * t - 2 * t * t + t;
  double h01 = -2 * t * t * t + 3 * t * t, h11 = t * t * t - t * t;
  v = h00 * tv[i] + h10 * h * ts[i] + h01 * tv[i + 1] + h11 * h * ts[i + 1];
  double d00 = 6 * t * t - 6 * t, d10 = 3 * t * t - 4 * t + 1, d01 = -6 * t * t + 6 * t, d11 = 3 * t * t - 2 * t;
  dv = (d00 * tv[i] + d01 * tv[i + 1]) / h + d10 * ts[i] + d11 * ts[i + 1];
}

}  // namespace

double GraphFunction::value(const Vec& x) const {
  if (table_) {
    double v, dv;
    hermite_eval(tx_, tv_, ts_, x(0), v, dv);
    return v;
  }
  double n = x.norm();
  double v = lin_.dot(x) + quad_ * n * n;
  if (c0_ != 0.0) v += c0_ * std::pow(n, 1 + alpha_);
  return v;
}

Vec GraphFunction::gradient(const Vec& x) const {
  if (table_) {
    double v, dv;
    hermite_eval(tx_, tv_, ts_, x(0), v, dv);
    Vec g(1);
    g(0) = dv;
    return g;
  }
  Vec g = lin_ + 2 * quad_ * x;
  double n = x.norm();
  if (c0_ != 0.0 && n > 0) g += c0_ * (1 + alpha_) * std::pow(n, alpha_ - 1) * x;
  return g;
}

Modulus GraphFunction::gradient_modulus() const {
  if (table_) {
    // phi' is piecewise quadratic; its Lipschitz constant bounds the modulus
    double L = 0;
    for (size_t i = 0; i + 1 < tx_.size(); ++i) {
      for (int k = 0; k <= 32; ++k) {
        double xa = tx_[i] + (tx_[i + 1] - tx_[i]) * k / 33.0, xb = tx_[i] + (tx_[i + 1] - tx_[i]) * (k + 1) / 33.0;
        double va, da, vb, db;
        hermite_eval(tx_, tv_, ts_, xa, va, da);
        hermite_eval(tx_, tv_, ts_, xb, vb, db);
        L = std::max(L, std::abs(db - da) / (xb - xa));
      }
    }
    return L == 0 ? Modulus::zero() : Modulus::power(1.0, 1.05 * L);
  }
  // x -> |x|^{alpha-1} x is alpha-Hoelder with constant 2^{1-alpha}; |x|^2 adds 2q r <= 2q r^alpha for r <= 1
  double c = std::abs(c0_) * (1 + alpha_) * std::pow(2.0, 1 - alpha_);
  if (c0_ == 0.0 && quad_ == 0.0) return Modulus::zero();
  if (c0_ == 0.0) return Modulus::power(1.0, 2 * std::abs(quad_));
  return Modulus::power(alpha_, c + 2 * std::abs(quad_));
}

double GraphFunction::lip_bound(double rho) const {
  if (table_) {
    double m = 0;
    for (int k = 0; k <= 400; ++k) {
      double v, dv;
      hermite_eval(tx_, tv_, ts_, -rho + 2 * rho * k / 400.0, v, dv);
      m = std::max(m, std::abs(dv));
    }
    return m;
  }
  return std::abs(c0_) * (1 + alpha_) * std::pow(rho, alpha_) + lin_.norm() + 2 * std::abs(quad_) * rho;
}

std::string GraphFunction::describe() const {
  std::ostringstream os;
  if (table_) {
    os << "hermite_table(" << tx_.size() << " samples)";
    return os.str();
  }
  os << "phi(x) = " << c0_ << "|x|^" << 1 + alpha_;
  if (lin_.norm() > 0) os << " + a.x (|a|=" << lin_.norm() << ")";
  if (quad_ != 0) os << " + " << quad_ << "|x|^2";
  return os.str();
}

GraphDomain GraphDomain::from(const GraphFunction& f, double rho) {
  return GraphDomain{f, f.gradient_modulus(), f.lip_bound(rho)};
}

Mat OrthoFrame::O() const {
  int d = dim();
  Mat O(d, d);
  O.topLeftCorner(d - 1, d - 1) = Ot;
  O.topRightCorner(d - 1, 1) = b;
  O.bottomLeftCorner(1, d - 1) = dvec.transpose();
  O(d - 1, d - 1) = c;
  return O;
}

OrthoFrame build_frame(const Vec& grad) {
  if (!grad.allFinite()) throw DomainError("build_frame: non-finite gradient");
  int n = static_cast<int>(grad.size());
  if (n < 1 || n + 1 > kMaxDim) throw DomainError("build_frame: dimension out of range");
  double gn2 = grad.squaredNorm();
  OrthoFrame f;
  f.c = 1.0 / std::sqrt(1.0 + gn2);
  // (I + g g^T)^{-1/2} = I + (c - 1) g g^T / |g|^2
  f.Ot = Mat::Identity(n, n);
  if (gn2 > 0) f.Ot += (f.c - 1.0) / gn2 * grad * grad.transpose();
  f.Ot = (0.5 * (f.Ot + f.Ot.transpose())).eval();
  f.b = f.c * grad;
  f.dvec = -f.c * grad;
  f.steep = gn2 > 1.0;
  return f;
}

double FrameResiduals::max() const { return std::max({orthogonality, rows, cross, last}); }

FrameResiduals frame_residuals(const OrthoFrame& f) {
  int n = f.dim() - 1;
  FrameResiduals r;
  Mat O = f.O();
  r.orthogonality = (O * O.transpose() - Mat::Identity(n + 1, n + 1)).cwiseAbs().maxCoeff();
  r.rows = (f.Ot * f.Ot.transpose() + f.b * f.b.transpose() - Mat::Identity(n, n)).cwiseAbs().maxCoeff();
  r.cross = (f.Ot * f.dvec + f.c * f.b).cwiseAbs().maxCoeff();
  r.last = std::abs(f.dvec.squaredNorm() + f.c * f.c - 1.0);
  return r;
}

double smallness_radius(const Modulus& theta) {
  const double bound = 1.0 / 26;
  if (theta.is_zero() || theta(4e6) < bound) return std::numeric_limits<double>::infinity();
  double lo = 1e-300, hi = 1e6;
  if (!(theta(4 * lo) < bound)) return 0.0;
  for (int it = 0; it < 200; ++it) {
    double mid = std::sqrt(lo * hi);
    (theta(4 * mid) < bound ? lo : hi) = mid;
    if (hi / lo < 1 + 1e-14) break;
  }
  return lo;
}

FlattenChart::FlattenChart(GraphDomain domain, const Vec& x0, double radius) : domain_(std::move(domain)), x0_(x0) {
  if (x0.size() != domain_.dim() - 1) throw DomainError("chart base point has wrong dimension");
  phi0_ = domain_.phi.value(x0_);
  grad0_ = domain_.phi.gradient(x0_);
  frame_ = build_frame(grad0_);
  radius_ = radius > 0 ? radius : smallness_radius(domain_.theta);
  if (!(radius_ > 0)) throw DomainError("chart radius is zero: theta(4r) < 1/26 fails for every r");
  flat_ = domain_.phi.is_affine();
}

Vec FlattenChart::base_point() const {
  Vec X(dim());
  X.head(dim() - 1) = x0_;
  X(dim() - 1) = phi0_;
  return X;
}

Vec FlattenChart::g(const Vec& x) const {
  return frame_.Ot * (x - x0_) + (domain_.phi.value(x) - phi0_) * frame_.b;
}

Mat FlattenChart::Dg(const Vec& x) const {
  return frame_.Ot + frame_.b * domain_.phi.gradient(x).transpose();
}

Vec FlattenChart::g_inverse(const Vec& y) const {
  if (flat_ && grad0_.squaredNorm() == 0) return x0_ + y;
  if (flat_) return x0_ + Dg(x0_).partialPivLu().solve(y);
  Vec x = x0_ + frame_.Ot.transpose() * y;
  for (int it = 0; it < newton_max_iter; ++it) {
    Vec res = g(x) - y;
    if (res.norm() <= newton_tol) {
      // one more step is nearly free and takes the residual to rounding level
      x -= Dg(x).partialPivLu().solve(res);
      return x;
    }
    x -= Dg(x).partialPivLu().solve(res);
    if (!x.allFinite()) break;
  }
  throw ConvergenceError("g_inverse: Newton iteration did not converge");
}

void FlattenChart::check_in_chart(const Vec& y) const {
  if (y.norm() > radius_ * (1 + 1e-12)) throw DomainError("point outside the chart neighborhood");
}

void FlattenChart::tilde_phi_both(const Vec& y, double& value, Vec& grad) const {
  if (flat_) {
    value = 0.0;
    grad = Vec::Zero(dim() - 1);
    return;
  }
  Vec x = g_inverse(y);
  value = frame_.c * (domain_.phi.value(x) - phi0_ - grad0_.dot(x - x0_));
  Vec rhs = frame_.c * (domain_.phi.gradient(x) - grad0_);
  grad = Dg(x).transpose().partialPivLu().solve(rhs);
}

double FlattenChart::tilde_phi(const Vec& y) const {
  double v;
  Vec g;
  tilde_phi_both(y, v, g);
  return v;
}

Vec FlattenChart::tilde_phi_grad(const Vec& y) const {
  double v;
  Vec g;
  tilde_phi_both(y, v, g);
  return g;
}

Vec FlattenChart::flatten(const Vec& p) const {
  int d = dim();
  if (p.size() != d) throw DomainError("flatten: point has wrong dimension");
  Vec y = p.head(d - 1);
  check_in_chart(y);
  Vec Z = p;
  Z(d - 1) += tilde_phi(y);
  return base_point() + frame_.O().transpose() * Z;
}

Vec FlattenChart::unflatten(const Vec& X) const {
  int d = dim();
  if (X.size() != d) throw DomainError("unflatten: point has wrong dimension");
  Vec Z = frame_.O() * (X - base_point());
  Vec y = Z.head(d - 1);
  check_in_chart(y);
  Z(d - 1) -= tilde_phi(y);
  return Z;
}

Mat coefficient_from_gradient(const Vec& G, Side side) {
  int n = static_cast<int>(G.size());
  Vec g = side == Side::upper ? Vec(G) : Vec(-G);
  Mat A = Mat::Identity(n + 1, n + 1);
  A.topRightCorner(n, 1) = -g;
  A.bottomLeftCorner(1, n) = -g.transpose();
  A(n, n) = 1 + g.squaredNorm();
  return A;
}

Mat FlattenChart::coefficient_matrix(const Vec& y, Side side) const {
  check_in_chart(y);
  return coefficient_from_gradient(tilde_phi_grad(y), side);
}

Vec psi_map(const Vec& X0, const Vec& Y, const Modulus& theta) {
  if (X0.size() != Y.size()) throw DomainError("psi_map: dimension mismatch");
  Vec out = X0 + Y;
  double r = Y.norm();
  if (r > 0) out(Y.size() - 1) += 3 * r * theta_hat(theta, r);
  return out;
}

FrameDeviation frame_continuity(const GraphDomain& dom, const Vec& x, const Vec& xp, double rho) {
  FrameDeviation dev;
  double inf = std::numeric_limits<double>::infinity();
  FlattenChart a(dom, x, inf), b(dom, xp, inf);
  dev.frame = (a.frame().O() - b.frame().O()).norm();
  dev.c = std::abs(a.frame().c - b.frame().c);
  dev.theta = dom.theta((x - xp).norm());
  int n = dom.dim() - 1;
  std::vector<Vec> ys;
  const int m = 16;
  if (n == 1) {
    for (int i = -m; i <= m; ++i) ys.push_back(Vec::Constant(1, rho * i / m));
  } else {
    // a lattice on the first two coordinates, other coordinates zero
    for (int i = -m / 2; i <= m / 2; ++i) {
      for (int j = -m / 2; j <= m / 2; ++j) {
        Vec y = Vec::Zero(n);
        y(0) = rho * i / (m / 2);
        y(1) = rho * j / (m / 2);
        if (y.norm() <= rho) ys.push_back(y);
      }
    }
  }
  for (const Vec& y : ys) dev.phi_tilde = std::max(dev.phi_tilde, std::abs(a.tilde_phi(y) - b.tilde_phi(y)));
  return dev;
}

}  // namespace dini
