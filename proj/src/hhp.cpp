#include "dini/hhp.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace dini {

int total_degree(const MultiIndex& a, int d) {
  int s = 0;
  for (int i = 0; i < d; ++i) s += a[i];
  return s;
}

namespace {

void gen_monomials(int d, int n, int pos, MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (pos == d - 1) {
    cur[pos] = n;
    out.push_back(cur);
    return;
  }
  for (int k = n; k >= 0; --k) {
    cur[pos] = k;
    gen_monomials(d, n - k, pos + 1, cur, out);
  }
  cur[pos] = 0;
}

// Y_i^k for all i < d and k <= n
void power_table(const Vec& Y, int d, int n, std::vector<double>& pw) {
  pw.assign(static_cast<size_t>(d) * (n + 1), 1.0);
  for (int i = 0; i < d; ++i)
    for (int k = 1; k <= n; ++k) pw[i * (n + 1) + k] = pw[i * (n + 1) + k - 1] * Y(i);
}

struct Frac {
  long long n = 0, d = 1;
  static Frac make(long long a, long long b) {
    if (b < 0) a = -a, b = -b;
    long long g = std::gcd(a < 0 ? -a : a, b);
    if (g == 0) g = 1;
    return {a / g, b / g};
  }
  Frac operator-(const Frac& o) const { return make(n * o.d - o.n * d, d * o.d); }
  Frac operator*(const Frac& o) const { return make(n * o.n, d * o.d); }
  Frac operator/(const Frac& o) const { return make(n * o.d, d * o.n); }
  bool zero() const { return n == 0; }
};

// Null space of the Laplacian restricted to the given degree-n monomials, with integer coefficients.
std::vector<Polynomial> laplacian_null_space(int d, int n, const std::vector<MultiIndex>& cols) {
  std::vector<MultiIndex> rows_all = n >= 2 ? monomials(d, n - 2) : std::vector<MultiIndex>{};
  std::map<MultiIndex, int> row_of;
  for (const MultiIndex& r : rows_all) row_of.emplace(r, static_cast<int>(row_of.size()));
  size_t m = row_of.size(), nc = cols.size();
  std::vector<std::vector<Frac>> A(m, std::vector<Frac>(nc));
  for (size_t c = 0; c < nc; ++c) {
    for (int i = 0; i < d; ++i) {
      int a = cols[c][i];
      if (a < 2) continue;
      MultiIndex r = cols[c];
      r[i] -= 2;
      A[row_of.at(r)][c] = Frac::make(static_cast<long long>(a) * (a - 1), 1);
    }
  }
  // reduced row echelon form
  std::vector<int> pivot_col;
  size_t row = 0;
  for (size_t c = 0; c < nc && row < m; ++c) {
    size_t p = row;
    while (p < m && A[p][c].zero()) ++p;
    if (p == m) continue;
    std::swap(A[p], A[row]);
    Frac piv = A[row][c];
    for (size_t k = 0; k < nc; ++k) A[row][k] = A[row][k] / piv;
    for (size_t r2 = 0; r2 < m; ++r2) {
      if (r2 == row || A[r2][c].zero()) continue;
      Frac f = A[r2][c];
      for (size_t k = 0; k < nc; ++k) A[r2][k] = A[r2][k] - f * A[row][k];
    }
    pivot_col.push_back(static_cast<int>(c));
    ++row;
  }
  std::vector<bool> is_pivot(nc, false);
  for (int c : pivot_col) is_pivot[c] = true;
  std::vector<Polynomial> out;
  for (size_t f = 0; f < nc; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Frac> x(nc);
    x[f] = Frac::make(1, 1);
    for (size_t r = 0; r < pivot_col.size(); ++r) x[pivot_col[r]] = Frac::make(0, 1) - A[r][f];
    long long l = 1;
    for (const Frac& v : x) l = std::lcm(l, v.d);
    Polynomial p(d);
    for (size_t c = 0; c < nc; ++c)
      if (!x[c].zero()) p.add_term(cols[c], static_cast<double>(x[c].n * (l / x[c].d)));
    out.push_back(p);
  }
  return out;
}

}  // namespace

std::vector<MultiIndex> monomials(int d, int n) {
  std::vector<MultiIndex> out;
  if (n < 0) return out;
  MultiIndex cur{};
  gen_monomials(d, n, 0, cur, out);
  return out;
}

Polynomial Polynomial::monomial(int d, const MultiIndex& a, double coef) {
  Polynomial p(d);
  p.add_term(a, coef);
  return p;
}

Polynomial Polynomial::coordinate(int d, int axis) {
  MultiIndex a{};
  a[axis] = 1;
  return monomial(d, a);
}

Polynomial Polynomial::constant(int d, double c) { return monomial(d, MultiIndex{}, c); }

int Polynomial::degree() const {
  int deg = -1;
  for (const auto& [a, c] : terms_) deg = std::max(deg, total_degree(a, d_));
  return deg;
}

double Polynomial::coefficient(const MultiIndex& a) const {
  auto it = terms_.find(a);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const MultiIndex& a, double coef) {
  if (coef == 0.0) return;
  auto [it, inserted] = terms_.emplace(a, coef);
  if (!inserted) {
    it->second += coef;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::evaluate(const Vec& Y) const {
  if (terms_.empty()) return 0.0;
  int n = std::max(degree(), 0);
  thread_local std::vector<double> pw;
  power_table(Y, d_, n, pw);
  double s = 0.0;
  for (const auto& [a, c] : terms_) {
    double t = c;
    for (int i = 0; i < d_; ++i) t *= pw[i * (n + 1) + a[i]];
    s += t;
  }
  return s;
}

void Polynomial::value_and_gradient(const Vec& Y, double& v, Vec& g) const {
  v = 0.0;
  g = Vec::Zero(d_);
  if (terms_.empty()) return;
  int n = std::max(degree(), 0);
  thread_local std::vector<double> pw;
  power_table(Y, d_, n, pw);
  for (const auto& [a, c] : terms_) {
    double t = c;
    for (int i = 0; i < d_; ++i) t *= pw[i * (n + 1) + a[i]];
    v += t;
    for (int j = 0; j < d_; ++j) {
      if (a[j] == 0) continue;
      double u = c * a[j];
      for (int i = 0; i < d_; ++i) u *= pw[i * (n + 1) + (i == j ? a[i] - 1 : a[i])];
      g(j) += u;
    }
  }
}

Vec Polynomial::gradient(const Vec& Y) const {
  double v;
  Vec g;
  value_and_gradient(Y, v, g);
  return g;
}

Polynomial Polynomial::derivative(int axis) const {
  Polynomial p(d_);
  for (const auto& [a, c] : terms_) {
    if (a[axis] == 0) continue;
    MultiIndex b = a;
    b[axis] -= 1;
    p.add_term(b, c * a[axis]);
  }
  return p;
}

Polynomial Polynomial::laplacian() const {
  Polynomial p(d_);
  for (const auto& [a, c] : terms_) {
    for (int i = 0; i < d_; ++i) {
      if (a[i] < 2) continue;
      MultiIndex b = a;
      b[i] -= 2;
      p.add_term(b, c * a[i] * (a[i] - 1));
    }
  }
  return p;
}

Polynomial Polynomial::homogeneous_part(int n) const {
  Polynomial p(d_);
  for (const auto& [a, c] : terms_)
    if (total_degree(a, d_) == n) p.add_term(a, c);
  return p;
}

Polynomial Polynomial::up_to_degree(int n) const {
  Polynomial p(d_);
  for (const auto& [a, c] : terms_)
    if (total_degree(a, d_) <= n) p.add_term(a, c);
  return p;
}

Polynomial Polynomial::substitute_affine(const Mat& M, const Vec& a) const {
  std::vector<Polynomial> lin(d_, Polynomial(d_));
  for (int i = 0; i < d_; ++i) {
    lin[i] = Polynomial::constant(d_, a(i));
    for (int j = 0; j < d_; ++j) lin[i] = lin[i] + Polynomial::coordinate(d_, j) * M(i, j);
  }
  Polynomial out(d_);
  for (const auto& [e, c] : terms_) {
    Polynomial t = Polynomial::constant(d_, c);
    for (int i = 0; i < d_; ++i)
      for (int k = 0; k < e[i]; ++k) t = t * lin[i];
    out = out + t;
  }
  return out;
}

double Polynomial::coef_max() const {
  double m = 0.0;
  for (const auto& [a, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial p = *this;
  if (p.d_ == 0) p.d_ = o.d_;
  for (const auto& [a, c] : o.terms_) p.add_term(a, c);
  return p;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o * -1.0; }

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial p(std::max(d_, o.d_));
  for (const auto& [a, c] : terms_) {
    for (const auto& [b, e] : o.terms_) {
      MultiIndex s{};
      for (int i = 0; i < kMaxDim; ++i) s[i] = a[i] + b[i];
      p.add_term(s, c * e);
    }
  }
  return p;
}

Polynomial Polynomial::operator*(double s) const {
  Polynomial p(d_);
  if (s == 0.0) return p;
  for (const auto& [a, c] : terms_) p.add_term(a, c * s);
  return p;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    if (!first) os << " + ";
    first = false;
    os << it->second;
    for (int i = 0; i < d_; ++i)
      if (it->first[i] > 0) os << "*Y" << i + 1 << (it->first[i] > 1 ? "^" + std::to_string(it->first[i]) : "");
  }
  return os.str();
}

long harmonic_dimension(int d, int n) {
  auto binom = [](long a, long b) -> long {
    if (b < 0 || a < b) return 0;
    long r = 1;
    for (long i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
  };
  return binom(n + d - 1, d - 1) - binom(n + d - 3, d - 1);
}

std::vector<Polynomial> harmonic_basis(int d, int n) {
  if (d < 2 || d > kMaxDim || n < 0) throw DomainError("harmonic_basis: need 2 <= d <= kMaxDim, n >= 0");
  return laplacian_null_space(d, n, monomials(d, n));
}

std::vector<Polynomial> odd_harmonic_basis(int d, int n) {
  if (d < 2 || d > kMaxDim || n < 0) throw DomainError("odd_harmonic_basis: need 2 <= d <= kMaxDim, n >= 0");
  std::vector<MultiIndex> cols;
  for (const MultiIndex& a : monomials(d, n))
    if (a[d - 1] % 2 == 1) cols.push_back(a);
  return laplacian_null_space(d, n, cols);
}

double ball_moment(const MultiIndex& a, int d) {
  double lg = 0, s = 0;
  for (int i = 0; i < d; ++i) {
    if (a[i] % 2) return 0.0;
    double b = 0.5 * (a[i] + 1);
    lg += std::lgamma(b);
    s += b;
  }
  return 2.0 * std::exp(lg - std::lgamma(s)) / (total_degree(a, d) + d);
}

double halfball_moment(const MultiIndex& a, int d) {
  double lg = 0, s = 0;
  for (int i = 0; i < d; ++i) {
    if (i < d - 1 && a[i] % 2) return 0.0;
    double b = 0.5 * (a[i] + 1);
    lg += std::lgamma(b);
    s += b;
  }
  return std::exp(lg - std::lgamma(s)) / (total_degree(a, d) + d);
}

namespace {

template <class F>
double inner_with(const Polynomial& p, const Polynomial& q, F moment) {
  int d = std::max(p.dim(), q.dim());
  double s = 0;
  for (const auto& [a, c] : p.terms()) {
    for (const auto& [b, e] : q.terms()) {
      MultiIndex m{};
      for (int i = 0; i < kMaxDim; ++i) m[i] = a[i] + b[i];
      s += c * e * moment(m, d);
    }
  }
  return s;
}

}  // namespace

double l2_inner_ball(const Polynomial& p, const Polynomial& q) { return inner_with(p, q, ball_moment); }
double l2_inner_halfball(const Polynomial& p, const Polynomial& q) { return inner_with(p, q, halfball_moment); }

std::vector<Polynomial> orthonormalize_halfball(const std::vector<Polynomial>& basis) {
  std::vector<Polynomial> out;
  for (const Polynomial& p : basis) {
    Polynomial q = p;
    for (int pass = 0; pass < 2; ++pass)
      for (const Polynomial& e : out) q = q - e * l2_inner_halfball(q, e);
    double n = l2_norm_halfball(q);
    if (!(n > 1e-12 * std::max(1.0, l2_norm_halfball(p)))) throw DegenerateError("orthonormalize: dependent basis");
    out.push_back(q * (1.0 / n));
  }
  return out;
}

Projection project(const std::vector<Vec>& points, const std::vector<double>& values, const std::vector<double>& weights,
                   const ProjectionOptions& opt, double scale) {
  if (points.empty() || points.size() != values.size() || (!weights.empty() && weights.size() != values.size()))
    throw DomainError("project: sample arrays have mismatched sizes");
  int d = static_cast<int>(points.front().size());
  std::vector<Polynomial> basis;
  for (int n = opt.min_degree; n <= opt.max_degree; ++n) {
    auto b = opt.odd_only ? odd_harmonic_basis(d, n) : harmonic_basis(d, n);
    basis.insert(basis.end(), b.begin(), b.end());
  }
  size_t m = points.size(), k = basis.size();
  if (m < k) throw DegenerateError("project: fewer samples than basis functions");
  Eigen::MatrixXd V(m, k);
  Eigen::VectorXd rhs(m);
  for (size_t i = 0; i < m; ++i) {
    double w = weights.empty() ? 1.0 : std::sqrt(weights[i]);
    Vec z = points[i] / scale;
    for (size_t j = 0; j < k; ++j) V(i, j) = w * basis[j].evaluate(z);
    rhs(i) = w * values[i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(V);
  Projection out;
  double r0 = std::abs(qr.matrixQR()(0, 0));
  double rk = std::abs(qr.matrixQR()(k - 1, k - 1));
  out.condition = rk > 0 ? r0 / rk : std::numeric_limits<double>::infinity();
  if (qr.rank() < static_cast<Eigen::Index>(k) || out.condition > opt.cond_limit)
    throw DegenerateError("project: sample set is ill-conditioned for the requested degrees");
  Eigen::VectorXd c = qr.solve(rhs);
  Eigen::VectorXd res = V * c - rhs;
  double wsum = 0;
  for (size_t i = 0; i < m; ++i) wsum += weights.empty() ? 1.0 : weights[i];
  out.residual_rms = std::sqrt(res.squaredNorm() / wsum);
  out.data_rms = std::sqrt(rhs.squaredNorm() / wsum);
  Polynomial p(d);
  for (size_t j = 0; j < k; ++j)
    for (const auto& [a, coef] : basis[j].terms()) p.add_term(a, c(j) * coef / std::pow(scale, total_degree(a, d)));
  out.poly = p;
  return out;
}

double sphere_area(int d) { return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d); }

double gamma_kernel(const Vec& xi) {
  int d = static_cast<int>(xi.size());
  double r = xi.norm();
  if (r == 0) throw DomainError("gamma_kernel: singular at 0");
  if (d == 2) return -std::log(r) / (2 * std::numbers::pi);
  return std::pow(r, 2 - d) / ((d - 2) * sphere_area(d));
}

Vec grad_gamma(const Vec& xi) {
  int d = static_cast<int>(xi.size());
  double r = xi.norm();
  if (r == 0) throw DomainError("grad_gamma: singular at 0");
  return -xi / (sphere_area(d) * std::pow(r, d));
}

KernelTaylor::KernelTaylor(int d, int kmax) : d_(d), kmax_(kmax) {
  if (d < 2 || d > kMaxDim || kmax < 0) throw DomainError("KernelTaylor: bad arguments");
  std::map<MultiIndex, int> pos;
  for (int k = 0; k <= kmax; ++k) {
    for (const MultiIndex& b : monomials(d, k)) {
      pos.emplace(b, static_cast<int>(index_.size()));
      index_.push_back(b);
      double f = 1;
      for (int i = 0; i < d; ++i) f *= std::tgamma(b[i] + 1.0);
      inv_factorial_.push_back(1.0 / f);
    }
  }
  der_.resize(index_.size(), std::vector<std::vector<Piece>>(d));
  double w = sphere_area(d);
  for (int i = 0; i < d; ++i) {
    MultiIndex g{};
    g[i] = 1;
    der_[0][i] = {Piece{-1.0 / w, g, -d}};
  }
  for (size_t idx = 1; idx < index_.size(); ++idx) {
    const MultiIndex& b = index_[idx];
    int j = 0;
    while (b[j] == 0) ++j;
    MultiIndex parent = b;
    parent[j] -= 1;
    int pidx = pos.at(parent);
    for (int i = 0; i < d; ++i) {
      std::map<std::pair<MultiIndex, int>, double> acc;
      for (const Piece& p : der_[pidx][i]) {
        // d_j (xi^g |xi|^q) = g_j xi^{g - e_j} |xi|^q + q xi^{g + e_j} |xi|^{q - 2}
        if (p.gamma[j] > 0) {
          MultiIndex g = p.gamma;
          g[j] -= 1;
          acc[{g, p.q}] += p.coef * p.gamma[j];
        }
        MultiIndex g = p.gamma;
        g[j] += 1;
        acc[{g, p.q - 2}] += p.coef * p.q;
      }
      for (const auto& [key, c] : acc)
        if (c != 0.0) der_[idx][i].push_back(Piece{c, key.first, key.second});
    }
  }
}

void KernelTaylor::coefficients(const Vec& Z, std::vector<double>& out) const {
  Vec xi = -Z;
  double r = xi.norm();
  if (r == 0) throw DomainError("KernelTaylor: singular at Z = 0");
  int n = kmax_ + 1;
  std::vector<double> pw;
  power_table(xi, d_, n, pw);
  out.assign(index_.size() * d_, 0.0);
  // |xi|^q for q = -d - 2m
  std::vector<double> rq(kmax_ + 2);
  double r2 = 1.0 / (r * r);
  rq[0] = std::pow(r, -d_);
  for (int m = 1; m < static_cast<int>(rq.size()); ++m) rq[m] = rq[m - 1] * r2;
  for (size_t idx = 0; idx < index_.size(); ++idx) {
    for (int i = 0; i < d_; ++i) {
      double s = 0;
      for (const Piece& p : der_[idx][i]) {
        double t = p.coef * rq[(-d_ - p.q) / 2];
        for (int k = 0; k < d_; ++k) t *= pw[k * (n + 1) + p.gamma[k]];
        s += t;
      }
      out[idx * d_ + i] = s * inv_factorial_[idx];
    }
  }
}

Vec KernelTaylor::term(int k, const Vec& Y, const Vec& Z) const {
  if (k < 0 || k > kmax_) throw DomainError("KernelTaylor::term: order out of range");
  std::vector<double> c;
  coefficients(Z, c);
  Vec out = Vec::Zero(d_);
  for (size_t idx = 0; idx < index_.size(); ++idx) {
    if (total_degree(index_[idx], d_) != k) continue;
    double yb = 1;
    for (int i = 0; i < d_; ++i) yb *= std::pow(Y(i), index_[idx][i]);
    for (int i = 0; i < d_; ++i) out(i) += c[idx * d_ + i] * yb;
  }
  return out;
}

Vec KernelTaylor::partial_sum(int kmax, const Vec& Y, const Vec& Z) const {
  Vec s = Vec::Zero(d_);
  for (int k = 0; k <= kmax; ++k) s += term(k, Y, Z);
  return s;
}

}  // namespace dini
