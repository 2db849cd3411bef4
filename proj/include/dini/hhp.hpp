#pragma once

#include "dini/types.hpp"

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace dini {

using MultiIndex = std::array<int, kMaxDim>;

int total_degree(const MultiIndex& a, int d);
// All multi-indices of total degree n in d variables, in lexicographic order (first variable fastest-decreasing).
std::vector<MultiIndex> monomials(int d, int n);

// Polynomial in d variables with double coefficients. Terms with zero
// coefficient are dropped; iteration order is deterministic.
class Polynomial {
 public:
  struct Term {
    MultiIndex exps;
    double coef;
  };

  Polynomial() = default;
  explicit Polynomial(int d) : d_(d) {}
  static Polynomial monomial(int d, const MultiIndex& a, double coef = 1.0);
  static Polynomial coordinate(int d, int axis);
  static Polynomial constant(int d, double c);

  int dim() const { return d_; }
  int degree() const;  // -1 for the zero polynomial
  bool is_zero() const { return terms_.empty(); }
  const std::map<MultiIndex, double>& terms() const { return terms_; }
  double coefficient(const MultiIndex& a) const;
  void add_term(const MultiIndex& a, double coef);

  double operator()(const Vec& Y) const { return evaluate(Y); }
  double evaluate(const Vec& Y) const;
  Vec gradient(const Vec& Y) const;
  void value_and_gradient(const Vec& Y, double& v, Vec& g) const;

  Polynomial derivative(int axis) const;
  Polynomial laplacian() const;
  bool is_harmonic() const { return laplacian().is_zero(); }
  Polynomial homogeneous_part(int n) const;
  Polynomial up_to_degree(int n) const;
  // p(M Y + a)
  Polynomial substitute_affine(const Mat& M, const Vec& a) const;
  // max |coefficient|
  double coef_max() const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double s) const;

  std::string to_string() const;

 private:
  int d_ = 0;
  std::map<MultiIndex, double> terms_;
};

inline Polynomial operator*(double s, const Polynomial& p) { return p * s; }

// Dimension of the space of degree-n harmonic polynomials in d variables.
long harmonic_dimension(int d, int n);

// Integer-coefficient basis of degree-n harmonic polynomials (exact null space of the Laplacian).
std::vector<Polynomial> harmonic_basis(int d, int n);
// Basis of degree-n harmonic polynomials odd in the last variable (those vanishing on {Y_d = 0}).
std::vector<Polynomial> odd_harmonic_basis(int d, int n);

// Exact moments over the unit ball and the upper half-ball {|Z| < 1, Z_d > 0}.
double ball_moment(const MultiIndex& a, int d);
double halfball_moment(const MultiIndex& a, int d);
double l2_inner_ball(const Polynomial& p, const Polynomial& q);
double l2_inner_halfball(const Polynomial& p, const Polynomial& q);
inline double l2_norm_halfball(const Polynomial& p) { return std::sqrt(l2_inner_halfball(p, p)); }
// Gram-Schmidt (Cholesky) in the half-ball inner product.
std::vector<Polynomial> orthonormalize_halfball(const std::vector<Polynomial>& basis);

struct ProjectionOptions {
  int min_degree = 0;
  int max_degree = 1;
  bool odd_only = false;   // restrict to harmonics odd in the last variable
  double cond_limit = 1e12;
};

struct Projection {
  Polynomial poly;
  double residual_rms = 0;  // weighted rms of samples minus fit
  double data_rms = 0;
  double condition = 0;
};

// Weighted least squares onto harmonic polynomials of degrees [min, max]. Weights may be empty.
// Samples are rescaled by `scale` internally for conditioning.
Projection project(const std::vector<Vec>& points, const std::vector<double>& values, const std::vector<double>& weights,
                   const ProjectionOptions& opt, double scale = 1.0);

// Surface area of the unit sphere in R^d.
double sphere_area(int d);

// Fundamental solution with -Laplace(Gamma) = delta, and its gradient.
double gamma_kernel(const Vec& xi);
Vec grad_gamma(const Vec& xi);

// Taylor terms of Y -> grad Gamma(Y - Z) at Y = 0, by symbolic differentiation.
class KernelTaylor {
 public:
  KernelTaylor(int d, int kmax);
  int dim() const { return d_; }
  int kmax() const { return kmax_; }
  // Gamma~_k(Y, Z) = sum_{|b|=k} D^b grad Gamma(-Z) Y^b / b!
  Vec term(int k, const Vec& Y, const Vec& Z) const;
  // sum_{k <= kmax} of the terms
  Vec partial_sum(int kmax, const Vec& Y, const Vec& Z) const;
  // Coefficients c[b][i] = D^b d_i Gamma(-Z) / b! for all |b| <= kmax, in the order of `indices()`.
  void coefficients(const Vec& Z, std::vector<double>& out) const;
  const std::vector<MultiIndex>& indices() const { return index_; }

 private:
  struct Piece {
    double coef;
    MultiIndex gamma;
    int q;  // power of |xi|
  };
  int d_, kmax_;
  std::vector<MultiIndex> index_;                    // all b with |b| <= kmax
  std::vector<std::vector<std::vector<Piece>>> der_;  // der_[b][i]
  std::vector<double> inv_factorial_;                // 1/b! per index
};

}  // namespace dini
