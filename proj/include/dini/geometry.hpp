#pragma once

#include "dini/modulus.hpp"
#include "dini/types.hpp"

#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace dini {

// Graph function phi : R^{d-1} -> R of the form
//   c0 |x|^{1+alpha} + a . x + q |x|^2,
// or a cubic Hermite table (d = 2 only).
class GraphFunction {
 public:
  static GraphFunction flat(int d);
  static GraphFunction power(int d, double c0, double alpha);
  static GraphFunction combined(int d, double c0, double alpha, const Vec& linear, double quad);
  // d = 2: samples x_i increasing, values and slopes at the samples.
  static GraphFunction hermite_table(std::vector<double> x, std::vector<double> value, std::vector<double> slope);

  int dim() const { return d_; }
  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  // Modulus of continuity of the gradient valid for |x - x'| <= 1.
  Modulus gradient_modulus() const;
  // sup |grad phi| over |x| <= rho.
  double lip_bound(double rho) const;
  bool is_affine() const { return !table_ && c0_ == 0.0 && quad_ == 0.0; }
  std::string describe() const;

  double power_coef() const { return c0_; }
  double alpha() const { return alpha_; }

 private:
  int d_ = 2;
  bool table_ = false;
  double c0_ = 0.0, alpha_ = 0.5, quad_ = 0.0;
  Vec lin_;
  std::vector<double> tx_, tv_, ts_;
};

struct GraphDomain {
  GraphFunction phi;
  Modulus theta;
  double lip_bound = 0.0;

  static GraphDomain from(const GraphFunction& f, double rho = 1.0);
  int dim() const { return phi.dim(); }
};

struct OrthoFrame {
  Mat Ot;     // (d-1)x(d-1), symmetric
  Vec b;      // d-1
  Vec dvec;   // d-1
  double c = 1.0;
  bool steep = false;  // |grad| > 1: eigenvalue bounds on Ot may loosen

  int dim() const { return static_cast<int>(b.size()) + 1; }
  Mat O() const;
};

OrthoFrame build_frame(const Vec& grad);

struct FrameResiduals {
  double orthogonality = 0;  // ||O O^T - I||_inf
  double rows = 0;           // Ot Ot^T + b b^T - I
  double cross = 0;          // Ot dvec + c b
  double last = 0;           // |dvec|^2 + c^2 - 1
  double max() const;
};

FrameResiduals frame_residuals(const OrthoFrame& f);

enum class Side { upper, lower };

class FlattenChart {
 public:
  // radius <= 0 selects the largest r with theta(4r) < 1/26.
  FlattenChart(GraphDomain domain, const Vec& x0, double radius = -1.0);

  int dim() const { return domain_.dim(); }
  const GraphDomain& domain() const { return domain_; }
  const OrthoFrame& frame() const { return frame_; }
  const Vec& x0() const { return x0_; }
  Vec base_point() const;  // (x0, phi(x0)) in R^d
  double radius() const { return radius_; }
  bool is_flat() const { return flat_; }

  double newton_tol = 1e-12;
  int newton_max_iter = 50;

  Vec g(const Vec& x) const;
  Mat Dg(const Vec& x) const;
  Vec g_inverse(const Vec& y) const;

  // value and gradient of phi_tilde at y
  double tilde_phi(const Vec& y) const;
  Vec tilde_phi_grad(const Vec& y) const;
  void tilde_phi_both(const Vec& y, double& value, Vec& grad) const;

  // (y, s) in flattened coordinates -> X in original coordinates, and back.
  Vec flatten(const Vec& p) const;
  Vec unflatten(const Vec& X) const;

  Mat coefficient_matrix(const Vec& y, Side side = Side::upper) const;

 private:
  void check_in_chart(const Vec& y) const;

  GraphDomain domain_;
  Vec x0_;
  double phi0_ = 0.0;
  Vec grad0_;
  OrthoFrame frame_;
  double radius_ = std::numeric_limits<double>::infinity();
  bool flat_ = false;
};

// Largest r with theta(4r) < 1/26 (infinity for the zero modulus).
double smallness_radius(const Modulus& theta);

// A(y) for a flattening whose graph has gradient G at y.
Mat coefficient_from_gradient(const Vec& G, Side side);

// X0 + (y, y_d + 3|Y| theta_hat(|Y|)).
Vec psi_map(const Vec& X0, const Vec& Y, const Modulus& theta);

struct FrameDeviation {
  double frame = 0;       // ||O_x - O_x'||_F
  double c = 0;           // |c_x - c_x'|
  double phi_tilde = 0;   // sup over sampled y of |phi_tilde_x - phi_tilde_x'|
  double theta = 0;       // theta(|x - x'|)
};

// phi_tilde distance is sampled on |y| <= rho.
FrameDeviation frame_continuity(const GraphDomain& dom, const Vec& x, const Vec& xp, double rho);

}  // namespace dini
