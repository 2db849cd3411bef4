#pragma once

#include "dini/field.hpp"
#include "dini/geometry.hpp"
#include "dini/hhp.hpp"
#include "dini/modulus.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace dini {

struct ExpansionOptions {
  int blowup_radial = 12;      // radial Gauss nodes for blow-up samples on B_1
  bool blowup_odd_only = true;  // fit blow-ups with harmonics vanishing on {Z_d = 0} only
  double kernel_R = 0.5;       // radius of the cutoff for the kernel route
  int w_angular = 16;          // Gauss nodes per angular panel (8 panels, d = 2) for w
  int w_radial = 10;           // Gauss nodes per radial panel for w
  int p2_first_shell = 3;      // delta = R 2^{-k}, k = first..last
  int p2_last_shell = 10;
  int p2_radial = 8;
  int p1_radial = 6;           // samples of v - w on B_{R/4}
  int p1_angular = 4;          // Gauss nodes per angular panel for P1 samples
  int p1_extra_degree = 2;     // fit degree N + extra, truncate to N
  double lower_degree_floor = 0.01;
  int probe_angular = 4;       // directions per panel on the error ladders
  double pde_step = 1.0 / 64;  // finite-difference step for the PDE residual of psi
};

// Quintic ramp: 1 on [0, R/2], 0 on [R, inf), C^2 in between.
double cutoff(double rho, double R);

// T_{X0,r}u(Z) = u(X0 + r O^T Z) / normalizer, in coordinates rotated so the tangent half-space is {Z_d > 0}.
class BlowupField : public Field {
 public:
  BlowupField(const Field& u, Vec X0, Mat O, double r, double normalizer)
      : u_(u), X0_(std::move(X0)), O_(std::move(O)), r_(r), norm_(normalizer) {}
  int dim() const override { return u_.dim(); }
  double value(const Vec& Z) const override;
  Vec gradient(const Vec& Z) const override;
  double level(const Vec& Z) const override { return u_.level(map(Z)); }

 private:
  Vec map(const Vec& Z) const { return X0_ + r_ * (O_.transpose() * Z); }
  const Field& u_;
  Vec X0_;
  Mat O_;
  double r_, norm_;
};

struct Blowup {
  double r = 0;
  double normalizer = 0;  // (r^{-d} int_{B_r(X0)} u^2)^{1/2}
  double setdiff = 0;     // |B_1 cap ((D - X0)/r  symmetric difference  tangent half-space)|
  Projection fit;         // degree-N harmonic fit in rotated coordinates
};

// Throws DegenerateError when the mass is below 1e-300 or the fit is empty.
Blowup blowup(const Field& u, const Vec& X0, const Mat& O, double r, int N, const ExpansionOptions& opt = {});

struct TangentReport {
  int N = 0;
  Polynomial tangent;  // unit L2(B_1^+) norm, rotated coordinates
  std::vector<double> radii, epsilon, theta_tilde, ratio, setdiff, cauchy;
  double slope = 0;      // least-squares log-log slope of epsilon over the ladder
  double ratio_max = 0;  // fitted constant in epsilon <= C theta_tilde
  double setdiff_K = 0;  // fitted constant in setdiff <= K theta(r)
  bool converged = false;
};

// Radii in any order; the finest radius provides the tangent.
TangentReport tangent_from_blowups(const Field& u, const Vec& X0, const Mat& O, std::vector<double> radii, int N,
                                   const Modulus& mod, const ModulusConfig& cfg, const ExpansionOptions& opt = {});

// Unit L2(B_1^+) normalization.
Polynomial normalize_tangent(const Polynomial& p);

// f(Z) times the cutoff, for |Z| < R.
class SourceField {
 public:
  using VecFn = std::function<Vec(const Vec&)>;
  SourceField(int d, double R, VecFn f, bool zero = false) : d_(d), R_(R), f_(std::move(f)), zero_(zero) {}
  // (A~(Z) - I) grad v~(Z) for the odd extension of a flattened solution.
  static SourceField from_solution(const FlattenChart& chart, std::shared_ptr<const Field> v, double R);

  int dim() const { return d_; }
  double R() const { return R_; }
  bool is_zero() const { return zero_; }
  Vec raw(const Vec& Z) const { return f_(Z); }
  Vec operator()(const Vec& Z) const;  // f zeta

 private:
  int d_;
  double R_;
  VecFn f_;
  bool zero_;
};

// w(Y) = int grad Gamma(Y - Z) . (f zeta)(Z) dZ, by polar quadrature around Y. Needs |Y| < R/2.
double newtonian_w(const SourceField& src, const Vec& Y, const ExpansionOptions& opt = {});

struct P2Report {
  Polynomial P2;
  std::vector<double> deltas;
  std::vector<double> coef_max;    // max coefficient of f_delta
  std::vector<double> increments;  // max coefficient change between successive deltas
  double asymmetry = 0;            // dropped even-in-s mass (quadrature noise)
  bool cauchy = true;
};

P2Report polynomial_P2(const SourceField& src, int N, const ExpansionOptions& opt = {});

struct P1Report {
  Polynomial P1;
  std::vector<double> radii, residual;  // max |v - w - P1| on spheres
  double exponent = 0;                  // fitted decay exponent of the residual
};

// Throws ContractError when the residual exponent falls below N + 0.5.
P1Report polynomial_P1(const Field& v, const SourceField& src, int N, const ExpansionOptions& opt = {});

struct ExpansionResult {
  int N = 0;
  Polynomial PN;  // degree-N homogeneous part of P1 + P2
  Polynomial P1, P2;
  double lower_fraction = 0;  // coefficient mass of degrees < N relative to degrees <= N
  double boundary_ratio = 0;  // sup_{flat disc} |PN| / sup_{B_1} |PN|
  double norm = 0;            // L2(B_1^+) norm of PN
  std::vector<double> radii, psi_max, psi_bound, split_I, split_II, split_III;
  double C = 0;  // fitted constant in |psi| <= C |Y|^N theta_tilde(|Y|)
};

ExpansionResult assemble_expansion(const Polynomial& P1, const Polynomial& P2, const Field& v, int N,
                                   const std::vector<double>& radii, const Modulus& mod, const ModulusConfig& cfg,
                                   const ExpansionOptions& opt = {});

struct UnflattenReport {
  std::vector<double> radii, psi_tilde_max, correction_max, correction_bound;
  double C = 0;             // fitted |psi~| <= C |Y|^N theta_tilde(2|Y|)
  double consistency = 0;   // max |psi~ formula - (u - PN)| relative to sup |u|
  double correction_K = 0;  // fitted correction <= K sup|grad PN| r^N theta(2r)
};

// u is the field in original coordinates.
UnflattenReport unflatten_expansion(const FlattenChart& chart, const Field& u, const ExpansionResult& res,
                                    const Modulus& mod, const ModulusConfig& cfg, const ExpansionOptions& opt = {});

struct GradReport {
  std::vector<double> radii, grad_max, bound;
  double C = 0;                // fitted |grad psi~| <= C |Y|^{N-1} theta_ring(2|Y|)
  double pde_mismatch = 0;     // median |-div(A grad psi) - div g| at probes, finite differences
  double pde_scale = 0;        // median |div g| at the same probes
  std::vector<double> omega_integral, omega_bound;
  double omega_K = 0;
};

GradReport grad_error_check(const FlattenChart& chart, const Field& u, const Field& v, const ExpansionResult& res,
                            const Modulus& mod, const ModulusConfig& cfg, const ExpansionOptions& opt = {});

struct UniquenessReport {
  double distance = 0;  // coefficient max-norm after unit normalization
  bool pass = false;
};

// Throws ContractError on a degree mismatch.
UniquenessReport uniqueness_check(const Polynomial& a, const Polynomial& b, double tol);

struct ContinuityReport {
  std::vector<double> distance;   // to the tangent at the limit center
  std::vector<double> reference;  // to supplied closed-form tangents (if any)
  bool monotone = false;
};

// Tangents at centers[j] (frames[j]) expressed in original coordinates, compared with the one at X0.
// Every center must have vanishing order N; otherwise ContractError names the center.
ContinuityReport tangent_continuity(const Field& u, const std::vector<Vec>& centers, const std::vector<Mat>& frames,
                                    const Vec& X0, const Mat& O0, int N, double r,
                                    const std::vector<double>& order_ladder,
                                    const std::vector<Polynomial>& closed_form = {},
                                    const ExpansionOptions& opt = {});

}  // namespace dini
