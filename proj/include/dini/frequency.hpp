#pragma once

#include "dini/field.hpp"
#include "dini/kernels.hpp"
#include "dini/modulus.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace dini {

struct PolarOptions {
  int radial_nodes = 16;      // Gauss nodes per radial panel
  int panels = 2;             // radial panels per inside segment
  int crossing_samples = 32;  // level samples per ray before bisection
};

// Inside segments [a, b] of the ray X + rho dir, rho in [0, r], where level > 0.
std::vector<std::pair<double, double>> ray_segments(const Field& u, const Vec& X, const Vec& dir, double r,
                                                    int samples = 32);

// Integral of f(u, grad u) over B_r(X) intersected with {level > 0}, in polar form.
// The inside segments of every ray are located by sampling the level function and bisecting.
double ball_integral(const Field& u, const Vec& X, double r, bool need_grad,
                     const std::function<double(double, const Vec&)>& f, const PolarOptions& opt = {});
double ball_mass(const Field& u, const Vec& X, double r, const PolarOptions& opt = {});
// sup |u| over sphere directions times radial Gauss nodes in B_r(X)
double ball_sup(const Field& u, const Vec& X, double r, const PolarOptions& opt = {});

struct AlmgrenParts {
  double H = 0;  // boundary integral of u^2
  double D = 0;  // Dirichlet integral
  double N = 0;  // r D / H
};

// Throws DegenerateError when H is below 1e-14 * sup^2 * r^{d-1}.
AlmgrenParts almgren_parts(const Field& u, const Vec& X, double r, const PolarOptions& opt = {});
double almgren(const Field& u, const Vec& X, double r, const PolarOptions& opt = {});

// Relative width of the shifted-center approximation: (1 + K theta(4r))^{+-1}.
double shift_band_constant();

struct ModifiedFrequency {
  double value = 0;     // shifted-center almgren times exp(C int_0^r theta/s)
  double standard = 0;  // shifted-center almgren
  double factor = 1;    // exp(C int_0^r theta/s)
  double band_lo = 0;
  double band_hi = 0;
  Vec center;
  AlmgrenParts parts;
};

// Throws DomainError unless theta(4r) < 1/26.
ModifiedFrequency modified_frequency(const Field& u, const Vec& X0, double r, const Modulus& mod,
                                     const ModulusConfig& cfg, const PolarOptions& opt = {});

struct FrequencyCurve {
  Vec center;
  std::vector<double> radii;
  std::vector<double> H, D, N;  // standard frequency at the center
  std::vector<double> modified, band_lo, band_hi;
  double lambda = 0;  // max modified value on the ladder

  // largest decrease of the modified curve as r grows
  double max_violation() const;
};

// Radii are sorted ascending; radii are evaluated independently.
FrequencyCurve frequency_curve(const Field& u, const Vec& X0, std::vector<double> radii, const Modulus& mod,
                               const ModulusConfig& cfg, kernels::Exec ex = kernels::Exec::parallel,
                               const PolarOptions& opt = {});

struct VanishingOrderReport {
  int order = 0;
  std::vector<double> radii;
  std::vector<double> tail;  // modified values on the ladder
  double alpha = 0.25;
  double R = 0;  // largest R with modified(4R) <= order + alpha on the ladder
};

class IndeterminateError : public Error {
 public:
  IndeterminateError(const std::string& what, FrequencyCurve c) : Error(what), curve(std::move(c)) {}
  FrequencyCurve curve;
};

// Nearest integer to the smallest-radius modified value; IndeterminateError if it is
// farther than `snap` from an integer or below 1.
VanishingOrderReport vanishing_order(const FrequencyCurve& curve, double alpha = 0.25, double snap = 0.3);
VanishingOrderReport vanishing_order(const Field& u, const Vec& X0, const std::vector<double>& radii,
                                     const Modulus& mod, const ModulusConfig& cfg, double alpha = 0.25,
                                     kernels::Exec ex = kernels::Exec::parallel);

struct DoublingPair {
  double s = 0, r = 0;
  double exponent = 0;  // log(mass_s / mass_r) / log(s / r)
  double band_lo = 0, band_hi = 0;
  // slack absorbs rounding when the band collapses to a point (exact homogeneous fields)
  bool inside(double slack = 1e-9) const { return exponent >= band_lo - slack && exponent <= band_hi + slack; }
};

struct DoublingReport {
  int order = 0;
  std::vector<DoublingPair> l2;
  std::vector<DoublingPair> linf;
};

// L2 band [d + 2N exp(-C int_0^{4r} theta/s), d + 2 Nmod_hi(2r)], sup band without the d and the 2.
DoublingReport doubling_exponents(const Field& u, const Vec& X0, const std::vector<std::pair<double, double>>& pairs,
                                  int order, const Modulus& mod, const ModulusConfig& cfg,
                                  const PolarOptions& opt = {});

}  // namespace dini
