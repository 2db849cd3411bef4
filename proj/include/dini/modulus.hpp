#pragma once

#include <string>
#include <vector>

namespace dini {

enum class ModulusKind { zero, power, log_power, table };

// Nondecreasing Dini parameter theta. Immutable; all members are pure.
class Modulus {
 public:
  Modulus() = default;

  static Modulus zero();
  // c * r^alpha, alpha in (0, 1]; alpha = 1 is the linear modulus of C^{1,1} graphs.
  static Modulus power(double alpha, double c);
  // c / log^p(e + 1/r), p > 1.
  static Modulus log_power(double p, double c);
  // Piecewise-linear through the samples, made monotone by running max. Held constant past the last sample.
  static Modulus table(std::vector<double> r, std::vector<double> values);

  // theta frozen at theta(cap) for r > cap.
  Modulus with_cap(double cap) const;
  // r -> theta(k r).
  Modulus rescaled(double k) const;

  double operator()(double r) const;
  // theta(e^x); safe for very negative x.
  double eval_log(double x) const;

  ModulusKind kind() const { return kind_; }
  double exponent() const { return exponent_; }
  double scale() const { return c_; }
  double cap() const { return cap_; }
  double arg_scale() const { return arg_scale_; }
  const std::vector<double>& table_r() const { return tr_; }
  const std::vector<double>& table_v() const { return tv_; }
  bool is_zero() const { return kind_ == ModulusKind::zero || c_ == 0.0; }
  std::string describe() const;

 private:
  double raw(double r) const;
  double raw_log(double x) const;

  ModulusKind kind_ = ModulusKind::zero;
  double exponent_ = 0.0;
  double c_ = 0.0;
  double cap_ = -1.0;  // negative: no cap
  double arg_scale_ = 1.0;
  std::vector<double> tr_, tv_;
};

struct ModulusConfig {
  double R = 1.0;
  double beta = 0.5;
  double quad_tol = 1e-12;
  double freq_constant = 1.0;

  void validate() const;  // throws ConfigError
};

// Integral of theta(s)/s over [a, b].
double dini_integral(const Modulus& mod, double a, double b, double tol = 1e-12);
// (1/log^2 2) int_r^{2r} (1/t) int_t^{2t} theta(s)/s ds dt, reduced to one weighted integral.
double theta_hat(const Modulus& mod, double r, double tol = 1e-12);
double theta_tilde(const Modulus& mod, double r, const ModulusConfig& cfg);
double theta_sharp(const Modulus& mod, double t, const ModulusConfig& cfg);
double theta_ring(const Modulus& mod, double r, const ModulusConfig& cfg);
// omega(t) + omega(4t) + omega_sharp(4t) where omega_sharp takes its sup over [., 1].
double omega_hat(const Modulus& omega, double t, const ModulusConfig& cfg);
double tail_decay(const Modulus& mod, double r, const ModulusConfig& cfg);
// Integral of theta_sharp(s)/s over [0, b].
double sharp_dini_integral(const Modulus& mod, double b, const ModulusConfig& cfg);

// Sup of (t/s)^beta * f(s) over s in [t, hi] with f nondecreasing given through f(e^x).
double weighted_sup(const Modulus& mod, double t, double hi, double beta);
// Same with log-radii arguments, for t below the double range.
double weighted_sup_log(const Modulus& mod, double log_t, double log_hi, double beta);

struct NormalizationReport {
  double theta_8r0 = 0.0;
  double dini_16r0 = 0.0;
  bool ok = false;
};

// theta(8 R0) < 1/72 and int_0^{16 R0} theta/s <= 1.
NormalizationReport check_normalization(const Modulus& mod, double R0);

}  // namespace dini
