#include "dini/modulus.hpp"

#include "dini/quadrature.hpp"
#include "dini/types.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dini {

namespace {

constexpr double kE = std::numbers::e;
const double kLn2 = std::log(2.0);

void require_radius(double r, const char* what) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError(std::string(what) + ": radius must be finite and >= 0");
}

}  // namespace

Modulus Modulus::zero() { return Modulus(); }

Modulus Modulus::power(double alpha, double c) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("power modulus: exponent must lie in (0, 1]");
  if (!(c >= 0.0)) throw DomainError("power modulus: scale must be >= 0");
  Modulus m;
  m.kind_ = ModulusKind::power;
  m.exponent_ = alpha;
  m.c_ = c;
  return m;
}

Modulus Modulus::log_power(double p, double c) {
  if (!(p > 1.0)) throw DomainError("log_power modulus: exponent must be > 1");
  if (!(c >= 0.0)) throw DomainError("log_power modulus: scale must be >= 0");
  Modulus m;
  m.kind_ = ModulusKind::log_power;
  m.exponent_ = p;
  m.c_ = c;
  return m;
}

Modulus Modulus::table(std::vector<double> r, std::vector<double> values) {
  if (r.size() != values.size() || r.size() < 2) throw DomainError("table modulus: need >= 2 matching samples");
  for (size_t i = 0; i < r.size(); ++i) {
    if (!(r[i] >= 0.0) || !(values[i] >= 0.0)) throw DomainError("table modulus: samples must be >= 0");
    if (i > 0 && !(r[i] > r[i - 1])) throw DomainError("table modulus: radii must be increasing");
  }
  for (size_t i = 1; i < values.size(); ++i) values[i] = std::max(values[i], values[i - 1]);
  Modulus m;
  m.kind_ = ModulusKind::table;
  m.c_ = 1.0;
  m.tr_ = std::move(r);
  m.tv_ = std::move(values);
  return m;
}

Modulus Modulus::with_cap(double cap) const {
  if (!(cap > 0.0)) throw DomainError("modulus cap must be > 0");
  Modulus m = *this;
  m.cap_ = cap / arg_scale_;
  return m;
}

Modulus Modulus::rescaled(double k) const {
  if (!(k > 0.0)) throw DomainError("modulus rescale factor must be > 0");
  Modulus m = *this;
  m.arg_scale_ = arg_scale_ * k;
  if (cap_ > 0) m.cap_ = cap_ / k;
  return m;
}

double Modulus::raw(double r) const {
  switch (kind_) {
    case ModulusKind::zero:
      return 0.0;
    case ModulusKind::power:
      return c_ * std::pow(r, exponent_);
    case ModulusKind::log_power:
      return r == 0.0 ? 0.0 : c_ / std::pow(std::log(kE + 1.0 / r), exponent_);
    case ModulusKind::table: {
      if (r <= tr_.front()) return tv_.front();
      if (r >= tr_.back()) return tv_.back();
      auto it = std::upper_bound(tr_.begin(), tr_.end(), r);
      size_t i = static_cast<size_t>(it - tr_.begin());
      double w = (r - tr_[i - 1]) / (tr_[i] - tr_[i - 1]);
      return tv_[i - 1] + w * (tv_[i] - tv_[i - 1]);
    }
  }
  return 0.0;
}

double Modulus::raw_log(double x) const {
  switch (kind_) {
    case ModulusKind::zero:
      return 0.0;
    case ModulusKind::power:
      return c_ * std::exp(exponent_ * x);
    case ModulusKind::log_power: {
      // log(e + e^{-x}) without overflow for very negative x
      double L = x < 0 ? -x + std::log1p(kE * std::exp(x)) : std::log(kE + std::exp(-x));
      return c_ / std::pow(L, exponent_);
    }
    case ModulusKind::table:
      return raw(std::exp(x));
  }
  return 0.0;
}

double Modulus::operator()(double r) const {
  require_radius(r, "modulus evaluation");
  double s = r * arg_scale_;
  if (cap_ > 0 && r > cap_) s = cap_ * arg_scale_;
  return raw(s);
}

double Modulus::eval_log(double x) const {
  double xs = x + std::log(arg_scale_);
  if (cap_ > 0 && x > std::log(cap_)) xs = std::log(cap_ * arg_scale_);
  return raw_log(xs);
}

std::string Modulus::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case ModulusKind::zero:
      os << "zero";
      break;
    case ModulusKind::power:
      os << "power(alpha=" << exponent_ << ",c=" << c_ << ")";
      break;
    case ModulusKind::log_power:
      os << "log_power(p=" << exponent_ << ",c=" << c_ << ")";
      break;
    case ModulusKind::table:
      os << "table(" << tr_.size() << " samples)";
      break;
  }
  if (arg_scale_ != 1.0) os << "[r*" << arg_scale_ << "]";
  if (cap_ > 0) os << "[cap=" << cap_ << "]";
  return os.str();
}

void ModulusConfig::validate() const {
  if (!(R > 0)) throw ConfigError("modulus config: R must be > 0");
  if (!(beta > 0 && beta < 1)) throw ConfigError("modulus config: beta must lie in (0, 1)");
  if (!(quad_tol > 0)) throw ConfigError("modulus config: quad_tol must be > 0");
  if (!(freq_constant >= 0)) throw ConfigError("modulus config: freq_constant must be >= 0");
}

double dini_integral(const Modulus& mod, double a, double b, double tol) {
  require_radius(a, "dini_integral");
  if (!(b > a)) throw DomainError("dini_integral: need 0 <= a < b");
  if (mod.is_zero()) return 0.0;
  auto f = [&](double x) { return mod.eval_log(x); };
  if (a == 0.0) return integrate_dlog_from_zero(f, b, tol);
  return integrate(f, std::log(a), std::log(b), tol);
}

double theta_hat(const Modulus& mod, double r, double tol) {
  if (!(r > 0) || !std::isfinite(r)) throw DomainError("theta_hat: r must be > 0");
  if (mod.is_zero()) return 0.0;
  double lr = std::log(r);
  // with u = log(s/r) the triangular weight is u on [0, ln2] and 2 ln2 - u on [ln2, 2 ln2]
  auto up = [&](double u) { return mod.eval_log(lr + u) * u; };
  auto down = [&](double u) { return mod.eval_log(lr + u) * (2 * kLn2 - u); };
  double v = integrate(up, 0.0, kLn2, tol / 2) + integrate(down, kLn2, 2 * kLn2, tol / 2);
  return v / (kLn2 * kLn2);
}

double weighted_sup(const Modulus& mod, double t, double hi, double beta) {
  if (!(t > 0) || !(hi >= t)) throw DomainError("weighted_sup: need 0 < t <= hi");
  return weighted_sup_log(mod, std::log(t), std::log(hi), beta);
}

double weighted_sup_log(const Modulus& mod, double lt, double lh, double beta) {
  const double l0 = lt;
  auto v = [&](double x) { return std::exp(beta * (l0 - x)) * mod.eval_log(x); };
  double best = v(lt);
  if (lh <= lt || mod.is_zero()) return best;
  double lscale = std::log(mod.arg_scale());
  if (mod.cap() > 0) lh = std::min(lh, std::log(mod.cap()));  // past the cap the weight only decays
  if (lh <= lt) return best;
  if (mod.kind() == ModulusKind::power) {
    // t^beta s^{alpha-beta} is monotone in s
    return std::max(best, v(lh));
  }
  if (mod.kind() == ModulusKind::log_power) {
    // d/dx log theta(e^x) <= p / log(e + e^{-x}) < beta left of x0, so v decreases there
    double x0 = -std::log(std::exp(mod.exponent() / beta) - std::numbers::e) - lscale;
    if (x0 >= lh) return best;
    lt = std::max(lt, x0);
  }
  double decades = (lh - lt) / std::log(10.0);
  int n = static_cast<int>(std::clamp(std::ceil(64 * decades), 2.0, 4096.0));
  double step = (lh - lt) / n;
  int ibest = 0;
  for (int i = 0; i <= n; ++i) {
    double val = v(lt + i * step);
    if (val > best) {
      best = val;
      ibest = i;
    }
  }
  // golden-section refinement inside the bracket around the best grid point
  double a = lt + std::max(ibest - 1, 0) * step;
  double b = lt + std::min(ibest + 1, n) * step;
  const double g = (std::sqrt(5.0) - 1) / 2;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = v(c), fd = v(d);
  for (int it = 0; it < 80 && b - a > 1e-13 * (1 + std::abs(a)); ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = v(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = v(d);
    }
  }
  return std::max({best, fc, fd, v(lh)});
}

double theta_tilde(const Modulus& mod, double r, const ModulusConfig& cfg) {
  if (!(r > 0) || !(r < cfg.R / 2)) throw DomainError("theta_tilde: need 0 < r < R/2");
  if (mod.is_zero()) return 0.0;
  return mod(4 * r) + dini_integral(mod, 0.0, 4 * r, cfg.quad_tol) + tail_decay(mod, r, cfg);
}

double theta_sharp(const Modulus& mod, double t, const ModulusConfig& cfg) {
  if (!(t > 0) || !(t <= cfg.R)) throw DomainError("theta_sharp: need 0 < t <= R");
  return weighted_sup(mod, t, cfg.R, cfg.beta);
}

double sharp_dini_integral(const Modulus& mod, double b, const ModulusConfig& cfg) {
  if (!(b > 0) || !(b <= cfg.R)) throw DomainError("sharp_dini_integral: need 0 < b <= R");
  if (mod.is_zero()) return 0.0;
  double lR = std::log(cfg.R);
  auto f = [&](double x) { return x <= lR ? weighted_sup_log(mod, x, lR, cfg.beta) : 0.0; };
  return integrate_dlog_from_zero(f, b, cfg.quad_tol);
}

double theta_ring(const Modulus& mod, double r, const ModulusConfig& cfg) {
  if (!(r > 0) || !(r < cfg.R / 6)) throw DomainError("theta_ring: need 0 < r < R/6");
  if (mod.is_zero()) return 0.0;
  return theta_tilde(mod, 3 * r, cfg) + mod(4 * r) + dini_integral(mod, 0.0, 4 * r, cfg.quad_tol) +
         sharp_dini_integral(mod, 4 * r, cfg);
}

double omega_hat(const Modulus& omega, double t, const ModulusConfig& cfg) {
  if (!(t > 0) || !(t <= 1)) throw DomainError("omega_hat: need 0 < t <= 1");
  if (omega.is_zero()) return 0.0;
  double sharp = 4 * t <= 1 ? weighted_sup(omega, 4 * t, 1.0, cfg.beta) : omega(4 * t);
  return omega(t) + omega(4 * t) + sharp;
}

double tail_decay(const Modulus& mod, double r, const ModulusConfig& cfg) {
  if (!(r > 0) || !(4 * r < 2 * cfg.R)) throw DomainError("tail_decay: need 0 < 4r < 2R");
  if (mod.is_zero()) return 0.0;
  auto f = [&](double x) { return mod.eval_log(x) * std::exp(-x); };
  // scale by r inside so the absolute tolerance applies to the returned value
  auto g = [&](double x) { return r * f(x); };
  return integrate(g, std::log(4 * r), std::log(2 * cfg.R), cfg.quad_tol);
}

NormalizationReport check_normalization(const Modulus& mod, double R0) {
  if (!(R0 > 0)) throw ConfigError("normalization radius must be > 0");
  NormalizationReport rep;
  rep.theta_8r0 = mod(8 * R0);
  rep.dini_16r0 = dini_integral(mod, 0.0, 16 * R0);
  rep.ok = rep.theta_8r0 < 1.0 / 72 && rep.dini_16r0 <= 1.0;
  return rep;
}

}  // namespace dini
