#include "doctest.h"

#include "dini/modulus.hpp"
#include "dini/types.hpp"

#include <cmath>
#include <vector>

using namespace dini;

namespace {

Modulus sample_table() { return Modulus::table({0, 1e-3, 1e-2, 0.1, 1}, {0, 0.01, 0.05, 0.2, 0.4}); }

std::vector<double> ladder(int k0, int k1) {
  std::vector<double> r;
  for (int k = k0; k <= k1; ++k) r.push_back(std::ldexp(1.0, -k));
  return r;
}

}  // namespace

TEST_CASE("eval") {
  CHECK(Modulus::power(0.5, 1)(0.04) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(Modulus::zero()(0.7) == 0.0);
  CHECK(Modulus::table({0, 1}, {0, 0.3})(0.5) == doctest::Approx(0.15).epsilon(1e-15));
  CHECK_THROWS_AS(Modulus::power(0.5, 1)(-1e-3), DomainError);
  // running max makes table monotone
  Modulus t = Modulus::table({0, 1, 2}, {0, 0.5, 0.2});
  CHECK(t(1.5) == doctest::Approx(0.5));
  // cap and rescale
  Modulus p = Modulus::power(0.5, 1).with_cap(0.25);
  CHECK(p(1.0) == doctest::Approx(0.5));
  CHECK(Modulus::power(0.5, 1).rescaled(4)(0.01) == doctest::Approx(0.2));
  // log evaluation agrees with direct evaluation
  for (const Modulus& m : {Modulus::power(0.5, 2), Modulus::log_power(2, 1), sample_table()}) {
    for (double r : {1e-5, 3e-3, 0.2, 0.9}) CHECK(m.eval_log(std::log(r)) == doctest::Approx(m(r)).epsilon(1e-13));
  }
  CHECK(std::isfinite(Modulus::log_power(2, 1).eval_log(-1e12)));
}

TEST_CASE("dini integral closed forms and oracle") {
  CHECK(dini_integral(Modulus::power(0.5, 1), 0, 1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(dini_integral(Modulus::zero(), 0.1, 0.3) == 0.0);
  for (double a : {0.0, 1e-4, 0.02}) {
    for (double b : {0.05, 0.5}) {
      double exact = 0.7 * (std::pow(b, 0.3) - std::pow(a, 0.3)) / 0.3;
      CHECK(dini_integral(Modulus::power(0.3, 0.7), a, b) == doctest::Approx(exact).epsilon(1e-11));
    }
  }
  // mpmath reference, 30 digits
  CHECK(dini_integral(Modulus::log_power(2, 1), 0, 0.1, 1e-12) == doctest::Approx(0.416389018946000105).epsilon(1e-10));
  // table starting above zero is not Dini
  CHECK_THROWS_AS(dini_integral(Modulus::table({0, 1}, {0.1, 0.2}), 0, 0.5), DivergenceError);
  CHECK_THROWS_AS(dini_integral(Modulus::power(0.5, 1), 0.3, 0.2), DomainError);
}

TEST_CASE("theta_hat") {
  CHECK(theta_hat(Modulus::zero(), 0.3) == 0.0);
  for (double r : {1e-4, 0.01, 0.2}) {
    CHECK(theta_hat(Modulus::power(1.0, 3.0), r) == doctest::Approx(3.0 * r / std::pow(std::log(2.0), 2)).epsilon(1e-12));
  }
  double v = theta_hat(Modulus::power(0.5, 1), 0.01);
  CHECK(v >= 0.1);
  CHECK(v <= 0.2);
  // nested-integral references from mpmath
  CHECK(v == doctest::Approx(0.142842584214089832).epsilon(1e-11));
  CHECK(theta_hat(Modulus::log_power(2, 1), 0.01) == doctest::Approx(0.0644297069576814427).epsilon(1e-11));
}

TEST_CASE("theta_hat sandwich on log-spaced radii") {
  for (const Modulus& m : {Modulus::power(0.5, 1), Modulus::log_power(2, 1), sample_table()}) {
    for (int i = 0; i < 50; ++i) {
      double r = std::pow(10.0, -6 + 6.0 * i / 49);
      double th = theta_hat(m, r);
      CHECK(th >= m(r) - 1e-8);
      CHECK(th <= m(4 * r) + 1e-8);
    }
  }
}

TEST_CASE("theta_tilde") {
  ModulusConfig cfg;
  CHECK(theta_tilde(Modulus::zero(), 0.1, cfg) == 0.0);
  double lin = theta_tilde(Modulus::power(1.0, 1.0), 0.01, cfg);
  CHECK(lin == doctest::Approx(0.04 + 0.04 + 0.01 * std::log(50.0)).epsilon(1e-12));
  CHECK(theta_tilde(Modulus::power(0.5, 1), 0.01, cfg) == doctest::Approx(0.685857864376269050).epsilon(1e-11));
  CHECK(theta_tilde(Modulus::log_power(2, 1), 0.01, cfg) == doctest::Approx(0.441852772902135208).epsilon(1e-10));
  CHECK_THROWS_AS(theta_tilde(Modulus::power(0.5, 1), 0.5, cfg), DomainError);
  // power scaling: theta_tilde(r) / r^0.5 bounded on [1e-4, 1e-1]
  double kmax = 0, kmin = 1e300;
  for (int i = 0; i <= 30; ++i) {
    double r = std::pow(10.0, -4 + 3.0 * i / 30);
    double k = theta_tilde(Modulus::power(0.5, 1), r, cfg) / std::sqrt(r);
    kmax = std::max(kmax, k);
    kmin = std::min(kmin, k);
  }
  CHECK(kmax / kmin < 1.5);
}

TEST_CASE("theta_sharp") {
  ModulusConfig cfg;
  CHECK(theta_sharp(Modulus::zero(), 0.1, cfg) == 0.0);
  Modulus lo = Modulus::power(0.3, 1.0);
  for (double t : {1e-5, 0.01, 0.5}) CHECK(theta_sharp(lo, t, cfg) == doctest::Approx(lo(t)).epsilon(1e-12));
  Modulus hi = Modulus::power(0.8, 1.0);
  for (double t : {1e-5, 0.01, 0.5}) {
    CHECK(theta_sharp(hi, t, cfg) == doctest::Approx(std::pow(t / cfg.R, 0.5) * hi(cfg.R)).epsilon(1e-12));
  }
  // interior maximizer: table with a jump between 0.01 and 0.02
  Modulus step = Modulus::table({0, 0.01, 0.02, 1}, {0, 0.01, 0.5, 0.5});
  double t = 1e-3;
  CHECK(theta_sharp(step, t, cfg) == doctest::Approx(std::sqrt(t / 0.02) * 0.5).epsilon(1e-9));
  CHECK_THROWS_AS(theta_sharp(lo, 2.0, cfg), DomainError);
}

TEST_CASE("weighted sup matches dense sampling") {
  std::vector<Modulus> mods = {Modulus::log_power(2, 1), Modulus::log_power(1.5, 0.3).rescaled(7.0),
                               Modulus::power(0.6, 1).with_cap(0.2), sample_table()};
  for (const Modulus& m : mods) {
    for (double beta : {0.1, 0.5, 0.9}) {
      for (double t : {1e-6, 1e-3, 0.1}) {
        double brute = 0;
        for (int i = 0; i <= 200000; ++i) {
          double s = t * std::pow(1.0 / t, i / 200000.0);
          brute = std::max(brute, std::pow(t / s, beta) * m(s));
        }
        double v = weighted_sup(m, t, 1.0, beta);
        CHECK(v >= brute * (1 - 1e-9));
        CHECK(v <= brute * (1 + 1e-4));  // brute grid spacing in log s is 7e-5
      }
    }
  }
}

TEST_CASE("theta_ring") {
  ModulusConfig cfg;
  CHECK(theta_ring(Modulus::zero(), 0.1, cfg) == 0.0);
  Modulus p = Modulus::power(0.5, 1);
  for (double beta : {0.25, 0.75}) {
    cfg.beta = beta;
    double expo = std::min(beta, 0.5);
    double prev = 1e300, kmax = 0, kmin = 1e300;
    for (double r : ladder(4, 14)) {
      double v = theta_ring(p, r, cfg);
      CHECK(v < prev);
      prev = v;
      kmax = std::max(kmax, v / std::pow(r, expo));
      kmin = std::min(kmin, v / std::pow(r, expo));
    }
    CHECK(kmax / kmin < 3.0);
  }
}

TEST_CASE("omega_hat") {
  ModulusConfig cfg;
  CHECK(omega_hat(Modulus::zero(), 0.1, cfg) == 0.0);
  Modulus lin = Modulus::power(1.0, 1.0);
  for (double t : {1e-3, 0.05, 0.25}) {
    CHECK(omega_hat(lin, t, cfg) == doctest::Approx(5 * t + 2 * std::sqrt(t)).epsilon(1e-12));
  }
  // omega(t) = theta(2 t r) is dominated by 2 theta(8tr) + theta_sharp(8tr)
  Modulus th = Modulus::power(0.5, 1);
  double r = 0.05;
  Modulus om = th.rescaled(2 * r);
  for (double t : {0.01, 0.05, 0.2}) {
    CHECK(omega_hat(om, t, cfg) <= 2 * th(8 * t * r) + theta_sharp(th, 8 * t * r, cfg) + 1e-14);
  }
}

TEST_CASE("tail_decay") {
  ModulusConfig cfg;
  CHECK(tail_decay(Modulus::zero(), 0.1, cfg) == 0.0);
  for (double r : {1e-4, 0.01, 0.1}) {
    CHECK(tail_decay(Modulus::power(1.0, 1.0), r, cfg) == doctest::Approx(r * std::log(1 / (2 * r))).epsilon(1e-11));
  }
  CHECK_THROWS_AS(tail_decay(Modulus::power(1.0, 1.0), 0.5, cfg), DomainError);
}

TEST_CASE("derived moduli decrease to zero along dyadic radii") {
  ModulusConfig cfg;
  for (const Modulus& m : {Modulus::power(0.5, 1), Modulus::log_power(2, 1)}) {
    double pt = 1e300, pr = 1e300, pd = 1e300;
    for (double r : ladder(4, 14)) {
      double a = theta_tilde(m, r, cfg), b = theta_ring(m, r, cfg), c = tail_decay(m, r, cfg);
      CHECK(a < pt);
      CHECK(b < pr);
      CHECK(c < pd);
      pt = a;
      pr = b;
      pd = c;
    }
    CHECK(theta_tilde(m, std::ldexp(1.0, -14), cfg) < theta_tilde(m, std::ldexp(1.0, -4), cfg));
    CHECK(tail_decay(m, std::ldexp(1.0, -20), cfg) < tail_decay(m, std::ldexp(1.0, -14), cfg));
  }
}

TEST_CASE("theta_hat inherits doubling") {
  for (const Modulus& m : {Modulus::power(0.5, 1), Modulus::log_power(2, 1), sample_table()}) {
    double cth = 0, chat = 0;
    for (double r : ladder(2, 20)) {
      cth = std::max(cth, m(2 * r) / m(r));
      chat = std::max(chat, theta_hat(m, 2 * r) / theta_hat(m, r));
    }
    CHECK(chat <= cth + 1e-9);
  }
}

TEST_CASE("theta_sharp is Dini when theta is") {
  ModulusConfig cfg;
  Modulus m = Modulus::power(0.5, 1);
  double prev = -1;
  for (double b : ladder(1, 8)) {
    double v = sharp_dini_integral(m, b, cfg);
    CHECK(std::isfinite(v));
    if (prev >= 0) CHECK(v < prev);
    prev = v;
  }
  // beta < alpha: theta_sharp(t) = (t/R)^beta theta(R), integral beta^{-1} b^beta
  cfg.beta = 0.25;
  CHECK(sharp_dini_integral(m, 0.5, cfg) == doctest::Approx(std::pow(0.5, 0.25) / 0.25).epsilon(1e-9));
}

TEST_CASE("config validation and normalization") {
  ModulusConfig cfg;
  cfg.beta = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  NormalizationReport rep = check_normalization(Modulus::power(0.5, 0.02), 1.0 / 64);
  CHECK(rep.ok);
  CHECK(!check_normalization(Modulus::power(0.5, 1), 1.0).ok);
}
