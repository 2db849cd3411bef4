#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace dini {

// Points and small matrices live on the stack; d never exceeds kMaxDim.
inline constexpr int kMaxDim = 6;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the operation's domain (negative radius, out-of-chart point, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Iterative procedure did not converge (Newton, CG, adaptive quadrature).
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Divergent improper integral (non-Dini modulus).
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Degenerate data: vanishing masses, rank-deficient fits.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Results that violate an internal contract (e.g. nonzero trace before odd extension).
class ContractError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

inline Vec unit_vector(int d, int axis) {
  Vec e = Vec::Zero(d);
  e(axis) = 1.0;
  return e;
}

}  // namespace dini
