#pragma once

#include "dini/types.hpp"

namespace dini {

// Scalar field on R^d, extended by zero where level(X) <= 0.
class Field {
 public:
  virtual ~Field() = default;
  virtual int dim() const = 0;
  virtual double value(const Vec& X) const = 0;
  virtual Vec gradient(const Vec& X) const = 0;
  // > 0 inside the domain. Fields defined everywhere return +1.
  virtual double level(const Vec& X) const = 0;
  virtual void value_and_gradient(const Vec& X, double& v, Vec& g) const {
    v = value(X);
    g = gradient(X);
  }
};

}  // namespace dini
