#pragma once

#include "dini/field.hpp"
#include "dini/geometry.hpp"
#include "dini/hhp.hpp"

#include <memory>

namespace dini {

// Exact polynomial fixture; with half_space it lives on {x_d > 0} and is zero below.
class PolynomialField : public Field {
 public:
  PolynomialField(Polynomial p, bool half_space) : p_(std::move(p)), half_(half_space) {}
  int dim() const override { return p_.dim(); }
  double value(const Vec& X) const override { return level(X) > 0 ? p_(X) : 0.0; }
  Vec gradient(const Vec& X) const override { return level(X) > 0 ? p_.gradient(X) : Vec(Vec::Zero(dim())); }
  double level(const Vec& X) const override { return half_ ? X(dim() - 1) : 1.0; }
  const Polynomial& polynomial() const { return p_; }

 private:
  Polynomial p_;
  bool half_;
};

// u = v o (flattening)^{-1}: a field given in flattened coordinates viewed in the original ones.
// Zero below the graph.
class UnflattenedField : public Field {
 public:
  UnflattenedField(FlattenChart chart, std::shared_ptr<const Field> v) : chart_(std::move(chart)), v_(std::move(v)) {}
  int dim() const override { return chart_.dim(); }
  double value(const Vec& X) const override;
  Vec gradient(const Vec& X) const override;
  void value_and_gradient(const Vec& X, double& v, Vec& g) const override;
  double level(const Vec& X) const override { return chart_.unflatten(X)(dim() - 1); }
  const FlattenChart& chart() const { return chart_; }
  const Field& flat() const { return *v_; }

 private:
  FlattenChart chart_;
  std::shared_ptr<const Field> v_;
};

}  // namespace dini
