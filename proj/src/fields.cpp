#include "dini/fields.hpp"

namespace dini {

double UnflattenedField::value(const Vec& X) const {
  Vec Y = chart_.unflatten(X);
  if (Y(dim() - 1) <= 0) return 0.0;
  return v_->value(Y);
}

void UnflattenedField::value_and_gradient(const Vec& X, double& v, Vec& g) const {
  int d = dim();
  Vec Y = chart_.unflatten(X);
  if (Y(d - 1) <= 0) {
    v = 0.0;
    g = Vec::Zero(d);
    return;
  }
  Vec gy;
  v_->value_and_gradient(Y, v, gy);
  // D_Y X = O^T [[I, 0], [grad phi_tilde^T, 1]]
  Vec G = chart_.tilde_phi_grad(Y.head(d - 1));
  Vec w = gy;
  w.head(d - 1) -= G * gy(d - 1);
  g = chart_.frame().O().transpose() * w;
}

Vec UnflattenedField::gradient(const Vec& X) const {
  double v;
  Vec g;
  value_and_gradient(X, v, g);
  return g;
}

}  // namespace dini
