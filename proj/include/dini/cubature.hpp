#pragma once

#include "dini/types.hpp"

#include <vector>

namespace dini {

struct Cubature {
  std::vector<Vec> points;
  std::vector<double> weights;
  std::size_t size() const { return points.size(); }
};

// Unit sphere S^{d-1}, d in {2, 3}. d = 2: 8 Gauss panels of 64 nodes (512 points).
// d = 3: Gauss in cos(polar angle) on each hemisphere times an azimuthal trapezoid.
// upper_only restricts to the hemisphere {x_d > 0}.
const Cubature& sphere_rule(int d, bool upper_only = false);

// Unit ball in polar form: Gauss radial nodes with weight r^{d-1} times sphere_rule.
Cubature ball_rule(int d, int radial_nodes, bool upper_only = false);

}  // namespace dini
