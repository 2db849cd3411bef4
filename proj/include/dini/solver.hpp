#pragma once

#include "dini/field.hpp"
#include "dini/geometry.hpp"
#include "dini/hhp.hpp"
#include "dini/kernels.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace dini {

using Index = std::array<int, kMaxDim>;

// Nodes j*h with j_i in [-M, M]; the last index starts at 0 unless `full`.
struct GridSpec {
  int d = 2;
  double h = 1.0 / 64;
  int M = 64;
  bool full = false;

  static GridSpec half_ball(int d, double R, double h);
  double R() const { return M * h; }
  int lo(int axis) const { return (axis == d - 1 && !full) ? 0 : -M; }
  int count(int axis) const { return M - lo(axis) + 1; }
  std::size_t nodes() const;
  std::size_t index(const Index& j) const;
  Index unindex(std::size_t k) const;
  Vec position(const Index& j) const;
  bool contains(const Index& j) const;
};

enum NodeType : std::uint8_t { kOutside = 0, kBoundary = 1, kInterior = 2 };

// Node values on a masked Cartesian grid over B_R (or its upper half), multilinear in between.
// Half grids with zero trace on {s = 0} are evaluated at s < 0 through odd reflection.
class DiscreteField : public Field {
 public:
  DiscreteField() = default;
  explicit DiscreteField(GridSpec g);

  GridSpec grid;
  std::vector<double> values;
  std::vector<std::uint8_t> type;
  bool odd_reflect = false;

  int dim() const override { return grid.d; }
  double value(const Vec& Y) const override;
  Vec gradient(const Vec& Y) const override;
  double level(const Vec& Y) const override;
  bool in_hull(const Vec& Y) const;
  double node(const Index& j) const { return values[grid.index(j)]; }
  double max_abs() const;

 private:
  bool locate(const Vec& Y, Index& cell, Vec& frac) const;
  double interpolate(const Vec& Y) const;
};

using PointFn = std::function<double(const Vec&)>;

struct SolveOptions {
  double R = 1.0;
  double h = 1.0 / 64;
  PointFn bc;           // data on the curved part (flattened coordinates)
  PointFn flat_bc;      // data on {s = 0}; empty means zero
  double cg_tol = 1e-10;
  int max_iter = 200000;
  kernels::Exec exec = kernels::Exec::parallel;
};

struct SolveStats {
  int iterations = 0;
  double cg_residual = 0;
  double scaled_residual = 0;
  std::size_t unknowns = 0;
};

struct SolveResult {
  DiscreteField field;
  SolveStats stats;
};

// Coefficient samples at the tensor Gauss points of the grid cells.
class CoefficientGrid {
 public:
  CoefficientGrid(const FlattenChart& chart, const GridSpec& grid);
  // A at Gauss point `q` (bitmask over axes) of the cell with lower corner j.
  Mat at(const Index& cell, int q, Side side) const;
  const GridSpec& grid() const { return grid_; }

 private:
  GridSpec grid_;
  bool flat_ = false;
  int per_axis_ = 0;
  std::vector<Vec> grads_;  // grad phi_tilde at tensor Gauss y-positions
};

// Stencil rows of the Q1 finite-element operator -div(A grad .) at every node with an active adjacent cell.
struct Operator {
  GridSpec grid;
  std::vector<std::uint8_t> type;
  std::vector<double> coef;  // nodes * 3^d
};

Operator assemble_operator(const CoefficientGrid& coeffs, kernels::Exec ex = kernels::Exec::parallel);
double apply_row(const Operator& op, const std::vector<double>& values, std::size_t node);

SolveResult solve_dirichlet(const FlattenChart& chart, const SolveOptions& opt);

// Samples of a harmonic polynomial on a grid; throws DomainError if p is not harmonic.
DiscreteField exact_field(const Polynomial& p, const GridSpec& grid);

// Odd extension to the full ball; throws ContractError when the trace on {s = 0} is not zero.
DiscreteField extend_odd(const DiscreteField& f, double trace_tol = 1e-12);

// max |residual| / (diag * max|v|) over interior nodes of the field's grid.
double scaled_residual(const DiscreteField& f, const FlattenChart& chart);
// Same, restricted to nodes on {s = 0} of an odd-extended field.
double interface_residual(const DiscreteField& ext, const FlattenChart& chart);
// v^T K v over the active cells (the discrete Dirichlet energy with coefficient A).
double discrete_energy(const DiscreteField& f, const FlattenChart& chart);

struct SupProfile {
  std::vector<double> radii;
  std::vector<double> sup;      // sup over nodes in B_r
  std::vector<double> annulus;  // sup over nodes in B_r minus B_{r/2}
};

SupProfile sup_profile(const DiscreteField& f, const std::vector<double>& radii);
// Integral of v^2 over B_r (upper half for half grids) by polar Gauss quadrature of the interpolant.
double l2_ball(const Field& f, double r, bool upper_half, int radial_nodes = 32);

}  // namespace dini
