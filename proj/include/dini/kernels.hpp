#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace dini::kernels {

// serial is the reference implementation; parallel uses OpenMP. Both give
// bit-identical results: reductions go through fixed-size blocks summed in order.
enum class Exec { serial, parallel };

inline constexpr std::size_t kBlock = 2048;

// Fixed-width sparse matrix: row i has `width` slots; nbr = -1 marks an empty slot.
struct StencilMatrix {
  int width = 0;
  std::size_t rows = 0;
  std::vector<std::int32_t> nbr;
  std::vector<double> coef;
  std::vector<double> diag;
};

void apply(const StencilMatrix& A, const double* x, double* y, Exec ex);
double dot(const double* a, const double* b, std::size_t n, Exec ex);
// y += a x
void axpy(double a, const double* x, double* y, std::size_t n, Exec ex);
// y = x + a y
void xpay(const double* x, double a, double* y, std::size_t n, Exec ex);
// z = d .* r
void scale(const double* d, const double* r, double* z, std::size_t n, Exec ex);

// Sum of v[0..n) through the same blocked order as dot.
double block_sum(const double* v, std::size_t n, Exec ex);

// Evaluate f(i) for i in [0, n) into out (parallel over i when requested).
template <class F>
void evaluate_all(std::size_t n, F&& f, double* out, Exec ex) {
  if (ex == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) out[i] = f(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
  }
}

struct CgResult {
  int iterations = 0;
  double relative_residual = 0;
  bool converged = false;
};

// Jacobi-preconditioned conjugate gradients for SPD A, starting from x.
CgResult conjugate_gradient(const StencilMatrix& A, const std::vector<double>& b, std::vector<double>& x, double tol,
                            int max_iter, Exec ex);

int max_threads();

}  // namespace dini::kernels
