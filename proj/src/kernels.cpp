#include "dini/kernels.hpp"

#include <omp.h>

#include <cmath>

namespace dini::kernels {

int max_threads() { return omp_get_max_threads(); }

void apply(const StencilMatrix& A, const double* x, double* y, Exec ex) {
  const int w = A.width;
  auto row = [&](std::size_t i) {
    double s = 0.0;
    const std::int32_t* nb = &A.nbr[i * w];
    const double* c = &A.coef[i * w];
    for (int k = 0; k < w; ++k)
      if (nb[k] >= 0) s += c[k] * x[nb[k]];
    y[i] = s;
  };
  if (ex == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(A.rows); ++i) row(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < A.rows; ++i) row(i);
  }
}

namespace {

template <class F>
double blocked(std::size_t n, F&& term, Exec ex) {
  std::size_t nb = (n + kBlock - 1) / kBlock;
  std::vector<double> part(nb, 0.0);
  auto block = [&](std::size_t b) {
    double s = 0.0;
    std::size_t end = std::min(n, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) s += term(i);
    part[b] = s;
  };
  if (ex == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) block(static_cast<std::size_t>(b));
  } else {
    for (std::size_t b = 0; b < nb; ++b) block(b);
  }
  double s = 0.0;
  for (double p : part) s += p;
  return s;
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n, Exec ex) {
  return blocked(n, [&](std::size_t i) { return a[i] * b[i]; }, ex);
}

double block_sum(const double* v, std::size_t n, Exec ex) {
  return blocked(n, [&](std::size_t i) { return v[i]; }, ex);
}

void axpy(double a, const double* x, double* y, std::size_t n, Exec ex) {
  if (ex == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) y[i] += a * x[i];
  } else {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
  }
}

void xpay(const double* x, double a, double* y, std::size_t n, Exec ex) {
  if (ex == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) y[i] = x[i] + a * y[i];
  } else {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + a * y[i];
  }
}

void scale(const double* d, const double* r, double* z, std::size_t n, Exec ex) {
  if (ex == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) z[i] = d[i] * r[i];
  } else {
    for (std::size_t i = 0; i < n; ++i) z[i] = d[i] * r[i];
  }
}

CgResult conjugate_gradient(const StencilMatrix& A, const std::vector<double>& b, std::vector<double>& x, double tol,
                            int max_iter, Exec ex) {
  std::size_t n = A.rows;
  CgResult res;
  x.resize(n, 0.0);
  std::vector<double> r(n), z(n), p(n), q(n), dinv(n);
  for (std::size_t i = 0; i < n; ++i) dinv[i] = 1.0 / A.diag[i];
  apply(A, x.data(), q.data(), ex);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
  double bnorm = std::sqrt(dot(b.data(), b.data(), n, ex));
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    res.converged = true;
    return res;
  }
  scale(dinv.data(), r.data(), z.data(), n, ex);
  p = z;
  double rz = dot(r.data(), z.data(), n, ex);
  for (int it = 1; it <= max_iter; ++it) {
    apply(A, p.data(), q.data(), ex);
    double alpha = rz / dot(p.data(), q.data(), n, ex);
    axpy(alpha, p.data(), x.data(), n, ex);
    axpy(-alpha, q.data(), r.data(), n, ex);
    double rn = std::sqrt(dot(r.data(), r.data(), n, ex));
    res.iterations = it;
    res.relative_residual = rn / bnorm;
    if (res.relative_residual <= tol) {
      res.converged = true;
      return res;
    }
    scale(dinv.data(), r.data(), z.data(), n, ex);
    double rz_new = dot(r.data(), z.data(), n, ex);
    xpay(z.data(), rz_new / rz, p.data(), n, ex);
    rz = rz_new;
  }
  return res;
}

}  // namespace dini::kernels
