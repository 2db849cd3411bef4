// Serial reference against OpenMP for the hot kernels. Both paths give bit-identical results.
#include "dini/fields.hpp"
#include "dini/frequency.hpp"
#include "dini/kernels.hpp"
#include "dini/solver.hpp"

#include <benchmark/benchmark.h>

#include <memory>

using namespace dini;

namespace {

kernels::Exec mode(const benchmark::State& s) { return s.range(0) ? kernels::Exec::parallel : kernels::Exec::serial; }

// 5-point Laplacian on an n x n grid with Dirichlet rows removed.
kernels::StencilMatrix laplacian(int n) {
  kernels::StencilMatrix A;
  A.width = 4;
  A.rows = static_cast<std::size_t>(n) * n;
  A.nbr.assign(A.rows * 4, -1);
  A.coef.assign(A.rows * 4, 0.0);
  A.diag.assign(A.rows, 4.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::size_t r = static_cast<std::size_t>(i) * n + j;
      int k = 0;
      for (auto [di, dj] : {std::pair{-1, 0}, {1, 0}, {0, -1}, {0, 1}}) {
        int a = i + di, b = j + dj;
        if (a >= 0 && a < n && b >= 0 && b < n) {
          A.nbr[r * 4 + k] = static_cast<std::int32_t>(a * n + b);
          A.coef[r * 4 + k] = -1.0;
        }
        ++k;
      }
    }
  return A;
}

void BM_StencilApply(benchmark::State& state) {
  auto A = laplacian(512);
  std::vector<double> x(A.rows, 1.0), y(A.rows);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.001 * i);
  for (auto _ : state) {
    kernels::apply(A, x.data(), y.data(), mode(state));
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(A.rows));
}

void BM_Dot(benchmark::State& state) {
  std::vector<double> a(1 << 20), b(1 << 20);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = b[i] = std::cos(1e-3 * i);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::dot(a.data(), b.data(), a.size(), mode(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(a.size()));
}

void BM_ConjugateGradient(benchmark::State& state) {
  auto A = laplacian(128);
  std::vector<double> b(A.rows, 1.0);
  for (auto _ : state) {
    std::vector<double> x(A.rows, 0.0);
    auto r = kernels::conjugate_gradient(A, b, x, 1e-8, 100000, mode(state));
    benchmark::DoNotOptimize(r.iterations);
  }
}

void BM_AssembleOperator(benchmark::State& state) {
  GraphDomain dom = GraphDomain::from(GraphFunction::power(2, 0.02, 0.5));
  FlattenChart chart(dom, Vec::Zero(1), 1.0);
  GridSpec g = GridSpec::half_ball(2, 1.0, 1.0 / 128);
  CoefficientGrid coeffs(chart, g);
  for (auto _ : state) {
    Operator op = assemble_operator(coeffs, mode(state));
    benchmark::DoNotOptimize(op.coef.data());
  }
}

void BM_FrequencyCurve(benchmark::State& state) {
  Polynomial t = Polynomial::coordinate(3, 2), x = Polynomial::coordinate(3, 0), y = Polynomial::coordinate(3, 1);
  PolynomialField u((x + y) * t, true);
  std::vector<double> radii = {0.2, 0.1, 0.05, 0.025};
  Vec c = Vec::Zero(3);
  for (auto _ : state) {
    auto fc = frequency_curve(u, c, radii, Modulus::zero(), ModulusConfig{}, mode(state));
    benchmark::DoNotOptimize(fc.N.data());
  }
}

}  // namespace

BENCHMARK(BM_StencilApply)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Dot)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ConjugateGradient)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleOperator)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FrequencyCurve)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
