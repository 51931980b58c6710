// Compares the OpenMP kernels against their serial reference paths:
// build_op_matrix vs build_op_matrix_direct, moyal_product vs
// moyal_product_direct. Prints a timing table and the agreement error.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qspec/weyl.hpp"

using namespace qspec;

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

double frob_diff(const std::vector<std::complex<double>>& a,
                 const std::vector<std::complex<double>>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP: disabled\n");
#endif

  PhaseFunction gauss;
  gauss.eval = [](double x, double xi) { return std::exp(-0.5 * (x * x + xi * xi)); };
  gauss.bound = 1.0;

  std::printf("\n%-28s %8s %12s %12s %10s\n", "kernel", "N", "parallel ms", "serial ms", "|diff|_F");
  for (int N : {32, 64, 128}) {
    Grid g = make_grid(8.0, N);
    double t0 = now_ms();
    OperatorMatrix fast = build_op_matrix(gauss, g, 1.0);
    double t1 = now_ms();
    OperatorMatrix direct = build_op_matrix_direct(gauss, g, 1.0, 1 << 20);
    double t2 = now_ms();
    std::printf("%-28s %8d %12.2f %12.2f %10.2e\n", "quantize (fft vs quadrature)", N, t1 - t0,
                t2 - t1, frob_diff(fast.entries, direct.entries));
  }
  {
    // Large-N scaling of the parallel path alone.
    for (int N : {512, 1024}) {
      Grid g = make_grid(8.0, N);
      double t0 = now_ms();
      OperatorMatrix fast = build_op_matrix(gauss, g, 1.0);
      double t1 = now_ms();
      std::printf("%-28s %8d %12.2f %12s %10s\n", "quantize (fft only)", N, t1 - t0, "-", "-");
      (void)fast;
    }
  }

  PhaseFunction g2;
  g2.eval = [](double x, double xi) {
    return std::exp(-0.5 * ((x - 0.4) * (x - 0.4) + (xi + 0.3) * (xi + 0.3)));
  };
  for (int N : {16, 32, 64}) {
    Grid g = make_grid(8.0, N);
    SampledSymbol a = sample_symbol(gauss, g, 1.0);
    SampledSymbol b = sample_symbol(g2, g, 1.0);
    double t0 = now_ms();
    SampledSymbol fast = moyal_product(a, b);
    double t1 = now_ms();
    SampledSymbol direct = moyal_product_direct(a, b, 1 << 10);
    double t2 = now_ms();
    std::printf("%-28s %8d %12.2f %12.2f %10.2e\n", "moyal (fft vs direct sum)", N, t1 - t0,
                t2 - t1, frob_diff(fast.values, direct.values));
  }
  for (int N : {256, 512}) {
    Grid g = make_grid(8.0, N);
    SampledSymbol a = sample_symbol(gauss, g, 1.0);
    SampledSymbol b = sample_symbol(g2, g, 1.0);
    double t0 = now_ms();
    SampledSymbol fast = moyal_product(a, b);
    double t1 = now_ms();
    std::printf("%-28s %8d %12.2f %12s %10s\n", "moyal (fft only)", N, t1 - t0, "-", "-");
    (void)fast;
  }
  return 0;
}
