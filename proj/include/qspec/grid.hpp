#pragma once

#include <cmath>
#include <vector>

#include "qspec/errors.hpp"

namespace qspec {

/// Uniform discretization of the configuration line [−L, L) together with
/// its ħ-dependent dual (Nyquist) grid. N is a power of two so the length-N
/// transforms in the quantization kernels stay radix-2.
///
/// Dual nodes at ħ: ξ_m = −πħ/Δx + m·Δξ with Δξ = 2πħ/(N·Δx). They satisfy
/// the discrete orthogonality Σ_m e^{i(x_j−x_k)ξ_m/ħ} = N·δ_jk, which makes
/// multiplication symbols quantize to exactly diagonal matrices.
struct Grid {
  double L = 0.0;
  int N = 0;
  double spacing = 0.0;

  double node(int j) const { return -L + j * spacing; }
  std::vector<double> nodes() const {
    std::vector<double> v(static_cast<std::size_t>(N));
    for (int j = 0; j < N; ++j) v[static_cast<std::size_t>(j)] = node(j);
    return v;
  }

  double dual_spacing(double hbar) const { return 2.0 * M_PI * hbar / (N * spacing); }
  double dual_node(int m, double hbar) const {
    return -M_PI * hbar / spacing + m * dual_spacing(hbar);
  }
  std::vector<double> dual_nodes(double hbar) const {
    std::vector<double> v(static_cast<std::size_t>(N));
    for (int m = 0; m < N; ++m) v[static_cast<std::size_t>(m)] = dual_node(m, hbar);
    return v;
  }

  /// Midpoints (x_j + x_k)/2 lie on the half-spacing lattice; there are
  /// 2N−1 of them, indexed by s = j + k.
  double midpoint(int s) const { return -L + 0.5 * s * spacing; }

  bool operator==(const Grid& o) const { return L == o.L && N == o.N; }
};

inline bool is_power_of_two(long long n) { return n > 0 && (n & (n - 1)) == 0; }

inline Grid make_grid(double L, int N) {
  if (!(L > 0.0) || !std::isfinite(L)) throw ValidationError("L", "grid half-width L must be positive");
  if (N < 8) throw ValidationError("N", "grid size N must be at least 8");
  if (!is_power_of_two(N)) throw ValidationError("N", "grid size N must be a power of two");
  Grid g;
  g.L = L;
  g.N = N;
  g.spacing = 2.0 * L / N;
  return g;
}

}  // namespace qspec
