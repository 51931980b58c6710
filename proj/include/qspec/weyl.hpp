#pragma once

#include <complex>
#include <string>
#include <vector>

#include "qspec/grid.hpp"
#include "qspec/phase_function.hpp"

namespace qspec {

/// Finite Hermitian section of Op^ħ(F) on a grid. Entries are row-major.
/// For real-valued F the matrix is returned symmetrized to (K+K†)/2 with
/// the pre-symmetrization defect recorded (max-abs entry of K−K†); a
/// complex F returns the raw matrix.
struct OperatorMatrix {
  std::vector<std::complex<double>> entries;
  Grid grid;
  double hbar = 1.0;
  double hermitian_defect = 0.0;
  std::string provenance;

  int size() const { return grid.N; }
  std::complex<double>& at(int j, int k) { return entries[static_cast<std::size_t>(j) * grid.N + k]; }
  const std::complex<double>& at(int j, int k) const {
    return entries[static_cast<std::size_t>(j) * grid.N + k];
  }
};

/// A symbol sampled over the phase grid: values[j*N + m] = f(x_j, ξ_m),
/// with ξ on the ħ-dependent dual grid.
struct SampledSymbol {
  std::vector<std::complex<double>> values;
  Grid grid;
  double hbar = 1.0;

  std::complex<double>& at(int j, int m) { return values[static_cast<std::size_t>(j) * grid.N + m]; }
  const std::complex<double>& at(int j, int m) const {
    return values[static_cast<std::size_t>(j) * grid.N + m];
  }
};

SampledSymbol sample_symbol(const PhaseFunction& F, const Grid& grid, double hbar);

/// Matrix of Op^ħ(F):
///   K_jk = (Δx·Δξ/2πħ) Σ_m F((x_j+x_k)/2, ξ_m) e^{i(x_j−x_k)ξ_m/ħ}
/// evaluated with one length-N transform per midpoint line (2N−1 lines at
/// half spacing), O(N² log N) total. Lines are processed in parallel with
/// disjoint output slices, so the result is independent of scheduling.
OperatorMatrix build_op_matrix(const PhaseFunction& F, const Grid& grid, double hbar);

/// Same quadrature evaluated by the naive serial triple loop; bit-for-bit
/// deterministic. The oracle the fast path is tested against. Cost grows
/// as N³, guarded by max_n.
OperatorMatrix build_op_matrix_direct(const PhaseFunction& F, const Grid& grid, double hbar,
                                      int max_n = 128);

/// Quantizes a sampled symbol under the same periodic band-limited
/// convention the deformed product uses: the trigonometric interpolant of
/// the samples is evaluated on the midpoint lines and fed through the
/// standard quadrature. Complex-valued input; no symmetrization.
OperatorMatrix build_op_matrix_from_samples(const SampledSymbol& S);

/// Plain dense product A·B (same grid and ħ).
OperatorMatrix matrix_product(const OperatorMatrix& A, const OperatorMatrix& B);

/// Spectral norm ‖M‖₂ = √λmax(M†M) by deterministic power iteration.
double operator_norm(const OperatorMatrix& M);

/// Deformed product f #^ħ g for the translation action, computed in the
/// Fourier domain as the twisted convolution
///   (f#g)^[r,q] = Σ_{p,s} f̂[p,s] ĝ[r−p,q−s] e^{−iπ(pq−rs)/N}
/// with centered frequency indices. Position space is periodic on the
/// sampled box (wrap-around boundary convention); in the frequency domain
/// the sum is the linear (non-aliased) convolution truncated to the
/// representable band. O(N³) accumulation parallelized over output rows.
SampledSymbol moyal_product(const SampledSymbol& f, const SampledSymbol& g);

/// The same twisted convolution summed directly, O(N⁴), serial reference.
SampledSymbol moyal_product_direct(const SampledSymbol& f, const SampledSymbol& g, int max_n = 64);

/// Poisson bracket {f,g} = ∂_x f·∂_ξ g − ∂_ξ f·∂_x g by 4th-order central
/// differences with periodic wrap. The orientation is the one fixed by the
/// commutator calibration [Op(x),Op(ξ)] = iħ·Id, so that
/// f #^ħ g = f·g + (iħ/2){f,g} + O(ħ²).
SampledSymbol poisson_bracket(const SampledSymbol& f, const SampledSymbol& g);

/// ‖(M−ζ)⁻¹‖ = 1/dist(ζ, sp(M)) for Hermitian M and Im ζ ≠ 0.
double resolvent_norm(const OperatorMatrix& M, std::complex<double> zeta);

/// Max-abs entry of M − M†.
double hermitian_defect_of(const std::vector<std::complex<double>>& entries, int n);

/// Writes the matrix as CSV, row-major, one "re,im" pair per entry
/// (the --dump-matrix debug format).
void write_matrix_csv(const OperatorMatrix& M, std::ostream& out);

}  // namespace qspec
