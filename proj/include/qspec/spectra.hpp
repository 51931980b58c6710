#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qspec/dynamics.hpp"
#include "qspec/spectral_set.hpp"
#include "qspec/weyl.hpp"

namespace qspec {

/// Default SpectralSet resolution heuristic: 4 grid spacings (truncation
/// smears spectra at grid scale). Scenarios override it where acceptance
/// tolerances demand finer bookkeeping.
inline double default_resolution(const Grid& g) { return 4.0 * g.spacing; }

/// All N eigenvalues of a Hermitian operator matrix, ascending. With
/// check_residual the eigenpair backward error ‖Mv−λv‖ ≤ 1e−8‖M‖ is
/// verified (slower; used by tests).
SpectralSet eigen_spectrum(const OperatorMatrix& M, std::optional<double> resolution = std::nullopt,
                           bool check_residual = false);

/// Hausdorff distance between two non-empty finite sets: the max of the
/// two directed sup-inf distances, via sorted merge.
double hausdorff(const SpectralSet& S1, const SpectralSet& S2);

/// Merged sorted union at the coarsest resolution of the parts.
SpectralSet union_closure(const std::vector<SpectralSet>& parts);

/// Values inside `window` whose nearest other multiset element is farther
/// than `gap`. A value of multiplicity > 1 has a neighbor at distance 0
/// and is never isolated.
std::vector<double> isolated_eigenvalues(const SpectralSet& S, double gap,
                                         std::pair<double, double> window);

/// Stability filter parameters for the truncation ladder. The density
/// ratio test is exact integer arithmetic (count·N cross-products), so an
/// isolated simple eigenvalue survives an exact doubling of N.
struct StabilityOptions {
  double match_tol = 0.02;
  double density_window = 0.1;
  double resolution = 0.0;
};

struct StabilityDiagnostics {
  std::vector<double> discarded_unmatched;
  std::vector<double> discarded_density;
  std::vector<std::size_t> rung_sizes;
};

using MatrixBuilder = std::function<OperatorMatrix(double L, int N)>;

/// Numerical proxy for the essential spectrum: eigenvalues of the largest
/// rung that (a) have a nearest-neighbor match within match_tol on the
/// previous rung (greedy on sorted lists, each value used at most once)
/// and (b) whose local eigenvalue density is stable across the rungs
/// (ratio within [1/2, 2]).
SpectralSet truncation_stable_spectrum(const MatrixBuilder& builder,
                                       const std::vector<std::pair<double, int>>& ladder,
                                       const StabilityOptions& opt = {},
                                       StabilityDiagnostics* diag = nullptr);

/// Closure approximation of R_asy(F) = ∩_K closure F(Ξ∖K): sample circles
/// at the given radii; a value on circle k is kept when it is matched
/// within tol on circles k−1 and k−2; the union of kept values over all
/// stabilized circles is returned at resolution tol.
SpectralSet asymptotic_range(const PhaseFunction& F, const std::vector<double>& radii,
                             int samples_per_radius, double tol = 0.05);

struct EssOptions {
  std::optional<std::vector<std::pair<double, int>>> ladder;  // default: {(2L/3, N/2), (L, N)}
  StabilityOptions stability;
  // Window slack around the predicted range: wide enough for rung-matched
  // values to wander, narrow enough to exclude genuine discrete spectrum
  // that accumulates just outside the essential band.
  double window_margin = 0.02;
  double isolated_gap = 0.1;
  bool drop_isolated = true;
  double resolution = 0.01;
};

/// The algebraic prediction (quasi-orbit decomposition) side by side with
/// the numerical truncation-stability estimate.
struct EssentialSpectrumReport {
  SpectralSet predicted;
  SpectralSet numerical;
  double hausdorff_distance = 0.0;
  std::map<std::string, SpectralSet> per_suborbit;
  std::vector<std::string> method_notes;

  void write_csv(std::ostream& out) const;
};

/// First kind: union-close sp(H_{σ(F)}) over the declared covering of
/// E^n, in closed form for multiplication-operator sub-Hamiltonians and
/// via quantization otherwise. Second kind: the full sp(H_σ), flagged
/// purely essential. The numerical column is the truncation-stable
/// estimate restricted to the predicted window.
EssentialSpectrumReport predicted_ess_spectrum(const ActionSpec& a, const StatePoint& sigma,
                                               const StateSymbol& f, const Grid& grid, double hbar,
                                               const EssOptions& opt = {});

}  // namespace qspec
