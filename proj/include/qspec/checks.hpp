#pragma once

#include <string>
#include <vector>

namespace qspec::checks {

// The single versioned table of acceptance thresholds. The CLI --check
// flag and the acceptance suite both read these; nothing else defines
// numeric pass/fail bounds.

inline constexpr double kOracleEquivalenceFrob = 1e-10;  // 1: fast vs direct builder, Frobenius
inline constexpr double kMorphismRelError = 1e-3;        // 2: Op(f#g) vs Op(f)Op(g), relative
inline constexpr double kExpansionShrink = 3.5;          // 3: O(hbar^2) remainder decay per halving
inline constexpr double kOffDiagonalNorm = 1e-12;        // 4: multiplication symbols, off-diag max
inline constexpr double kDiagonalError = 1e-12;          // 4: diagonal vs sampled multiplier
inline constexpr double kTranslateHausdorff = 5e-2;      // 5: sp(Op F) vs sp(Op F∘T_Z)
inline constexpr double kInclusionTol = 5e-2;            // 6: quantum-plane spectral inclusion
inline constexpr double kEssHausdorff = 5e-2;            // 7, 9: predicted vs stable estimate
inline constexpr double kVoRadialBand = 0.1;             // 8: distance of bulk values to the limit
inline constexpr int kVoRadialCountSlack = 2;            // 8: interior count stability across rungs
inline constexpr double kPairwiseHausdorff = 5e-2;       // 10, 12: equi-spectrality across points
inline constexpr double kIsolatedGap = 0.1;              // 10, 12: second-kind voidness gap
inline constexpr double kSweepFinalDistance = 0.1;       // 11: d_to_classical at the last rung
inline constexpr double kSweepMaxIncrease = 0.02;        // 11: predecessor-to-successor slack
inline constexpr double kTorusAverageBound = 0.02;       // 13: torus monomial ball average at R=200
inline constexpr double kGaussAverageBound = 1e-3;       // 13: decaying symbol average at R=100

struct CheckResult {
  int criterion = 0;
  std::string name;
  bool pass = false;
  double value = 0.0;
  double bound = 0.0;
  std::string detail;
};

std::string format_result(const CheckResult& r);

}  // namespace qspec::checks
