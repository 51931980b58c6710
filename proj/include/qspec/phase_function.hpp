#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>

namespace qspec {

/// An evaluable function on the phase plane Ξ = ℝ² (n = 1), the form the
/// quantization engine consumes. Typically a pullback f∘Θ_σ of a state-space
/// symbol, or a parsed expression. `bound` is the declared sup-norm bound;
/// the engine rejects samples that exceed it.
struct PhaseFunction {
  std::function<std::complex<double>(double x, double xi)> eval;
  bool real_valued = true;
  std::optional<double> bound;
  std::string provenance;

  std::complex<double> operator()(double x, double xi) const { return eval(x, xi); }
};

}  // namespace qspec
