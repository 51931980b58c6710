#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "qspec/errors.hpp"

namespace qspec {

/// A point X = (x, ξ) of the phase space Ξ = ℝ²ⁿ. Dimension n ≥ 1; the
/// quantization engine only accepts n = 1, the dynamics layer is generic.
struct PhasePoint {
  std::vector<double> x;
  std::vector<double> xi;

  PhasePoint() = default;
  PhasePoint(std::vector<double> x_, std::vector<double> xi_)
      : x(std::move(x_)), xi(std::move(xi_)) {
    if (x.size() != xi.size() || x.empty())
      throw ValidationError("PhasePoint", "x and xi must have equal length n >= 1");
    for (double v : x)
      if (!std::isfinite(v)) throw ValidationError("PhasePoint.x", "entries must be finite");
    for (double v : xi)
      if (!std::isfinite(v)) throw ValidationError("PhasePoint.xi", "entries must be finite");
  }
  /// n = 1 convenience.
  PhasePoint(double x1, double xi1) : PhasePoint(std::vector<double>{x1}, std::vector<double>{xi1}) {}

  std::size_t dim() const noexcept { return x.size(); }

  PhasePoint operator+(const PhasePoint& o) const {
    if (dim() != o.dim()) throw ValidationError("PhasePoint", "dimension mismatch");
    PhasePoint r = *this;
    for (std::size_t i = 0; i < dim(); ++i) {
      r.x[i] += o.x[i];
      r.xi[i] += o.xi[i];
    }
    return r;
  }
};

/// Canonical symplectic form [[X,Y]] = x·η − y·ξ. Antisymmetric, bilinear.
inline double symplectic_form(const PhasePoint& X, const PhasePoint& Y) {
  if (X.dim() != Y.dim()) throw ValidationError("symplectic_form", "dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < X.dim(); ++i) s += X.x[i] * Y.xi[i] - Y.x[i] * X.xi[i];
  return s;
}

}  // namespace qspec
