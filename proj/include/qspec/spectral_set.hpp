#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "qspec/errors.hpp"

namespace qspec {

/// A finite multiset of real spectral values with a resolution ε: values
/// closer than ε count as the same point when sets are merged or unioned.
/// The stored list itself is kept at full precision, sorted ascending.
class SpectralSet {
 public:
  SpectralSet() = default;

  SpectralSet(std::vector<double> values, double resolution) : values_(std::move(values)), resolution_(resolution) {
    if (resolution_ < 0.0) throw ValidationError("resolution", "resolution must be >= 0");
    for (double v : values_)
      if (!std::isfinite(v)) throw ValidationError("values", "spectral values must be finite");
    std::sort(values_.begin(), values_.end());
  }

  const std::vector<double>& values() const noexcept { return values_; }
  double resolution() const noexcept { return resolution_; }
  bool empty() const noexcept { return values_.empty(); }
  std::size_t size() const noexcept { return values_.size(); }
  double min() const { return values_.front(); }
  double max() const { return values_.back(); }

  /// Collapses runs of values within ε of the previously kept one. Greedy
  /// left-to-right, so the result has consecutive gaps > ε and re-merging
  /// is a no-op (idempotent).
  SpectralSet merged() const {
    if (values_.empty() || resolution_ == 0.0) return *this;
    std::vector<double> out;
    out.reserve(values_.size());
    for (double v : values_) {
      if (out.empty() || v - out.back() > resolution_) out.push_back(v);
    }
    return SpectralSet(std::move(out), resolution_);
  }

 private:
  std::vector<double> values_;
  double resolution_ = 0.0;
};

}  // namespace qspec
