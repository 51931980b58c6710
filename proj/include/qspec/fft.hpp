#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace qspec {

/// In-place radix-2 transform of a power-of-two length vector:
///   a[t] <- Σ_m a[m] · e^{sign · 2πi·m·t/N}
/// Unnormalized; sign = +1 is the synthesis orientation used by the
/// quantization kernels, sign = −1 the analysis one. Pure function of its
/// input, no global state, safe to call concurrently.
void fft_pow2(std::complex<double>* a, std::size_t n, int sign);

inline void fft_pow2(std::vector<std::complex<double>>& a, int sign) {
  fft_pow2(a.data(), a.size(), sign);
}

}  // namespace qspec
