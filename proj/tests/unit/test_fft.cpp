#include <doctest.h>

#include <complex>
#include <random>
#include <vector>

#include "qspec/errors.hpp"
#include "qspec/fft.hpp"

using namespace qspec;
using cplx = std::complex<double>;

namespace {

// Quadratic-cost reference transform.
std::vector<cplx> dft(const std::vector<cplx>& a, int sign) {
  const std::size_t n = a.size();
  std::vector<cplx> out(n, {0.0, 0.0});
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t m = 0; m < n; ++m)
      out[t] += a[m] * std::polar(1.0, sign * 2.0 * M_PI * double(m) * double(t) / double(n));
  return out;
}

}  // namespace

TEST_CASE("fft matches the naive transform in both orientations") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t n : {2u, 8u, 64u, 256u}) {
    for (int sign : {+1, -1}) {
      std::vector<cplx> a(n);
      for (auto& v : a) v = cplx(u(rng), u(rng));
      std::vector<cplx> want = dft(a, sign);
      std::vector<cplx> got = a;
      fft_pow2(got, sign);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-10 * double(n));
    }
  }
}

TEST_CASE("fft round trip and length validation") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> a(128);
  for (auto& v : a) v = cplx(u(rng), u(rng));
  std::vector<cplx> b = a;
  fft_pow2(b, +1);
  fft_pow2(b, -1);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(b[i] / 128.0 - a[i]) <= 1e-13);

  std::vector<cplx> bad(100);
  CHECK_THROWS_AS(fft_pow2(bad, +1), ValidationError);
}
