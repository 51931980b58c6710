#include "qspec/eigh.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "qspec/errors.hpp"

extern "C" void zheev_(const char* jobz, const char* uplo, const int* n, std::complex<double>* a,
                       const int* lda, double* w, std::complex<double>* work, const int* lwork,
                       double* rwork, int* info);

namespace qspec {

std::vector<double> hermitian_eigenvalues(const std::vector<std::complex<double>>& a, int n,
                                          bool check_residual) {
  if (n <= 0 || a.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
    throw ValidationError("matrix", "expected a dense n*n buffer");

  // zheev works column-major; a Hermitian matrix equals the conjugate of
  // its transpose, and conjugation preserves (real) eigenvalues, so the
  // row-major buffer can be handed over as-is.
  std::vector<std::complex<double>> m = a;
  std::vector<double> w(static_cast<std::size_t>(n));
  std::vector<double> rwork(static_cast<std::size_t>(3 * n));
  const char jobz = check_residual ? 'V' : 'N';
  int info = 0, lwork = -1;
  std::complex<double> wkopt;
  zheev_(&jobz, "L", &n, m.data(), &n, w.data(), &wkopt, &lwork, rwork.data(), &info);
  lwork = static_cast<int>(wkopt.real());
  std::vector<std::complex<double>> work(static_cast<std::size_t>(lwork));
  zheev_(&jobz, "L", &n, m.data(), &n, w.data(), work.data(), &lwork, rwork.data(), &info);
  if (info != 0)
    throw NumericalError("zheev failed to converge (info=" + std::to_string(info) + ")");

  if (check_residual) {
    // m now holds eigenvectors of conj(A) = Aᵀ; v is an eigenvector of Aᵀ
    // iff conj(v) is one of A, with the same eigenvalue.
    double norm_a = 0.0;  // Frobenius norm, an upper bound for ‖A‖₂
    for (const auto& v : a) norm_a += std::norm(v);
    norm_a = std::sqrt(norm_a);
    for (int c = 0; c < n; ++c) {
      double res2 = 0.0;
      for (int r = 0; r < n; ++r) {
        std::complex<double> acc(0.0, 0.0);
        for (int k = 0; k < n; ++k)
          acc += a[static_cast<std::size_t>(r) * n + k] *
                 std::conj(m[static_cast<std::size_t>(c) * n + k]);
        acc -= w[static_cast<std::size_t>(c)] * std::conj(m[static_cast<std::size_t>(c) * n + r]);
        res2 += std::norm(acc);
      }
      if (std::sqrt(res2) > 1e-8 * std::max(norm_a, 1e-300))
        throw NumericalError("eigenpair residual exceeds 1e-8*|A| at index " + std::to_string(c));
    }
  }
  return w;
}

}  // namespace qspec
