#pragma once

#include <complex>
#include <vector>

namespace qspec {

/// All eigenvalues of an N×N complex Hermitian matrix (dense, LAPACK
/// zheev), ascending. `a` is row-major and is not modified. With
/// `check_residual` the eigenvectors are computed too and the backward
/// error ‖Av − λv‖ ≤ 1e−8·‖A‖ is enforced for every pair.
std::vector<double> hermitian_eigenvalues(const std::vector<std::complex<double>>& a, int n,
                                          bool check_residual = false);

}  // namespace qspec
