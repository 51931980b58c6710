#include "qspec/weyl.hpp"

#include <cmath>
#include <ostream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qspec/eigh.hpp"
#include "qspec/errors.hpp"
#include "qspec/fft.hpp"

namespace qspec {

namespace {

void validate_hbar(double hbar) {
  if (!(hbar > 0.0) || hbar > 1.0 || !std::isfinite(hbar))
    throw ValidationError("hbar", "hbar must lie in (0, 1]");
}

void check_bounded(const PhaseFunction& F, std::complex<double> v, double x, double xi) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw NumericalError("symbol sample is not finite at (" + std::to_string(x) + ", " +
                         std::to_string(xi) + ")");
  if (F.bound && std::abs(v) > *F.bound * (1.0 + 1e-12) + 1e-12)
    throw NumericalError("unbounded sample detected: |F(" + std::to_string(x) + ", " +
                         std::to_string(xi) + ")| = " + std::to_string(std::abs(v)) +
                         " exceeds declared bound " + std::to_string(*F.bound));
}

// Accumulates the first exception thrown inside a parallel region.
struct ParallelGuard {
  bool failed = false;
  std::string message;
  bool numerical = false;

  void capture() {
    try {
      throw;
    } catch (const NumericalError& e) {
#pragma omp critical(qspec_parallel_guard)
      if (!failed) {
        failed = true;
        numerical = true;
        message = e.what();
      }
    } catch (const std::exception& e) {
#pragma omp critical(qspec_parallel_guard)
      if (!failed) {
        failed = true;
        message = e.what();
      }
    }
  }
  void rethrow() const {
    if (!failed) return;
    if (numerical) throw NumericalError(message);
    throw NumericalError(message);
  }
};

int mod_pos(int v, int m) { return ((v % m) + m) % m; }

}  // namespace

double hermitian_defect_of(const std::vector<std::complex<double>>& entries, int n) {
  double defect = 0.0;
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k) {
      std::complex<double> d = entries[static_cast<std::size_t>(j) * n + k] -
                               std::conj(entries[static_cast<std::size_t>(k) * n + j]);
      defect = std::max(defect, std::abs(d));
    }
  return defect;
}

SampledSymbol sample_symbol(const PhaseFunction& F, const Grid& grid, double hbar) {
  validate_hbar(hbar);
  SampledSymbol s;
  s.grid = grid;
  s.hbar = hbar;
  const int N = grid.N;
  s.values.resize(static_cast<std::size_t>(N) * N);
  ParallelGuard guard;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < N; ++j) {
    if (guard.failed) continue;
    try {
      double x = grid.node(j);
      for (int m = 0; m < N; ++m) {
        double xi = grid.dual_node(m, hbar);
        std::complex<double> v = F.eval(x, xi);
        check_bounded(F, v, x, xi);
        s.at(j, m) = v;
      }
    } catch (...) {
      guard.capture();
    }
  }
  guard.rethrow();
  return s;
}

OperatorMatrix build_op_matrix(const PhaseFunction& F, const Grid& grid, double hbar) {
  validate_hbar(hbar);
  const int N = grid.N;
  const int lines = 2 * N - 1;

  // One synthesis transform per midpoint line s = j + k:
  //   ghat_s[t] = Σ_m F(mid_s, ξ_m) e^{+2πi·m·t/N},
  // so that K_jk = (1/N)·(−1)^{j−k}·ghat_{j+k}[(j−k) mod N]. The 1/N is
  // the quadrature weight Δx·Δξ/(2πħ) on the Nyquist dual grid.
  std::vector<std::complex<double>> ghat(static_cast<std::size_t>(lines) * N);
  ParallelGuard guard;
#pragma omp parallel for schedule(static)
  for (int s = 0; s < lines; ++s) {
    if (guard.failed) continue;
    try {
      std::complex<double>* row = ghat.data() + static_cast<std::size_t>(s) * N;
      const double mid = grid.midpoint(s);
      for (int m = 0; m < N; ++m) {
        double xi = grid.dual_node(m, hbar);
        std::complex<double> v = F.eval(mid, xi);
        check_bounded(F, v, mid, xi);
        row[m] = v;
      }
      fft_pow2(row, static_cast<std::size_t>(N), +1);
    } catch (...) {
      guard.capture();
    }
  }
  guard.rethrow();

  OperatorMatrix M;
  M.grid = grid;
  M.hbar = hbar;
  M.provenance = F.provenance;
  M.entries.resize(static_cast<std::size_t>(N) * N);
  const double weight = 1.0 / N;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < N; ++j) {
    for (int k = 0; k < N; ++k) {
      int d = j - k;
      const std::complex<double>& g = ghat[static_cast<std::size_t>(j + k) * N + mod_pos(d, N)];
      M.entries[static_cast<std::size_t>(j) * N + k] = ((d & 1) ? -weight : weight) * g;
    }
  }

  M.hermitian_defect = hermitian_defect_of(M.entries, N);
  if (F.real_valued) {
    for (int j = 0; j < N; ++j)
      for (int k = j; k < N; ++k) {
        std::complex<double> h = 0.5 * (M.at(j, k) + std::conj(M.at(k, j)));
        M.at(j, k) = h;
        M.at(k, j) = std::conj(h);
      }
  }
  return M;
}

OperatorMatrix build_op_matrix_direct(const PhaseFunction& F, const Grid& grid, double hbar,
                                      int max_n) {
  validate_hbar(hbar);
  const int N = grid.N;
  if (N > max_n)
    throw ValidationError("N", "direct quadrature is guarded to N <= " + std::to_string(max_n));

  OperatorMatrix M;
  M.grid = grid;
  M.hbar = hbar;
  M.provenance = F.provenance + " (direct quadrature)";
  M.entries.resize(static_cast<std::size_t>(N) * N);
  const double weight = grid.spacing * grid.dual_spacing(hbar) / (2.0 * M_PI * hbar);
  for (int j = 0; j < N; ++j) {
    for (int k = 0; k < N; ++k) {
      const double mid = grid.midpoint(j + k);
      const double dx = grid.node(j) - grid.node(k);
      std::complex<double> acc(0.0, 0.0);
      for (int m = 0; m < N; ++m) {
        double xi = grid.dual_node(m, hbar);
        std::complex<double> v = F.eval(mid, xi);
        check_bounded(F, v, mid, xi);
        acc += v * std::polar(1.0, dx * xi / hbar);
      }
      M.at(j, k) = weight * acc;
    }
  }

  M.hermitian_defect = hermitian_defect_of(M.entries, N);
  if (F.real_valued) {
    for (int j = 0; j < N; ++j)
      for (int k = j; k < N; ++k) {
        std::complex<double> h = 0.5 * (M.at(j, k) + std::conj(M.at(k, j)));
        M.at(j, k) = h;
        M.at(k, j) = std::conj(h);
      }
  }
  return M;
}

// ---------------------------------------------------------------------------
// Deformed product

namespace {

// Centered 2D spectrum: fhat[(s+N/2)*N + (p+N/2)] is the coefficient of
// e^{i(a_p x + α_s ξ)}, a_p = πp/L, α_s = p·Δx/ħ-scaled dual frequency.
// Derived from the node phases: e^{i a_p x_j} = (−1)^p e^{2πi pj/N}.
std::vector<std::complex<double>> analyze(const SampledSymbol& f) {
  const int N = f.grid.N;
  std::vector<std::complex<double>> work = f.values;
  // Transform rows (m index) then columns (j index), sign −1.
  for (int j = 0; j < N; ++j) fft_pow2(work.data() + static_cast<std::size_t>(j) * N, N, -1);
  std::vector<std::complex<double>> col(static_cast<std::size_t>(N));
  for (int m = 0; m < N; ++m) {
    for (int j = 0; j < N; ++j) col[static_cast<std::size_t>(j)] = work[static_cast<std::size_t>(j) * N + m];
    fft_pow2(col.data(), static_cast<std::size_t>(N), -1);
    for (int j = 0; j < N; ++j) work[static_cast<std::size_t>(j) * N + m] = col[static_cast<std::size_t>(j)];
  }
  const double inv = 1.0 / (static_cast<double>(N) * N);
  std::vector<std::complex<double>> fhat(static_cast<std::size_t>(N) * N);
  for (int s = -N / 2; s < N / 2; ++s)
    for (int p = -N / 2; p < N / 2; ++p) {
      std::complex<double> v = work[static_cast<std::size_t>(mod_pos(p, N)) * N + mod_pos(s, N)];
      double sign = ((p + s) & 1) ? -1.0 : 1.0;
      fhat[static_cast<std::size_t>(s + N / 2) * N + (p + N / 2)] = sign * inv * v;
    }
  return fhat;
}

SampledSymbol synthesize(const std::vector<std::complex<double>>& shat, const Grid& grid, double hbar) {
  const int N = grid.N;
  std::vector<std::complex<double>> work(static_cast<std::size_t>(N) * N, {0.0, 0.0});
  for (int q = -N / 2; q < N / 2; ++q)
    for (int r = -N / 2; r < N / 2; ++r) {
      double sign = ((r + q) & 1) ? -1.0 : 1.0;
      work[static_cast<std::size_t>(mod_pos(r, N)) * N + mod_pos(q, N)] =
          sign * shat[static_cast<std::size_t>(q + N / 2) * N + (r + N / 2)];
    }
  std::vector<std::complex<double>> col(static_cast<std::size_t>(N));
  for (int m = 0; m < N; ++m) {
    for (int j = 0; j < N; ++j) col[static_cast<std::size_t>(j)] = work[static_cast<std::size_t>(j) * N + m];
    fft_pow2(col.data(), static_cast<std::size_t>(N), +1);
    for (int j = 0; j < N; ++j) work[static_cast<std::size_t>(j) * N + m] = col[static_cast<std::size_t>(j)];
  }
  for (int j = 0; j < N; ++j) fft_pow2(work.data() + static_cast<std::size_t>(j) * N, N, +1);
  SampledSymbol out;
  out.grid = grid;
  out.hbar = hbar;
  out.values = std::move(work);
  return out;
}

void require_same_grid(const SampledSymbol& f, const SampledSymbol& g) {
  if (!(f.grid == g.grid) || f.hbar != g.hbar)
    throw ValidationError("grid", "sampled symbols must share grid and hbar");
}

}  // namespace

OperatorMatrix build_op_matrix_from_samples(const SampledSymbol& S) {
  const int N = S.grid.N;
  const int half = N / 2;
  const int ring = 2 * N;
  const auto shat = analyze(S);

  // The trig interpolant on the midpoint line s at x-frequency p carries
  // e^{i a_p·mid_s} = (−1)^p e^{2πi p s/2N}; a length-2N synthesis per
  // ξ-frequency row q gives A[q][s] = Σ_p Ŝ[p,q](−1)^p e^{2πips/2N}.
  std::vector<std::complex<double>> A(static_cast<std::size_t>(N) * ring, {0.0, 0.0});
#pragma omp parallel for schedule(static)
  for (int q = -half; q < half; ++q) {
    std::complex<double>* row = A.data() + static_cast<std::size_t>(q + half) * ring;
    for (int p = -half; p < half; ++p) {
      double sign = (p & 1) ? -1.0 : 1.0;
      row[mod_pos(p, ring)] = sign * shat[static_cast<std::size_t>(q + half) * N + (p + half)];
    }
    fft_pow2(row, static_cast<std::size_t>(ring), +1);
  }

  // The ξ-quadrature against the dual grid collapses to a single mode,
  //   ghat_s[t] = N·(−1)^q A[q][s],  q ≡ −t (mod N) centered,
  // which folds with the assembly weights to K_jk = A[q(j−k)][j+k].
  OperatorMatrix M;
  M.grid = S.grid;
  M.hbar = S.hbar;
  M.provenance = "quantized sampled symbol";
  M.entries.resize(static_cast<std::size_t>(N) * N);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < N; ++k) {
      int q = mod_pos(-(j - k), N);
      if (q >= half) q -= N;
      M.at(j, k) = A[static_cast<std::size_t>(q + half) * ring + (j + k)];
    }
  M.hermitian_defect = hermitian_defect_of(M.entries, N);
  return M;
}

OperatorMatrix matrix_product(const OperatorMatrix& A, const OperatorMatrix& B) {
  if (!(A.grid == B.grid) || A.hbar != B.hbar)
    throw ValidationError("grid", "matrix product requires matching grid and hbar");
  const int N = A.grid.N;
  OperatorMatrix C;
  C.grid = A.grid;
  C.hbar = A.hbar;
  C.provenance = "product";
  C.entries.assign(static_cast<std::size_t>(N) * N, {0.0, 0.0});
#pragma omp parallel for schedule(static)
  for (int j = 0; j < N; ++j)
    for (int l = 0; l < N; ++l) {
      std::complex<double> a = A.at(j, l);
      if (a == std::complex<double>(0.0, 0.0)) continue;
      const std::complex<double>* brow = B.entries.data() + static_cast<std::size_t>(l) * N;
      std::complex<double>* crow = C.entries.data() + static_cast<std::size_t>(j) * N;
      for (int k = 0; k < N; ++k) crow[k] += a * brow[k];
    }
  C.hermitian_defect = hermitian_defect_of(C.entries, N);
  return C;
}

double operator_norm(const OperatorMatrix& M) {
  const int N = M.grid.N;
  std::vector<std::complex<double>> v(static_cast<std::size_t>(N)), w(static_cast<std::size_t>(N)),
      u(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) v[static_cast<std::size_t>(i)] = 1.0 / (1.0 + i);
  double norm = 0.0;
  for (int it = 0; it < 80; ++it) {
    // w = M v, u = M† w, v = u/‖u‖; the Rayleigh quotient converges to ‖M‖₂².
    for (int j = 0; j < N; ++j) {
      std::complex<double> acc(0.0, 0.0);
      const std::complex<double>* row = M.entries.data() + static_cast<std::size_t>(j) * N;
      for (int k = 0; k < N; ++k) acc += row[k] * v[static_cast<std::size_t>(k)];
      w[static_cast<std::size_t>(j)] = acc;
    }
    for (int k = 0; k < N; ++k) {
      std::complex<double> acc(0.0, 0.0);
      for (int j = 0; j < N; ++j)
        acc += std::conj(M.entries[static_cast<std::size_t>(j) * N + k]) * w[static_cast<std::size_t>(j)];
      u[static_cast<std::size_t>(k)] = acc;
    }
    double nu = 0.0;
    for (const auto& z : u) nu += std::norm(z);
    nu = std::sqrt(nu);
    if (nu == 0.0) return 0.0;
    norm = std::sqrt(nu);
    for (int k = 0; k < N; ++k) u[static_cast<std::size_t>(k)] /= nu;
    v = u;
  }
  return norm;
}

SampledSymbol moyal_product(const SampledSymbol& f, const SampledSymbol& g) {
  require_same_grid(f, g);
  const int N = f.grid.N;
  const int half = N / 2;
  const int ring = 2 * N;

  const auto fhat = analyze(f);
  const auto ghat = analyze(g);

  // Per ξ-frequency row s, the length-2N transform of the padded x-row.
  // P[s][k] = Σ_p hat[p,s] e^{−2πi p k / 2N}.
  auto row_transforms = [&](const std::vector<std::complex<double>>& hat) {
    std::vector<std::complex<double>> P(static_cast<std::size_t>(N) * ring, {0.0, 0.0});
    for (int s = -half; s < half; ++s) {
      std::complex<double>* row = P.data() + static_cast<std::size_t>(s + half) * ring;
      for (int p = -half; p < half; ++p)
        row[mod_pos(p, ring)] = hat[static_cast<std::size_t>(s + half) * N + (p + half)];
      fft_pow2(row, static_cast<std::size_t>(ring), -1);
    }
    return P;
  };
  const auto Pf = row_transforms(fhat);
  const auto Pg = row_transforms(ghat);

  // (f#g)^[r,q] = Σ_s e^{iπrs/N} · (u^{(q,s)} ⊛ ĝ[·,q−s])[r] with
  // u^{(q,s)}_p = f̂[p,s] e^{−iπpq/N}. In transform space the modulation is
  // a k-shift by q and the post-phase a k-shift by s, so each row reduces
  // to one accumulation plus a single inverse transform.
  std::vector<std::complex<double>> shat(static_cast<std::size_t>(N) * N, {0.0, 0.0});
#pragma omp parallel for schedule(static)
  for (int q = -half; q < half; ++q) {
    std::vector<std::complex<double>> K(static_cast<std::size_t>(ring), {0.0, 0.0});
    const int s_lo = std::max(-half, q - half + 1);
    const int s_hi = std::min(half, q + half + 1);
    for (int s = s_lo; s < s_hi; ++s) {
      const std::complex<double>* pf = Pf.data() + static_cast<std::size_t>(s + half) * ring;
      const std::complex<double>* pg = Pg.data() + static_cast<std::size_t>(q - s + half) * ring;
      const int shift_f = mod_pos(q - s, ring);  // evaluated at (k − s + q) mod 2N
      const int shift_g = mod_pos(-s, ring);     // evaluated at (k − s) mod 2N
      for (int k = 0; k < ring; ++k) {
        int kf = k + shift_f;
        if (kf >= ring) kf -= ring;
        int kg = k + shift_g;
        if (kg >= ring) kg -= ring;
        K[static_cast<std::size_t>(k)] += pf[kf] * pg[kg];
      }
    }
    fft_pow2(K.data(), static_cast<std::size_t>(ring), +1);
    const double inv = 1.0 / ring;
    for (int r = -half; r < half; ++r)
      shat[static_cast<std::size_t>(q + half) * N + (r + half)] = inv * K[static_cast<std::size_t>(mod_pos(r, ring))];
  }

  return synthesize(shat, f.grid, f.hbar);
}

SampledSymbol moyal_product_direct(const SampledSymbol& f, const SampledSymbol& g, int max_n) {
  require_same_grid(f, g);
  const int N = f.grid.N;
  if (N > max_n)
    throw ValidationError("N", "direct twisted convolution is guarded to N <= " + std::to_string(max_n));
  const int half = N / 2;

  const auto fhat = analyze(f);
  const auto ghat = analyze(g);
  auto at = [&](const std::vector<std::complex<double>>& hat, int p, int s) {
    return hat[static_cast<std::size_t>(s + half) * N + (p + half)];
  };

  std::vector<std::complex<double>> shat(static_cast<std::size_t>(N) * N, {0.0, 0.0});
  for (int q = -half; q < half; ++q)
    for (int r = -half; r < half; ++r) {
      std::complex<double> acc(0.0, 0.0);
      for (int s = -half; s < half; ++s) {
        int t = q - s;
        if (t < -half || t >= half) continue;
        for (int p = -half; p < half; ++p) {
          int u = r - p;
          if (u < -half || u >= half) continue;
          double angle = -M_PI * (static_cast<double>(p) * q - static_cast<double>(r) * s) / N;
          acc += at(fhat, p, s) * at(ghat, u, t) * std::polar(1.0, angle);
        }
      }
      shat[static_cast<std::size_t>(q + half) * N + (r + half)] = acc;
    }

  return synthesize(shat, f.grid, f.hbar);
}

SampledSymbol poisson_bracket(const SampledSymbol& f, const SampledSymbol& g) {
  require_same_grid(f, g);
  const int N = f.grid.N;
  const double hx = f.grid.spacing;
  const double hxi = f.grid.dual_spacing(f.hbar);

  auto d4 = [N](const SampledSymbol& u, bool in_x, double h, int j, int m) {
    auto val = [&](int dj, int dm) {
      return u.at(mod_pos(j + dj, N), mod_pos(m + dm, N));
    };
    std::complex<double> num =
        in_x ? (-val(2, 0) + 8.0 * val(1, 0) - 8.0 * val(-1, 0) + val(-2, 0))
             : (-val(0, 2) + 8.0 * val(0, 1) - 8.0 * val(0, -1) + val(0, -2));
    return num / (12.0 * h);
  };

  SampledSymbol out;
  out.grid = f.grid;
  out.hbar = f.hbar;
  out.values.resize(static_cast<std::size_t>(N) * N);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < N; ++j)
    for (int m = 0; m < N; ++m) {
      std::complex<double> fx = d4(f, true, hx, j, m), fxi = d4(f, false, hxi, j, m);
      std::complex<double> gx = d4(g, true, hx, j, m), gxi = d4(g, false, hxi, j, m);
      out.at(j, m) = fx * gxi - fxi * gx;
    }
  return out;
}

double resolvent_norm(const OperatorMatrix& M, std::complex<double> zeta) {
  if (zeta.imag() == 0.0) throw ValidationError("zeta", "resolvent_norm requires Im zeta != 0");
  const int N = M.grid.N;
  double scale = 0.0;
  for (const auto& v : M.entries) scale = std::max(scale, std::abs(v));
  if (hermitian_defect_of(M.entries, N) > 1e-9 * std::max(scale, 1.0))
    throw ValidationError("M", "resolvent_norm requires a Hermitian matrix");
  std::vector<double> ev = hermitian_eigenvalues(M.entries, N);
  double dist = std::abs(std::complex<double>(ev[0], 0.0) - zeta);
  for (double lam : ev) dist = std::min(dist, std::abs(std::complex<double>(lam, 0.0) - zeta));
  return 1.0 / dist;
}

void write_matrix_csv(const OperatorMatrix& M, std::ostream& out) {
  const int N = M.grid.N;
  for (int j = 0; j < N; ++j) {
    for (int k = 0; k < N; ++k) {
      if (k) out << ',';
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g", M.at(j, k).real(), M.at(j, k).imag());
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace qspec
