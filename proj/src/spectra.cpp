#include "qspec/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "qspec/eigh.hpp"
#include "qspec/errors.hpp"

namespace qspec {

namespace {

// Directed sup-inf distance from a to b, both sorted non-empty.
double directed_hausdorff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  std::size_t j = 0;
  for (double v : a) {
    while (j + 1 < b.size() && b[j + 1] <= v) ++j;
    double best = std::abs(b[j] - v);
    if (j + 1 < b.size()) best = std::min(best, std::abs(b[j + 1] - v));
    if (j > 0) best = std::min(best, std::abs(b[j - 1] - v));
    worst = std::max(worst, best);
  }
  return worst;
}

std::size_t count_in(const std::vector<double>& v, double lo, double hi) {
  auto a = std::lower_bound(v.begin(), v.end(), lo);
  auto b = std::upper_bound(v.begin(), v.end(), hi);
  return static_cast<std::size_t>(b - a);
}

void format_value(double v, std::string& out) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

SpectralSet eigen_spectrum(const OperatorMatrix& M, std::optional<double> resolution,
                           bool check_residual) {
  const int N = M.grid.N;
  double scale = 0.0;
  for (const auto& v : M.entries) scale = std::max(scale, std::abs(v));
  if (hermitian_defect_of(M.entries, N) > 1e-8 * std::max(scale, 1.0))
    throw ValidationError("M", "eigen_spectrum requires a Hermitian matrix");
  std::vector<double> w = hermitian_eigenvalues(M.entries, N, check_residual);
  return SpectralSet(std::move(w), resolution ? *resolution : default_resolution(M.grid));
}

double hausdorff(const SpectralSet& S1, const SpectralSet& S2) {
  if (S1.empty() || S2.empty()) throw ValidationError("S", "hausdorff requires non-empty sets");
  return std::max(directed_hausdorff(S1.values(), S2.values()),
                  directed_hausdorff(S2.values(), S1.values()));
}

SpectralSet union_closure(const std::vector<SpectralSet>& parts) {
  if (parts.empty()) throw ValidationError("parts", "union_closure requires a non-empty list");
  std::vector<double> all;
  double res = 0.0;
  for (const auto& p : parts) {
    all.insert(all.end(), p.values().begin(), p.values().end());
    res = std::max(res, p.resolution());
  }
  return SpectralSet(std::move(all), res).merged();
}

std::vector<double> isolated_eigenvalues(const SpectralSet& S, double gap,
                                         std::pair<double, double> window) {
  if (!(gap > 0.0)) throw ValidationError("gap", "gap must be positive");
  const auto& v = S.values();
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < window.first || v[i] > window.second) continue;
    double dist = std::numeric_limits<double>::infinity();
    if (i > 0) dist = std::min(dist, v[i] - v[i - 1]);
    if (i + 1 < v.size()) dist = std::min(dist, v[i + 1] - v[i]);
    if (dist > gap) out.push_back(v[i]);
  }
  return out;
}

SpectralSet truncation_stable_spectrum(const MatrixBuilder& builder,
                                       const std::vector<std::pair<double, int>>& ladder,
                                       const StabilityOptions& opt, StabilityDiagnostics* diag) {
  if (ladder.size() < 2) throw ValidationError("ladder", "ladder needs at least 2 rungs");
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (!(ladder[i].first >= ladder[i - 1].first && ladder[i].second > ladder[i - 1].second))
      throw ValidationError("ladder", "rungs must increase in L and N");

  std::vector<std::vector<double>> spectra;
  spectra.reserve(ladder.size());
  for (const auto& [L, N] : ladder) {
    OperatorMatrix M = builder(L, N);
    spectra.push_back(eigen_spectrum(M, 0.0).values());
    if (diag) diag->rung_sizes.push_back(spectra.back().size());
  }

  const auto& big = spectra.back();
  const auto& prev = spectra[spectra.size() - 2];
  const auto n_big = static_cast<long long>(big.size());
  const auto n_prev = static_cast<long long>(prev.size());

  std::vector<double> stable;
  std::size_t j = 0;  // greedy pointer into prev, each value consumed at most once
  for (double v : big) {
    while (j < prev.size() && prev[j] < v - opt.match_tol) ++j;
    bool matched = j < prev.size() && std::abs(prev[j] - v) <= opt.match_tol;
    if (!matched) {
      if (diag) diag->discarded_unmatched.push_back(v);
      continue;
    }
    ++j;
    const double w = opt.density_window;
    auto c_big = static_cast<long long>(count_in(big, v - w, v + w));
    auto c_prev = static_cast<long long>(count_in(prev, v - w, v + w));
    // density ratio (c_big/n_big)/(c_prev/n_prev) in [1/2, 2], exact in integers
    bool dense_ok = c_prev > 0 && c_big * n_prev <= 2 * c_prev * n_big &&
                    2 * c_big * n_prev >= c_prev * n_big;
    if (!dense_ok) {
      if (diag) diag->discarded_density.push_back(v);
      continue;
    }
    stable.push_back(v);
  }
  return SpectralSet(std::move(stable), opt.resolution);
}

SpectralSet asymptotic_range(const PhaseFunction& F, const std::vector<double>& radii,
                             int samples_per_radius, double tol) {
  if (radii.size() < 3) throw ValidationError("radii", "need at least 3 radii");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) throw ValidationError("radii", "radii must increase");
  if (samples_per_radius < 1) throw ValidationError("samples_per_radius", "need at least 1 sample");

  auto circle = [&](double R) {
    std::vector<double> vals(static_cast<std::size_t>(samples_per_radius));
    for (int i = 0; i < samples_per_radius; ++i) {
      double th = 2.0 * M_PI * i / samples_per_radius;
      std::complex<double> v = F.eval(R * std::cos(th), R * std::sin(th));
      if (std::abs(v.imag()) > 1e-9)
        throw ValidationError("F", "asymptotic_range requires a real-valued symbol");
      vals[static_cast<std::size_t>(i)] = v.real();
    }
    std::sort(vals.begin(), vals.end());
    return vals;
  };

  auto matched_within = [tol](const std::vector<double>& sorted, double v) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
    if (it != sorted.end() && *it - v <= tol) return true;
    return it != sorted.begin() && v - *(it - 1) <= tol;
  };

  std::vector<std::vector<double>> circles;
  circles.reserve(radii.size());
  for (double R : radii) circles.push_back(circle(R));

  std::vector<double> kept;
  for (std::size_t k = 2; k < circles.size(); ++k)
    for (double v : circles[k])
      if (matched_within(circles[k - 1], v) && matched_within(circles[k - 2], v)) kept.push_back(v);
  // kept unmerged so extremes survive; tol is the resolution metadata
  return SpectralSet(std::move(kept), tol);
}

namespace {

// Closed-form spectra for multiplication-operator sub-Hamiltonians; the
// general case gets its own truncation-stability ladder so the reference
// is as truncation-cleaned as the estimate it is compared against.
SpectralSet suborbit_spectrum(const ActionSpec& a, const StateSymbol& f, const QuasiOrbit& sub,
                              const Grid& grid, double hbar,
                              const std::vector<std::pair<double, int>>& ladder,
                              const StabilityOptions& stab) {
  PhaseFunction P = pullback_symbol(f, a, sub.generating_point);
  std::vector<double> vals;
  switch (sub.hint.kind) {
    case SpectrumHint::Kind::MultiplicationInX: {
      vals.reserve(static_cast<std::size_t>(grid.N));
      for (int j = 0; j < grid.N; ++j) vals.push_back(P.eval(grid.node(j), 0.0).real());
      return SpectralSet(std::move(vals), stab.resolution);
    }
    case SpectrumHint::Kind::MultiplicationInXi: {
      vals.reserve(static_cast<std::size_t>(grid.N));
      for (int m = 0; m < grid.N; ++m) vals.push_back(P.eval(0.0, grid.dual_node(m, hbar)).real());
      return SpectralSet(std::move(vals), stab.resolution);
    }
    case SpectrumHint::Kind::None: {
      MatrixBuilder builder = [&P, hbar](double L, int N) {
        return build_op_matrix(P, make_grid(L, N), hbar);
      };
      return truncation_stable_spectrum(builder, ladder, stab);
    }
  }
  throw ValidationError("hint", "unreachable");
}

}  // namespace

EssentialSpectrumReport predicted_ess_spectrum(const ActionSpec& a, const StatePoint& sigma,
                                               const StateSymbol& f, const Grid& grid, double hbar,
                                               const EssOptions& opt) {
  EssentialSpectrumReport rep;
  QuasiOrbit E = quasi_orbit_of(a, sigma);
  OrbitKind kind = classify_kind(E);

  std::vector<std::pair<double, int>> ladder =
      opt.ladder ? *opt.ladder
                 : std::vector<std::pair<double, int>>{{grid.L * 2.0 / 3.0, grid.N / 2},
                                                       {grid.L, grid.N}};
  StabilityOptions stab = opt.stability;
  stab.resolution = opt.resolution;

  if (kind == OrbitKind::First && E.id == "Xi") {
    // The quantization of C(Ξ) is the compact operators: the essential
    // spectrum of the full-plane class reduces to {0}.
    rep.predicted = SpectralSet({0.0}, opt.resolution);
    rep.method_notes.push_back("compact class: predicted essential spectrum {0}");
  } else if (kind == OrbitKind::First) {
    std::vector<SpectralSet> parts;
    for (const QuasiOrbit& sub : non_generic_suborbits(a, E)) {
      SpectralSet s = suborbit_spectrum(a, f, sub, grid, hbar, ladder, stab);
      parts.push_back(s);
      rep.per_suborbit.emplace(sub.id, std::move(s));
    }
    if (parts.empty()) throw ValidationError("QuasiOrbit", "first-kind orbit with empty cover");
    rep.predicted = union_closure(parts);
    rep.method_notes.push_back("first kind: union of " + std::to_string(parts.size()) +
                               " asymptotic Hamiltonian spectra over quasi-orbit '" + E.id + "'");
  } else {
    PhaseFunction P = pullback_symbol(f, a, sigma);
    rep.predicted = eigen_spectrum(build_op_matrix(P, grid, hbar), opt.resolution);
    rep.method_notes.push_back("second kind: spectrum purely essential (void discrete spectrum)");
  }
  MatrixBuilder builder = [&a, &f, sigma, hbar](double L, int N) {
    PhaseFunction P = pullback_symbol(f, a, sigma);
    return build_op_matrix(P, make_grid(L, N), hbar);
  };
  StabilityDiagnostics diag;
  SpectralSet stable = truncation_stable_spectrum(builder, ladder, stab, &diag);

  const double lo = rep.predicted.min() - opt.window_margin;
  const double hi = rep.predicted.max() + opt.window_margin;
  std::vector<double> in_window;
  for (double v : stable.values())
    if (v >= lo && v <= hi) in_window.push_back(v);

  if (opt.drop_isolated && !in_window.empty()) {
    SpectralSet windowed(in_window, opt.resolution);
    auto isolated = isolated_eigenvalues(windowed, opt.isolated_gap,
                                         {windowed.min() - 1.0, windowed.max() + 1.0});
    if (!isolated.empty()) {
      std::vector<double> filtered;
      std::size_t k = 0;
      for (double v : windowed.values()) {
        if (k < isolated.size() && v == isolated[k]) {
          ++k;
          continue;
        }
        filtered.push_back(v);
      }
      in_window = std::move(filtered);
      rep.method_notes.push_back("dropped " + std::to_string(isolated.size()) +
                                 " gap-isolated value(s) from the numerical estimate");
    }
  }
  rep.numerical = SpectralSet(std::move(in_window), opt.resolution);
  rep.method_notes.push_back("ladder: " + std::to_string(ladder.size()) + " rungs, matched " +
                             std::to_string(rep.numerical.size()) + " of " +
                             std::to_string(diag.rung_sizes.empty() ? 0 : diag.rung_sizes.back()) +
                             " eigenvalues in the essential window");
  rep.hausdorff_distance = rep.numerical.empty()
                               ? std::numeric_limits<double>::infinity()
                               : hausdorff(rep.predicted, rep.numerical);
  return rep;
}

void EssentialSpectrumReport::write_csv(std::ostream& out) const {
  out << "value,source\n";
  std::string line;
  auto emit = [&](double v, const std::string& src) {
    line.clear();
    format_value(v, line);
    line += ',';
    line += src;
    line += '\n';
    out << line;
  };
  for (double v : predicted.values()) emit(v, "predicted");
  for (double v : numerical.values()) emit(v, "numerical");
  for (const auto& [id, s] : per_suborbit)
    for (double v : s.values()) emit(v, "suborbit:" + id);
}

}  // namespace qspec
