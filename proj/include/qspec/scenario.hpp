#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qspec/checks.hpp"
#include "qspec/dynamics.hpp"
#include "qspec/spectra.hpp"
#include "qspec/spectral_set.hpp"

namespace qspec {

/// A declarative experiment: catalog action, symbol, base points, grid,
/// ħ schedule, experiment set, seed and output location. Loaded from the
/// line-oriented config format documented in docs/config.md.
struct Scenario {
  std::string name;
  std::string action_id;
  std::optional<std::array<double, 4>> torus_freq;

  std::string symbol_name;  // catalog symbol (exclusive with symbol_expr)
  std::string symbol_expr;
  std::string symbol_expr2;  // moyal-check partner
  std::string symbol_expr3;  // expansion pair override (defaults to expr)
  std::string symbol_expr4;  // expansion pair override (defaults to expr2)
  std::map<std::string, double> symbol_params;
  std::optional<double> symbol_bound;

  std::vector<StatePoint> base_points;
  double L = 8.0;
  int N = 256;
  double resolution = 0.0;  // 0 → 4·spacing heuristic

  std::vector<double> hbar_schedule{1.0};  // sorted descending
  std::vector<std::string> experiments{"spectrum"};
  std::uint64_t seed = 0;
  int random_count = 5;
  std::string output_path = "out";

  // Essential-spectrum instrument settings.
  std::optional<std::pair<double, int>> ess_prev_rung;
  double ess_window_margin = 0.02;
  double ess_isolated_gap = 0.1;
  double ess_match_tol = 0.02;

  // Catalog metadata for the `catalog` listing.
  std::string expected_summary;
  std::string example_tag;

  double effective_resolution() const { return resolution > 0 ? resolution : 4.0 * (2.0 * L / N); }
};

/// Parses and validates a scenario config. Overrides are dotted paths
/// ("grid.N=512"), applied after parse and before validation.
Scenario load_scenario(const std::string& text, const std::vector<std::string>& overrides = {});
Scenario load_scenario_file(const std::string& path, const std::vector<std::string>& overrides = {});

ActionSpec scenario_action(const Scenario& sc);
StateSymbol scenario_symbol(const Scenario& sc, int which = 1);

/// S⁰_σ = closure f(E_σ), approximated by the values of f over a dense
/// orbit sample (uniform X-box of the scenario grid) plus the declared
/// sub-orbit representatives.
SpectralSet classical_range(const Scenario& sc, const StatePoint& sigma);

struct SweepRow {
  double hbar = 1.0;
  SpectralSet spectrum;
  double d_to_classical = 0.0;
  long long runtime_ms = 0;
};

std::vector<SweepRow> run_hbar_sweep(const Scenario& sc, const StatePoint& sigma);

struct RandomReport {
  std::vector<StatePoint> points;
  std::vector<SpectralSet> spectra;
  std::vector<double> per_point_max_d;
  std::vector<std::vector<double>> isolated;
  double max_pairwise_d = 0.0;
};

/// Seeded sampling of base points on the ergodic torus system; spectra,
/// pairwise Hausdorff distances and isolated-eigenvalue lists per point.
RandomReport run_random_experiment(const Scenario& sc, int count, std::uint64_t seed);

/// The named, fully parameterized acceptance scenarios.
std::vector<Scenario> builtin_catalog();

/// One line per builtin scenario: name, action, symbol and the expected
/// result with its example tag. Stable ordering by name.
std::string print_catalog();

struct RunOptions {
  std::string out_dir = "out";
  int verbosity = 0;
  bool dump_matrix = false;
  bool check = false;
  std::optional<std::uint64_t> seed_override;
};

struct RunOutcome {
  std::vector<checks::CheckResult> checks;
  std::vector<std::string> written_files;
};

/// Runs the given experiments (or the scenario's own set when empty),
/// writing CSVs under out_dir/<scenario-name>/ and evaluating the
/// applicable acceptance checks when requested.
RunOutcome run_experiments(const Scenario& sc, std::vector<std::string> experiments,
                           const RunOptions& opt);

}  // namespace qspec
