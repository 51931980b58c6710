#include "qspec/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "qspec/errors.hpp"

namespace qspec {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Config parsing: `[section]` headers, `key = value` lines, `#` comments.

struct RawConfig {
  // (section, key) -> (value, line). Preserves insertion order for errors.
  std::map<std::pair<std::string, std::string>, std::pair<std::string, std::size_t>> entries;

  const std::string* get(const std::string& sec, const std::string& key) const {
    auto it = entries.find({sec, key});
    return it == entries.end() ? nullptr : &it->second.first;
  }
};

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

RawConfig parse_raw_config(const std::string& text) {
  RawConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ParseError("line " + std::to_string(lineno) + ": unterminated section header", lineno,
                         ParseError::Where::Line);
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty())
        throw ParseError("line " + std::to_string(lineno) + ": empty section name", lineno,
                         ParseError::Where::Line);
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(lineno) + ": expected 'key = value'", lineno,
                       ParseError::Where::Line);
    if (section.empty())
      throw ParseError("line " + std::to_string(lineno) + ": key outside any [section]", lineno,
                       ParseError::Where::Line);
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw ParseError("line " + std::to_string(lineno) + ": empty key", lineno, ParseError::Where::Line);
    auto [it, inserted] = cfg.entries.insert({{section, key}, {value, lineno}});
    (void)it;
    if (!inserted)
      throw ParseError("line " + std::to_string(lineno) + ": duplicate key '" + section + "." + key + "'",
                       lineno, ParseError::Where::Line);
  }
  return cfg;
}

double parse_double(const std::string& field, const std::string& v) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw ValidationError(field, "field '" + field + "': expected a number, got '" + v + "'");
  }
}

long long parse_int(const std::string& field, const std::string& v) {
  try {
    std::size_t used = 0;
    long long d = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw ValidationError(field, "field '" + field + "': expected an integer, got '" + v + "'");
  }
}

std::vector<std::string> split_ws(const std::string& v) {
  std::istringstream in(v);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

StatePoint parse_base_point(const std::string& field, const std::string& entry) {
  std::string body = trim(entry);
  std::string tag;
  if (auto colon = body.find(':'); colon != std::string::npos) {
    tag = trim(body.substr(0, colon));
    body = body.substr(colon + 1);
  }
  std::vector<double> coords;
  for (const auto& tok : split_ws(body)) coords.push_back(parse_double(field, tok));
  if (tag.empty()) {
    if (coords.size() != 2)
      throw ValidationError(field, "field '" + field + "': interior base point needs 2 coordinates");
    StatePoint s;
    s.coords = coords;
    return s;
  }
  return StatePoint::boundary(tag, coords);
}

const std::set<std::string> kKnownExperiments = {"spectrum", "ess-spectrum", "sweep", "random",
                                                 "moyal-check"};

Scenario build_scenario(const RawConfig& cfg) {
  // Reject unknown sections/keys first so typos never silently no-op.
  static const std::map<std::string, std::set<std::string>> kKnown = {
      {"action", {"id", "frequency"}},
      {"symbol", {"name", "expr", "expr2", "expr3", "expr4", "bound", "scale", "c", "g0", "w"}},
      {"grid", {"L", "N", "resolution"}},
      {"run",
       {"name", "base_points", "hbar", "experiments", "seed", "count", "out", "ess_margin",
        "ess_gap", "ess_match_tol", "ess_prev"}},
  };
  for (const auto& [sk, vl] : cfg.entries) {
    auto sec = kKnown.find(sk.first);
    if (sec == kKnown.end())
      throw ValidationError(sk.first, "unknown section '[" + sk.first + "]' (line " +
                                          std::to_string(vl.second) + ")");
    if (!sec->second.count(sk.second))
      throw ValidationError(sk.first + "." + sk.second,
                            "unknown key '" + sk.first + "." + sk.second + "' (line " +
                                std::to_string(vl.second) + ")");
  }

  Scenario sc;
  auto need = [&cfg](const std::string& sec, const std::string& key) -> const std::string& {
    const std::string* v = cfg.get(sec, key);
    if (!v) throw ValidationError(sec + "." + key, "missing required field '" + sec + "." + key + "'");
    return *v;
  };

  sc.action_id = need("action", "id");
  if (const std::string* v = cfg.get("action", "frequency")) {
    auto toks = split_ws(*v);
    if (toks.size() != 4)
      throw ValidationError("action.frequency", "frequency matrix needs 4 numbers (row-major 2x2)");
    std::array<double, 4> m{};
    for (int i = 0; i < 4; ++i) m[static_cast<std::size_t>(i)] = parse_double("action.frequency", toks[static_cast<std::size_t>(i)]);
    sc.torus_freq = m;
  }

  if (const std::string* v = cfg.get("symbol", "name")) sc.symbol_name = *v;
  if (const std::string* v = cfg.get("symbol", "expr")) sc.symbol_expr = *v;
  if (const std::string* v = cfg.get("symbol", "expr2")) sc.symbol_expr2 = *v;
  if (const std::string* v = cfg.get("symbol", "expr3")) sc.symbol_expr3 = *v;
  if (const std::string* v = cfg.get("symbol", "expr4")) sc.symbol_expr4 = *v;
  if (sc.symbol_name.empty() == sc.symbol_expr.empty())
    throw ValidationError("symbol", "exactly one of symbol.name / symbol.expr is required");
  if (const std::string* v = cfg.get("symbol", "bound")) sc.symbol_bound = parse_double("symbol.bound", *v);
  for (const char* p : {"scale", "c", "g0", "w"})
    if (const std::string* v = cfg.get("symbol", p)) sc.symbol_params[p] = parse_double(std::string("symbol.") + p, *v);

  sc.L = parse_double("grid.L", need("grid", "L"));
  long long n = parse_int("grid.N", need("grid", "N"));
  if (n < 8 || n > (1 << 20) || !is_power_of_two(n))
    throw ValidationError("grid.N", "grid.N must be a power of two >= 8");
  sc.N = static_cast<int>(n);
  if (!(sc.L > 0)) throw ValidationError("grid.L", "grid.L must be positive");
  if (const std::string* v = cfg.get("grid", "resolution")) {
    sc.resolution = parse_double("grid.resolution", *v);
    if (sc.resolution < 0) throw ValidationError("grid.resolution", "resolution must be >= 0");
  }

  sc.name = need("run", "name");
  if (sc.name.empty() || sc.name.find('/') != std::string::npos)
    throw ValidationError("run.name", "scenario name must be a non-empty path component");
  if (const std::string* v = cfg.get("run", "base_points")) {
    std::istringstream in(*v);
    std::string entry;
    sc.base_points.clear();
    while (std::getline(in, entry, ';'))
      if (!trim(entry).empty()) sc.base_points.push_back(parse_base_point("run.base_points", entry));
  }
  if (sc.base_points.empty()) sc.base_points.push_back(StatePoint::interior(0.0, 0.0));
  if (const std::string* v = cfg.get("run", "hbar")) {
    sc.hbar_schedule.clear();
    for (const auto& tok : split_ws(*v)) sc.hbar_schedule.push_back(parse_double("run.hbar", tok));
  }
  if (sc.hbar_schedule.empty()) throw ValidationError("run.hbar", "hbar schedule must be non-empty");
  for (double h : sc.hbar_schedule)
    if (!(h > 0.0) || h > 1.0) throw ValidationError("run.hbar", "hbar must be in (0,1]");
  std::sort(sc.hbar_schedule.rbegin(), sc.hbar_schedule.rend());
  if (const std::string* v = cfg.get("run", "experiments")) {
    sc.experiments = split_ws(*v);
    if (sc.experiments.empty())
      throw ValidationError("run.experiments", "experiment list must be non-empty");
    for (const auto& e : sc.experiments)
      if (!kKnownExperiments.count(e))
        throw ValidationError("run.experiments", "unknown experiment '" + e + "'");
  }
  if (const std::string* v = cfg.get("run", "seed"))
    sc.seed = static_cast<std::uint64_t>(parse_int("run.seed", *v));
  if (const std::string* v = cfg.get("run", "count")) {
    sc.random_count = static_cast<int>(parse_int("run.count", *v));
  }
  if (const std::string* v = cfg.get("run", "out")) sc.output_path = *v;
  if (const std::string* v = cfg.get("run", "ess_margin"))
    sc.ess_window_margin = parse_double("run.ess_margin", *v);
  if (const std::string* v = cfg.get("run", "ess_gap"))
    sc.ess_isolated_gap = parse_double("run.ess_gap", *v);
  if (const std::string* v = cfg.get("run", "ess_match_tol"))
    sc.ess_match_tol = parse_double("run.ess_match_tol", *v);
  if (const std::string* v = cfg.get("run", "ess_prev")) {
    auto toks = split_ws(*v);
    if (toks.size() != 2) throw ValidationError("run.ess_prev", "expected 'L N'");
    sc.ess_prev_rung = {parse_double("run.ess_prev", toks[0]),
                        static_cast<int>(parse_int("run.ess_prev", toks[1]))};
  }

  // Cross-field validation: the action must accept every base point and
  // the symbol must be evaluable on the action's state space.
  ActionSpec action = scenario_action(sc);
  StateSymbol sym = scenario_symbol(sc);
  for (const auto& p : sc.base_points) {
    action.validate_point(p);
    std::complex<double> v = sym.eval(act(action, p, PhasePoint(0.1, -0.2)));
    if (!std::isfinite(v.real()))
      throw ValidationError("symbol", "symbol not finite on the orbit of a base point");
  }
  // The symbol must extend to the whole state space the action carries,
  // including the boundary representatives in the quasi-orbit table.
  for (const auto& entry : action.table) {
    try {
      (void)sym.eval(entry.generating_point);
    } catch (const EvalError& e) {
      throw ValidationError("symbol", "symbol does not extend to quasi-orbit '" + entry.id +
                                          "' of action '" + sc.action_id + "': " + e.what());
    }
  }
  if (!sc.symbol_expr2.empty()) parse_symbol(sc.symbol_expr2);
  if (!sc.symbol_expr3.empty()) parse_symbol(sc.symbol_expr3);
  if (!sc.symbol_expr4.empty()) parse_symbol(sc.symbol_expr4);
  bool wants_moyal = std::find(sc.experiments.begin(), sc.experiments.end(), "moyal-check") !=
                     sc.experiments.end();
  if (wants_moyal && (sc.symbol_expr2.empty() || sc.action_id != "translation"))
    throw ValidationError("run.experiments",
                          "moyal-check requires action=translation and symbol.expr2");
  bool wants_random =
      std::find(sc.experiments.begin(), sc.experiments.end(), "random") != sc.experiments.end();
  if (wants_random && sc.action_id != "torus-ap")
    throw ValidationError("run.experiments", "random experiment requires the ergodic torus-ap action");
  return sc;
}

void apply_override(RawConfig& cfg, const std::string& spec) {
  auto eq = spec.find('=');
  if (eq == std::string::npos)
    throw ValidationError("override", "override '" + spec + "' must be section.key=value");
  std::string path = trim(spec.substr(0, eq));
  std::string value = trim(spec.substr(eq + 1));
  auto dot = path.find('.');
  if (dot == std::string::npos)
    throw ValidationError("override", "override key '" + path + "' must be a dotted path");
  std::pair<std::string, std::string> key = {path.substr(0, dot), path.substr(dot + 1)};
  auto it = cfg.entries.find(key);
  if (it == cfg.entries.end())
    throw ValidationError("override",
                          "override references key '" + path + "' absent from the config");
  it->second.first = value;
}

}  // namespace

Scenario load_scenario(const std::string& text, const std::vector<std::string>& overrides) {
  RawConfig cfg = parse_raw_config(text);
  for (const auto& o : overrides) apply_override(cfg, o);
  return build_scenario(cfg);
}

Scenario load_scenario_file(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("config", "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str(), overrides);
}

ActionSpec scenario_action(const Scenario& sc) { return make_action(sc.action_id, sc.torus_freq); }

StateSymbol scenario_symbol(const Scenario& sc, int which) {
  auto expr_symbol = [&sc](const std::string& text) {
    SymbolExpr e = parse_symbol(text);
    e.declared_bounded = sc.symbol_bound.has_value();
    e.bound = sc.symbol_bound;
    return state_symbol_from_expr(e, sc.symbol_bound);
  };
  if (which == 2) {
    if (sc.symbol_expr2.empty()) throw ValidationError("symbol.expr2", "no second symbol configured");
    return expr_symbol(sc.symbol_expr2);
  }
  if (which == 3) return expr_symbol(sc.symbol_expr3.empty() ? sc.symbol_expr : sc.symbol_expr3);
  if (which == 4) return expr_symbol(sc.symbol_expr4.empty() ? sc.symbol_expr2 : sc.symbol_expr4);
  if (!sc.symbol_name.empty()) return make_named_symbol(sc.symbol_name, sc.symbol_params);
  SymbolExpr e = parse_symbol(sc.symbol_expr);
  e.declared_bounded = sc.symbol_bound.has_value();
  e.bound = sc.symbol_bound;
  return state_symbol_from_expr(e, sc.symbol_bound);
}

SpectralSet classical_range(const Scenario& sc, const StatePoint& sigma) {
  ActionSpec a = scenario_action(sc);
  StateSymbol f = scenario_symbol(sc);
  a.validate_point(sigma);

  const int K = 256;  // fixed orbit-sampling density, independent of grid.N
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(K) * K + 8);
  auto push = [&vals, &f](const StatePoint& p) {
    std::complex<double> v = f.eval(p);
    if (std::abs(v.imag()) > 1e-12)
      throw ValidationError("symbol", "classical_range requires a real-valued symbol");
    vals.push_back(v.real());
  };
  const double step = 2.0 * sc.L / K;
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j)
      push(act(a, sigma, PhasePoint(-sc.L + (i + 0.5) * step, -sc.L + (j + 0.5) * step)));
  // Boundary/sub-orbit representatives of the generated quasi-orbit.
  QuasiOrbit E = quasi_orbit_of(a, sigma);
  for (const auto& id : E.non_generic_cover)
    if (const QuasiOrbit* sub = a.find(id)) push(sub->generating_point);

  // unmerged so the range extremes survive; resolution is metadata
  return SpectralSet(std::move(vals), sc.effective_resolution());
}

std::vector<SweepRow> run_hbar_sweep(const Scenario& sc, const StatePoint& sigma) {
  ActionSpec a = scenario_action(sc);
  StateSymbol f = scenario_symbol(sc);
  PhaseFunction F = pullback_symbol(f, a, sigma);
  Grid grid = make_grid(sc.L, sc.N);
  SpectralSet classical = classical_range(sc, sigma);

  std::vector<SweepRow> rows;
  rows.reserve(sc.hbar_schedule.size());
  for (double h : sc.hbar_schedule) {
    auto t0 = std::chrono::steady_clock::now();
    OperatorMatrix M = build_op_matrix(F, grid, h);
    SweepRow row;
    row.hbar = h;
    row.spectrum = eigen_spectrum(M, sc.effective_resolution());
    row.d_to_classical = hausdorff(row.spectrum, classical);
    row.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    rows.push_back(std::move(row));
  }
  return rows;
}

RandomReport run_random_experiment(const Scenario& sc, int count, std::uint64_t seed) {
  if (sc.action_id != "torus-ap")
    throw ValidationError("action", "random experiment requires the ergodic torus-ap catalog entry");
  if (count < 2) throw ValidationError("count", "count >= 2 required");

  ActionSpec a = scenario_action(sc);
  StateSymbol f = scenario_symbol(sc);
  Grid grid = make_grid(sc.L, sc.N);
  const double hbar = sc.hbar_schedule.front();

  RandomReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  for (int i = 0; i < count; ++i) {
    double t1 = angle(rng), t2 = angle(rng);
    rep.points.push_back(StatePoint::interior(t1, t2));
  }
  const double margin = 2.0 * default_resolution(grid);
  for (const auto& p : rep.points) {
    OperatorMatrix M = build_op_matrix(pullback_symbol(f, a, p), grid, hbar);
    SpectralSet s = eigen_spectrum(M, sc.effective_resolution());
    rep.isolated.push_back(
        isolated_eigenvalues(s, sc.ess_isolated_gap, {s.min() + margin, s.max() - margin}));
    rep.spectra.push_back(std::move(s));
  }
  rep.per_point_max_d.assign(rep.spectra.size(), 0.0);
  for (std::size_t i = 0; i < rep.spectra.size(); ++i)
    for (std::size_t j = i + 1; j < rep.spectra.size(); ++j) {
      double d = hausdorff(rep.spectra[i], rep.spectra[j]);
      rep.per_point_max_d[i] = std::max(rep.per_point_max_d[i], d);
      rep.per_point_max_d[j] = std::max(rep.per_point_max_d[j], d);
      rep.max_pairwise_d = std::max(rep.max_pairwise_d, d);
    }
  return rep;
}

// ---------------------------------------------------------------------------
// Builtin catalog

namespace {

Scenario base_scenario(const std::string& name, const std::string& action, double L, int N) {
  Scenario sc;
  sc.name = name;
  sc.action_id = action;
  sc.L = L;
  sc.N = N;
  sc.resolution = 0.01;
  sc.base_points = {StatePoint::interior(0.0, 0.0)};
  return sc;
}

}  // namespace

std::vector<Scenario> builtin_catalog() {
  std::vector<Scenario> out;

  {
    Scenario sc = base_scenario("vo-radial-tanh", "radial-vo", 8.0, 256);
    sc.symbol_name = "radial-tanh";
    sc.symbol_params = {{"scale", 2.0}};
    sc.experiments = {"spectrum", "ess-spectrum"};
    sc.ess_prev_rung = {{8.0, 128}};
    sc.seed = 1;
    sc.expected_summary = "sp_ess = {1}, the asymptotic range of the radial symbol";
    sc.example_tag = "vanishing oscillation / asymptotic range";
    out.push_back(sc);
  }
  {
    Scenario sc = base_scenario("vo-times-ap", "vo-ap", 12.0, 512);
    sc.symbol_name = "vo-times-harper";
    sc.symbol_params = {{"c", 0.7}, {"g0", 0.55}, {"w", 1.0}};
    sc.experiments = {"ess-spectrum"};
    sc.ess_prev_rung = {{8.0, 256}};
    sc.seed = 2;
    sc.expected_summary = "sp_ess[Op(g·h)] = R_asy(g)·sp(Op(h)) = 0.7·sp(Op(h))";
    sc.example_tag = "VO·AP product formula";
    out.push_back(sc);
  }
  {
    Scenario sc = base_scenario("vo-plus-ap", "vo-ap", 12.0, 512);
    sc.symbol_name = "vo-plus-harper";
    sc.symbol_params = {{"c", 0.4}, {"g0", 0.7}, {"w", 1.0}};
    sc.experiments = {"ess-spectrum"};
    sc.ess_prev_rung = {{8.0, 256}};
    sc.seed = 3;
    sc.expected_summary = "sp_ess[Op(g+h)] = R_asy(g)+sp(Op(h)) = 0.4+sp(Op(h))";
    sc.example_tag = "VO+AP sum formula";
    out.push_back(sc);
  }
  {
    Scenario sc = base_scenario("vo-tensor-vo-tanh", "vo-tensor-vo", 8.0, 256);
    sc.symbol_name = "tanh-prod";
    sc.experiments = {"ess-spectrum"};
    sc.ess_prev_rung = {{8.0, 128}};
    sc.seed = 4;
    sc.expected_summary = "sp_ess = f(Omega1 x Omega*) ∪ f(Omega x Omega1*) = [-1,1]";
    sc.example_tag = "VO⊗VO tensor decomposition";
    out.push_back(sc);
  }
  {
    Scenario sc = base_scenario("quantum-plane-grid", "real-quantum-plane", 8.0, 512);
    sc.symbol_expr = "tanh(x)+tanh(xi)";
    sc.symbol_bound = 2.0;
    sc.base_points = {StatePoint::interior(1.0, 1.0), StatePoint::interior(1.0, 0.0),
                      StatePoint::interior(0.0, 1.0), StatePoint::interior(0.0, 0.0)};
    sc.experiments = {"spectrum", "ess-spectrum"};
    sc.ess_prev_rung = {{8.0, 256}};
    sc.seed = 5;
    sc.expected_summary = "sp_ess[H_(1,1)] = sp[H_(1,0)] ∪ sp[H_(0,1)] (semi-axis multipliers)";
    sc.example_tag = "real quantum plane";
    out.push_back(sc);
  }
  {
    // Box and dual-box commensurate with the symbol at hbar = 1: L is a
    // half-integer multiple of the x-period and the second frequency is
    // an exact multiple of the dual spacing, so base-point shifts act
    // unitarily up to grid resolution. 57π/128 is irrational, keeping
    // the rows rationally independent (minimality).
    Scenario sc = base_scenario("torus-harper", "torus-ap", 3.0 * M_PI, 512);
    sc.torus_freq = {{1.0, 0.0, 0.0, 57.0 * M_PI / 128.0}};
    sc.symbol_expr = "cos(x)+cos(xi)";
    sc.symbol_bound = 2.0;
    sc.base_points = {StatePoint::interior(0.0, 0.0)};
    sc.hbar_schedule = {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125};
    sc.experiments = {"spectrum", "ess-spectrum", "sweep", "random"};
    sc.random_count = 5;
    sc.seed = 7;
    sc.expected_summary =
        "minimal second-kind system: purely essential, equi-spectral base points, sp → [-2,2]";
    sc.example_tag = "almost-periodic torus (Harper symbol)";
    out.push_back(sc);
  }
  {
    Scenario sc = base_scenario("gaussian-compact", "translation", 8.0, 256);
    sc.symbol_expr = "2*gaussian(x)*gaussian(xi)";
    sc.symbol_bound = 2.0;
    sc.experiments = {"spectrum", "ess-spectrum"};
    sc.ess_prev_rung = {{8.0, 128}};
    sc.seed = 8;
    sc.expected_summary = "compact operator: stable spectrum {0} ∪ isolated eigenvalues";
    sc.example_tag = "C(Xi) compact class";
    out.push_back(sc);
  }
  {
    Scenario sc = base_scenario("moyal-gaussians", "translation", 8.0, 256);
    sc.symbol_expr = "gaussian(1.8*(x-4.6))*gaussian((xi-0.25)/16)";
    sc.symbol_expr2 = "gaussian(1.8*(x-5))*gaussian(xi+0.25)";
    sc.symbol_expr3 = "gaussian(x-0.5)*gaussian(xi)";
    sc.symbol_expr4 = "gaussian(x)*gaussian(xi-0.3)";
    sc.symbol_bound = 1.0;
    sc.hbar_schedule = {1.0, 0.25, 0.125, 0.0625};
    sc.experiments = {"moyal-check"};
    sc.seed = 9;
    sc.expected_summary = "Op(f#g) ≈ Op(f)·Op(g); expansion remainder O(hbar^2)";
    sc.example_tag = "deformed product morphism";
    out.push_back(sc);
  }

  std::sort(out.begin(), out.end(), [](const Scenario& a, const Scenario& b) { return a.name < b.name; });
  return out;
}

std::string print_catalog() {
  std::string out;
  for (const Scenario& sc : builtin_catalog()) {
    out += sc.name;
    out += "  action=" + sc.action_id;
    out += "  symbol=" + (sc.symbol_name.empty() ? sc.symbol_expr : sc.symbol_name);
    out += "  expected: " + sc.expected_summary;
    out += "  [" + sc.example_tag + "]\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Experiment runner

namespace {

struct CsvFile {
  std::ofstream out;
  explicit CsvFile(const fs::path& p) : out(p, std::ios::binary) {
    if (!out) throw ValidationError("out", "cannot open output file " + p.string());
  }
};

std::uint64_t effective_seed(const Scenario& sc, const RunOptions& opt) {
  return opt.seed_override ? *opt.seed_override : sc.seed;
}

void run_spectrum(const Scenario& sc, const RunOptions& opt, const fs::path& dir, RunOutcome& rc) {
  ActionSpec a = scenario_action(sc);
  StateSymbol f = scenario_symbol(sc);
  Grid grid = make_grid(sc.L, sc.N);
  const double hbar = sc.hbar_schedule.front();

  CsvFile csv(dir / "spectrum.csv");
  csv.out << "point_id,value\n";
  std::vector<SpectralSet> spectra;
  for (std::size_t i = 0; i < sc.base_points.size(); ++i) {
    OperatorMatrix M = build_op_matrix(pullback_symbol(f, a, sc.base_points[i]), grid, hbar);
    if (opt.dump_matrix) {
      std::ofstream m(dir / ("matrix_" + std::to_string(i) + ".csv"), std::ios::binary);
      write_matrix_csv(M, m);
      rc.written_files.push_back((dir / ("matrix_" + std::to_string(i) + ".csv")).string());
    }
    SpectralSet s = eigen_spectrum(M, sc.effective_resolution());
    for (double v : s.values()) csv.out << i << ',' << fmt(v) << '\n';
    spectra.push_back(std::move(s));
  }
  rc.written_files.push_back((dir / "spectrum.csv").string());

  if (opt.check && sc.name == "quantum-plane-grid" && spectra.size() >= 2) {
    // Criterion 6: every eigenvalue of H_(1,0) lies near sp(H_(1,1)).
    double worst = 0.0;
    for (double v : spectra[1].values()) {
      double best = std::numeric_limits<double>::infinity();
      for (double w : spectra[0].values()) best = std::min(best, std::abs(v - w));
      worst = std::max(worst, best);
    }
    checks::CheckResult r;
    r.criterion = 6;
    r.name = "spectral inclusion sp(H_(1,0)) ⊂ sp(H_(1,1))";
    r.value = worst;
    r.bound = checks::kInclusionTol;
    r.pass = worst <= r.bound;
    rc.checks.push_back(r);
  }
}

void run_ess(const Scenario& sc, const RunOptions& opt, const fs::path& dir, RunOutcome& rc) {
  ActionSpec a = scenario_action(sc);
  StateSymbol f = scenario_symbol(sc);
  Grid grid = make_grid(sc.L, sc.N);
  const double hbar = sc.hbar_schedule.front();

  EssOptions eo;
  eo.resolution = sc.effective_resolution();
  eo.window_margin = sc.ess_window_margin;
  eo.isolated_gap = sc.ess_isolated_gap;
  eo.stability.match_tol = sc.ess_match_tol;
  if (sc.ess_prev_rung)
    eo.ladder = {{sc.ess_prev_rung->first, sc.ess_prev_rung->second}, {sc.L, sc.N}};

  EssentialSpectrumReport rep = predicted_ess_spectrum(a, sc.base_points.front(), f, grid, hbar, eo);
  {
    CsvFile csv(dir / "ess.csv");
    rep.write_csv(csv.out);
    rc.written_files.push_back((dir / "ess.csv").string());
  }

  if (opt.check) {
    // Only the scenarios with a stated decomposition formula carry an
    // acceptance threshold; second-kind and compact-class scenarios get
    // their report without a pass/fail verdict.
    static const std::map<std::string, std::pair<int, double>> kEssCriteria = {
        {"quantum-plane-grid", {7, checks::kEssHausdorff}},
        {"vo-radial-tanh", {8, checks::kVoRadialBand}},
        {"vo-times-ap", {9, checks::kEssHausdorff}},
        {"vo-plus-ap", {9, checks::kEssHausdorff}},
        {"vo-tensor-vo-tanh", {9, checks::kEssHausdorff}},
    };
    auto it = kEssCriteria.find(sc.name);
    if (it != kEssCriteria.end()) {
      checks::CheckResult r;
      r.criterion = it->second.first;
      r.name = "essential spectrum: hausdorff(predicted, truncation-stable)";
      r.value = rep.hausdorff_distance;
      r.bound = it->second.second;
      r.pass = r.value <= r.bound;
      r.detail = "scenario " + sc.name;
      rc.checks.push_back(r);
    }
  }
}

void run_sweep(const Scenario& sc, const RunOptions& opt, const fs::path& dir, RunOutcome& rc) {
  auto rows = run_hbar_sweep(sc, sc.base_points.front());
  {
    CsvFile csv(dir / "sweep.csv");
    csv.out << "hbar,d_to_classical,n_eigenvalues,runtime_ms\n";
    for (const auto& r : rows)
      csv.out << fmt(r.hbar) << ',' << fmt(r.d_to_classical) << ',' << r.spectrum.size() << ','
              << r.runtime_ms << '\n';
    rc.written_files.push_back((dir / "sweep.csv").string());
  }
  if (opt.check) {
    checks::CheckResult fin;
    fin.criterion = 11;
    fin.name = "semiclassical sweep: final d_to_classical";
    fin.value = rows.back().d_to_classical;
    fin.bound = checks::kSweepFinalDistance;
    fin.pass = fin.value <= fin.bound;
    rc.checks.push_back(fin);

    double worst_increase = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i)
      worst_increase = std::max(worst_increase, rows[i].d_to_classical - rows[i - 1].d_to_classical);
    checks::CheckResult mono;
    mono.criterion = 11;
    mono.name = "semiclassical sweep: max predecessor-to-successor increase";
    mono.value = worst_increase;
    mono.bound = checks::kSweepMaxIncrease;
    mono.pass = worst_increase <= mono.bound;
    rc.checks.push_back(mono);
  }
}

void run_random(const Scenario& sc, const RunOptions& opt, const fs::path& dir, RunOutcome& rc) {
  RandomReport rep = run_random_experiment(sc, sc.random_count, effective_seed(sc, opt));
  {
    CsvFile csv(dir / "random.csv");
    csv.out << "sample_id,max_pairwise_d,n_isolated\n";
    for (std::size_t i = 0; i < rep.points.size(); ++i)
      csv.out << i << ',' << fmt(rep.per_point_max_d[i]) << ',' << rep.isolated[i].size() << '\n';
    rc.written_files.push_back((dir / "random.csv").string());
  }
  if (opt.check) {
    checks::CheckResult d;
    d.criterion = 10;
    d.name = "random base points: max pairwise spectral hausdorff";
    d.value = rep.max_pairwise_d;
    d.bound = checks::kPairwiseHausdorff;
    d.pass = d.value <= d.bound;
    rc.checks.push_back(d);

    std::size_t iso = 0;
    for (const auto& l : rep.isolated) iso += l.size();
    checks::CheckResult v;
    v.criterion = 10;
    v.name = "random base points: isolated eigenvalues away from edges";
    v.value = static_cast<double>(iso);
    v.bound = 0.0;
    v.pass = iso == 0;
    rc.checks.push_back(v);
  }
}

void run_moyal_check(const Scenario& sc, const RunOptions& opt, const fs::path& dir, RunOutcome& rc) {
  ActionSpec a = scenario_action(sc);
  StateSymbol f1 = scenario_symbol(sc, 1);
  StateSymbol f2 = scenario_symbol(sc, 2);
  StatePoint origin = StatePoint::interior(0.0, 0.0);
  PhaseFunction F = pullback_symbol(f1, a, origin);
  PhaseFunction G = pullback_symbol(f2, a, origin);

  auto morphism_error = [&](int N) {
    Grid grid = make_grid(sc.L, N);
    SampledSymbol sf = sample_symbol(F, grid, 1.0);
    SampledSymbol sg = sample_symbol(G, grid, 1.0);
    OperatorMatrix lhs = build_op_matrix_from_samples(moyal_product(sf, sg));
    OperatorMatrix of = build_op_matrix(F, grid, 1.0);
    OperatorMatrix og = build_op_matrix(G, grid, 1.0);
    OperatorMatrix rhs = matrix_product(of, og);
    OperatorMatrix diff = lhs;
    for (std::size_t i = 0; i < diff.entries.size(); ++i) diff.entries[i] -= rhs.entries[i];
    return operator_norm(diff) / (operator_norm(of) * operator_norm(og));
  };
  const double err_n = morphism_error(sc.N);
  const double err_2n = morphism_error(2 * sc.N);

  // O(hbar^2) remainder of the semiclassical expansion on the fixed grid,
  // on the (possibly separate) expansion pair.
  PhaseFunction F3 = pullback_symbol(scenario_symbol(sc, 3), a, origin);
  PhaseFunction G4 = pullback_symbol(scenario_symbol(sc, 4), a, origin);
  Grid grid = make_grid(sc.L, sc.N);
  auto remainder = [&](double h) {
    SampledSymbol sf = sample_symbol(F3, grid, h);
    SampledSymbol sg = sample_symbol(G4, grid, h);
    SampledSymbol prod = moyal_product(sf, sg);
    SampledSymbol bracket = poisson_bracket(sf, sg);
    double worst = 0.0;
    const std::complex<double> ih2(0.0, 0.5 * h);
    for (std::size_t i = 0; i < prod.values.size(); ++i) {
      std::complex<double> r = prod.values[i] - sf.values[i] * sg.values[i] - ih2 * bracket.values[i];
      worst = std::max(worst, std::abs(r));
    }
    return worst;
  };
  const double r4 = remainder(0.25), r8 = remainder(0.125), r16 = remainder(0.0625);

  {
    CsvFile csv(dir / "moyal.csv");
    csv.out << "metric,value\n";
    csv.out << "morphism_rel_error_N," << fmt(err_n) << '\n';
    csv.out << "morphism_rel_error_2N," << fmt(err_2n) << '\n';
    csv.out << "remainder_hbar_0.25," << fmt(r4) << '\n';
    csv.out << "remainder_hbar_0.125," << fmt(r8) << '\n';
    csv.out << "remainder_hbar_0.0625," << fmt(r16) << '\n';
    csv.out << "shrink_4_to_8," << fmt(r4 / r8) << '\n';
    csv.out << "shrink_8_to_16," << fmt(r8 / r16) << '\n';
    rc.written_files.push_back((dir / "moyal.csv").string());
  }

  if (opt.check) {
    checks::CheckResult m;
    m.criterion = 2;
    m.name = "morphism: rel error of Op(f#g) vs Op(f)Op(g) at N";
    m.value = err_n;
    m.bound = checks::kMorphismRelError;
    m.pass = err_n <= m.bound && err_2n < err_n;
    m.detail = "err(2N) = " + fmt(err_2n);
    rc.checks.push_back(m);

    checks::CheckResult e;
    e.criterion = 3;
    e.name = "semiclassical expansion remainder shrink per hbar halving";
    e.value = std::min(r4 / r8, r8 / r16);
    e.bound = checks::kExpansionShrink;
    e.pass = e.value >= e.bound;
    rc.checks.push_back(e);
  }
}

}  // namespace

RunOutcome run_experiments(const Scenario& sc, std::vector<std::string> experiments,
                           const RunOptions& opt) {
  if (experiments.empty()) experiments = sc.experiments;
  for (const auto& e : experiments)
    if (!kKnownExperiments.count(e))
      throw ValidationError("experiments", "unknown experiment '" + e + "'");

  // --out wins; otherwise the scenario's own run.out, defaulting to ./out
  fs::path root = opt.out_dir.empty() ? fs::path(sc.output_path) : fs::path(opt.out_dir);
  fs::path dir = root / sc.name;
  fs::create_directories(dir);

  RunOutcome rc;
  for (const auto& e : experiments) {
    if (e == "spectrum") run_spectrum(sc, opt, dir, rc);
    else if (e == "ess-spectrum") run_ess(sc, opt, dir, rc);
    else if (e == "sweep") run_sweep(sc, opt, dir, rc);
    else if (e == "random") run_random(sc, opt, dir, rc);
    else if (e == "moyal-check") run_moyal_check(sc, opt, dir, rc);
  }
  return rc;
}

}  // namespace qspec
