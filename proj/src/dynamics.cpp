#include "qspec/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace qspec {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

std::string fmt_angle(double phi) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", phi);
  return buf;
}

double sq(double v) { return v * v; }

// Chart helpers for state_distance.
double compactify(double t) { return t / (1.0 + std::abs(t)); }

double torus_chart_dist(double a, double b) {
  return std::hypot(std::cos(a) - std::cos(b), std::sin(a) - std::sin(b));
}

std::mt19937_64 stream_for(std::uint64_t seed, std::uint64_t task) {
  // Distinct deterministic stream per (seed, task index).
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (task + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return std::mt19937_64(z ^ (z >> 31));
}

StatePoint interior2(double a, double b) { return StatePoint::interior(a, b); }

}  // namespace

void ActionSpec::validate_point(const StatePoint& s) const {
  if (s.is_interior()) {
    if (s.coords.size() != 2 * n)
      throw ValidationError("StatePoint", "interior point must have 2n = " + std::to_string(2 * n) +
                                              " coordinates, got " + std::to_string(s.coords.size()));
    return;
  }
  if (std::find(boundary_alphabet.begin(), boundary_alphabet.end(), s.tag) == boundary_alphabet.end())
    throw ValidationError("StatePoint.tag",
                          "tag '" + s.tag + "' not in the boundary alphabet of action '" + id_string + "'");
}

// ---------------------------------------------------------------------------
// Translation: Σ = Ξ = ℝ², the action of Ξ on itself. C(Ξ) quantizes to the
// compact operators; the single quasi-orbit is Ξ itself.

ActionSpec make_translation_action() {
  ActionSpec a;
  a.catalog_id = CatalogId::Translation;
  a.id_string = "translation";
  a.n = 1;

  a.evaluator = [](const StatePoint& s, const PhasePoint& X) {
    StatePoint r = s;
    r.coords[0] += X.x[0];
    r.coords[1] += X.xi[0];
    return r;
  };

  QuasiOrbit xi;
  xi.id = "Xi";
  xi.kind = OrbitKind::First;
  xi.minimal = true;
  xi.generating_point = interior2(0.0, 0.0);
  xi.note = "quantization of C(Xi) is the compact operators; 0 is the only essential point";
  a.table = {xi};

  a.classifier = [xi](const StatePoint&) { return xi; };
  a.state_distance = [](const StatePoint& p, const StatePoint& q) {
    return std::hypot(p.coords[0] - q.coords[0], p.coords[1] - q.coords[1]);
  };
  a.state_sampler = [](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    return interior2(u(rng), u(rng));
  };
  return a;
}

// ---------------------------------------------------------------------------
// RadialVO: Σ = ℝ² ⊔ S¹, translations extended to the radial
// compactification; every boundary direction is a fixed point. The table
// lists a finite set of representative directions; exact for symbols whose
// radial limit is direction-independent.

ActionSpec make_radial_vo_action(int representative_directions) {
  ActionSpec a;
  a.catalog_id = CatalogId::RadialVO;
  a.id_string = "radial-vo";
  a.n = 1;
  a.boundary_alphabet = {"dir"};

  a.evaluator = [](const StatePoint& s, const PhasePoint& X) {
    if (!s.is_interior()) return s;  // boundary directions are fixed points
    StatePoint r = s;
    r.coords[0] += X.x[0];
    r.coords[1] += X.xi[0];
    return r;
  };

  const int K = representative_directions;
  QuasiOrbit full;
  full.id = "full";
  full.kind = OrbitKind::First;
  full.minimal = false;
  full.generating_point = interior2(0.0, 0.0);
  full.sample_radius = 1e4;
  full.denseness_distance = 0.05;
  a.table.push_back(full);
  for (int k = 0; k < K; ++k) {
    double phi = kTwoPi * k / K;
    QuasiOrbit fp;
    fp.id = "fixed@" + std::to_string(k);
    fp.kind = OrbitKind::Second;
    fp.minimal = true;
    fp.generating_point = StatePoint::boundary("dir", {phi});
    fp.hint.kind = SpectrumHint::Kind::MultiplicationInX;  // constant multiplier
    fp.note = "boundary fixed point, constant asymptotic Hamiltonian";
    a.table.push_back(fp);
    a.table[0].non_generic_cover.push_back(fp.id);
  }

  a.classifier = [a_table = a.table, K](const StatePoint& s) -> QuasiOrbit {
    if (s.is_interior()) return a_table[0];
    double phi = s.coords.at(0);
    for (int k = 0; k < K; ++k) {
      double rep = kTwoPi * k / K;
      if (torus_chart_dist(phi, rep) < 1e-12) return a_table[static_cast<std::size_t>(k) + 1];
    }
    QuasiOrbit fp;
    fp.id = "fixed(" + fmt_angle(phi) + ")";
    fp.kind = OrbitKind::Second;
    fp.minimal = true;
    fp.generating_point = s;
    fp.hint.kind = SpectrumHint::Kind::MultiplicationInX;
    return fp;
  };

  a.state_distance = [](const StatePoint& p, const StatePoint& q) {
    auto chart = [](const StatePoint& s) -> std::array<double, 2> {
      if (s.is_interior()) {
        double r = std::hypot(s.coords[0], s.coords[1]);
        if (r == 0.0) return {0.0, 0.0};
        double rho = r / (1.0 + r);
        return {rho * s.coords[0] / r, rho * s.coords[1] / r};
      }
      return {std::cos(s.coords[0]), std::sin(s.coords[0])};
    };
    auto cp = chart(p), cq = chart(q);
    return std::hypot(cp[0] - cq[0], cp[1] - cq[1]);
  };
  a.state_sampler = [K](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(rng) < 0.25) {
      int k = static_cast<int>(u(rng) * K) % K;
      return StatePoint::boundary("dir", {kTwoPi * k / K});
    }
    std::uniform_real_distribution<double> box(-3.0, 3.0);
    return interior2(box(rng), box(rng));
  };
  return a;
}

// ---------------------------------------------------------------------------
// TorusAP: Σ = 𝕋², Θ_X(θ) = θ + M·X with rationally independent rows, so
// the orbit map is onto and the system is minimal (asserted metadata).
// Angles are kept unwrapped; the trig charts make wrapping immaterial.

ActionSpec make_torus_ap_action(std::array<double, 4> freq) {
  ActionSpec a;
  a.catalog_id = CatalogId::TorusAP;
  a.id_string = "torus-ap";
  a.n = 1;

  a.evaluator = [freq](const StatePoint& s, const PhasePoint& X) {
    StatePoint r = s;
    r.coords[0] += freq[0] * X.x[0] + freq[1] * X.xi[0];
    r.coords[1] += freq[2] * X.x[0] + freq[3] * X.xi[0];
    return r;
  };

  QuasiOrbit torus;
  torus.id = "torus";
  torus.kind = OrbitKind::Second;
  torus.minimal = true;
  torus.generating_point = interior2(0.0, 0.0);
  torus.note = "minimal almost-periodic system; spectrum purely essential";
  a.table = {torus};
  a.classifier = [torus](const StatePoint&) { return torus; };

  a.state_distance = [](const StatePoint& p, const StatePoint& q) {
    return torus_chart_dist(p.coords[0], q.coords[0]) + torus_chart_dist(p.coords[1], q.coords[1]);
  };
  a.state_sampler = [](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    return interior2(u(rng), u(rng));
  };
  return a;
}

// ---------------------------------------------------------------------------
// VOtimesAP: Σ = Ξ ⊔ (S¹ × 𝕋²). Interior points translate; at infinity the
// radial direction freezes while the torus factor keeps rotating (AP factor
// with unit frequencies). Non-generic quasi-orbits are {dir} × 𝕋².

ActionSpec make_vo_times_ap_action(int representative_directions) {
  ActionSpec a;
  a.catalog_id = CatalogId::VOtimesAP;
  a.id_string = "vo-ap";
  a.n = 1;
  a.boundary_alphabet = {"dir-torus"};

  a.evaluator = [](const StatePoint& s, const PhasePoint& X) {
    StatePoint r = s;
    if (s.is_interior()) {
      r.coords[0] += X.x[0];
      r.coords[1] += X.xi[0];
    } else {
      r.coords[1] += X.x[0];  // θ1
      r.coords[2] += X.xi[0]; // θ2
    }
    return r;
  };

  const int K = representative_directions;
  QuasiOrbit full;
  full.id = "full";
  full.kind = OrbitKind::First;
  full.minimal = false;
  full.generating_point = interior2(0.0, 0.0);
  full.sample_radius = 1e6;
  full.denseness_distance = 0.3;
  a.table.push_back(full);
  for (int k = 0; k < K; ++k) {
    double phi = kTwoPi * k / K;
    QuasiOrbit ap;
    ap.id = "ap@" + std::to_string(k);
    ap.kind = OrbitKind::Second;
    ap.minimal = true;
    ap.generating_point = StatePoint::boundary("dir-torus", {phi, 0.0, 0.0});
    ap.note = "torus at a frozen direction; purely almost-periodic Hamiltonian";
    a.table.push_back(ap);
    a.table[0].non_generic_cover.push_back(ap.id);
  }

  a.classifier = [a_table = a.table, K](const StatePoint& s) -> QuasiOrbit {
    if (s.is_interior()) return a_table[0];
    double phi = s.coords.at(0);
    for (int k = 0; k < K; ++k) {
      if (torus_chart_dist(phi, kTwoPi * k / K) < 1e-12)
        return a_table[static_cast<std::size_t>(k) + 1];
    }
    QuasiOrbit ap;
    ap.id = "ap(" + fmt_angle(phi) + ")";
    ap.kind = OrbitKind::Second;
    ap.minimal = true;
    ap.generating_point = s;
    return ap;
  };

  a.state_distance = [](const StatePoint& p, const StatePoint& q) {
    auto chart = [](const StatePoint& s) -> std::array<double, 6> {
      if (s.is_interior()) {
        double r = std::hypot(s.coords[0], s.coords[1]);
        double rho = r == 0.0 ? 0.0 : r / (1.0 + r);
        double cx = r == 0.0 ? 0.0 : rho * s.coords[0] / r;
        double cy = r == 0.0 ? 0.0 : rho * s.coords[1] / r;
        return {cx, cy, std::cos(s.coords[0]), std::sin(s.coords[0]), std::cos(s.coords[1]),
                std::sin(s.coords[1])};
      }
      return {std::cos(s.coords[0]), std::sin(s.coords[0]), std::cos(s.coords[1]),
              std::sin(s.coords[1]), std::cos(s.coords[2]), std::sin(s.coords[2])};
    };
    auto cp = chart(p), cq = chart(q);
    double d2 = 0.0;
    for (int i = 0; i < 6; ++i) d2 += sq(cp[i] - cq[i]);
    return std::sqrt(d2);
  };
  a.state_sampler = [K](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(rng) < 0.25) {
      int k = static_cast<int>(u(rng) * K) % K;
      std::uniform_real_distribution<double> ang(0.0, kTwoPi);
      return StatePoint::boundary("dir-torus", {kTwoPi * k / K, ang(rng), ang(rng)});
    }
    std::uniform_real_distribution<double> box(-3.0, 3.0);
    return interior2(box(rng), box(rng));
  };
  return a;
}

// ---------------------------------------------------------------------------
// VOtensorVO: Σ = (ℝ ⊔ {±∞}) × (ℝ ⊔ {±∞}), per-factor two-point
// compactification. Slices at infinity keep translating in the live
// variable; corners are fixed points.

ActionSpec make_vo_tensor_vo_action() {
  ActionSpec a;
  a.catalog_id = CatalogId::VOtensorVO;
  a.id_string = "vo-tensor-vo";
  a.n = 1;
  a.boundary_alphabet = {"x+", "x-", "xi+", "xi-", "x+xi+", "x+xi-", "x-xi+", "x-xi-"};

  a.evaluator = [](const StatePoint& s, const PhasePoint& X) {
    StatePoint r = s;
    if (s.is_interior()) {
      r.coords[0] += X.x[0];
      r.coords[1] += X.xi[0];
    } else if (s.tag == "x+" || s.tag == "x-") {
      r.coords[0] += X.xi[0];  // the ξ coordinate stays live
    } else if (s.tag == "xi+" || s.tag == "xi-") {
      r.coords[0] += X.x[0];  // the x coordinate stays live
    }  // corners fixed
    return r;
  };

  auto corner = [](const std::string& tag) {
    QuasiOrbit c;
    c.id = "corner-" + tag;
    c.kind = OrbitKind::Second;
    c.minimal = true;
    c.generating_point = StatePoint::boundary(tag, {});
    c.hint.kind = SpectrumHint::Kind::MultiplicationInX;  // constant multiplier
    return c;
  };
  auto slice = [](const std::string& tag, SpectrumHint::Kind hint, std::vector<std::string> cover) {
    QuasiOrbit s;
    s.id = "slice-" + tag;
    s.kind = OrbitKind::Second;
    s.minimal = false;
    s.generating_point = StatePoint::boundary(tag, {0.0});
    s.non_generic_cover = std::move(cover);
    s.hint.kind = hint;
    s.sample_radius = 100.0;
    s.denseness_distance = 0.05;
    return s;
  };

  QuasiOrbit full;
  full.id = "full";
  full.kind = OrbitKind::First;
  full.minimal = false;
  full.generating_point = interior2(0.0, 0.0);
  full.non_generic_cover = {"slice-x+", "slice-x-", "slice-xi+", "slice-xi-"};
  full.sample_radius = 100.0;
  full.denseness_distance = 0.05;
  full.note = "corners omitted from the cover: contained in the slices";

  a.table = {full,
             slice("x+", SpectrumHint::Kind::MultiplicationInXi, {"corner-x+xi+", "corner-x+xi-"}),
             slice("x-", SpectrumHint::Kind::MultiplicationInXi, {"corner-x-xi+", "corner-x-xi-"}),
             slice("xi+", SpectrumHint::Kind::MultiplicationInX, {"corner-x+xi+", "corner-x-xi+"}),
             slice("xi-", SpectrumHint::Kind::MultiplicationInX, {"corner-x+xi-", "corner-x-xi-"}),
             corner("x+xi+"), corner("x+xi-"), corner("x-xi+"), corner("x-xi-")};

  a.classifier = [table = a.table](const StatePoint& s) -> QuasiOrbit {
    if (s.is_interior()) return table[0];
    for (const auto& e : table) {
      if (!e.generating_point.is_interior() && e.generating_point.tag == s.tag) return e;
    }
    throw ValidationError("StatePoint.tag", "tag '" + s.tag + "' not classified");
  };

  a.state_distance = [](const StatePoint& p, const StatePoint& q) {
    auto chart = [](const StatePoint& s) -> std::array<double, 2> {
      if (s.is_interior()) return {compactify(s.coords[0]), compactify(s.coords[1])};
      if (s.tag == "x+") return {1.0, compactify(s.coords[0])};
      if (s.tag == "x-") return {-1.0, compactify(s.coords[0])};
      if (s.tag == "xi+") return {compactify(s.coords[0]), 1.0};
      if (s.tag == "xi-") return {compactify(s.coords[0]), -1.0};
      double sx = s.tag[1] == '+' ? 1.0 : -1.0;
      double sxi = s.tag.back() == '+' ? 1.0 : -1.0;
      return {sx, sxi};
    };
    auto cp = chart(p), cq = chart(q);
    return std::hypot(cp[0] - cq[0], cp[1] - cq[1]);
  };
  a.state_sampler = [](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_real_distribution<double> box(-3.0, 3.0);
    double pick = u(rng);
    if (pick < 0.15) return StatePoint::boundary(u(rng) < 0.5 ? "x+" : "x-", {box(rng)});
    if (pick < 0.3) return StatePoint::boundary(u(rng) < 0.5 ? "xi+" : "xi-", {box(rng)});
    return interior2(box(rng), box(rng));
  };
  return a;
}

// ---------------------------------------------------------------------------
// RealQuantumPlane: Ξ = ℝ² acting on itself by Θ_{(x,ξ)}(y,η) = (eˣy, e^ξη).
// Nine quasi-orbits: four closed quarter-planes (first kind), four
// coordinate semi-axes and the origin (second kind).

ActionSpec make_real_quantum_plane_action() {
  ActionSpec a;
  a.catalog_id = CatalogId::RealQuantumPlane;
  a.id_string = "real-quantum-plane";
  a.n = 1;

  a.evaluator = [](const StatePoint& s, const PhasePoint& X) {
    StatePoint r = s;
    r.coords[0] *= std::exp(X.x[0]);
    r.coords[1] *= std::exp(X.xi[0]);
    return r;
  };

  auto axis = [](const std::string& id, double gy, double geta, SpectrumHint::Kind hint) {
    QuasiOrbit ax;
    ax.id = id;
    ax.kind = OrbitKind::Second;
    ax.minimal = false;
    ax.generating_point = interior2(gy, geta);
    ax.non_generic_cover = {"origin"};
    ax.hint.kind = hint;
    ax.note = "multiplication operator in closed form";
    ax.sample_radius = 40.0;
    ax.denseness_distance = 0.02;
    return ax;
  };
  auto quarter = [](const std::string& id, double gy, double geta, std::vector<std::string> cover) {
    QuasiOrbit q;
    q.id = id;
    q.kind = OrbitKind::First;
    q.minimal = false;
    q.generating_point = interior2(gy, geta);
    q.non_generic_cover = std::move(cover);
    q.note = "origin omitted from the cover: contained in both semi-axes";
    q.sample_radius = 40.0;
    q.denseness_distance = 0.02;
    return q;
  };

  QuasiOrbit origin;
  origin.id = "origin";
  origin.kind = OrbitKind::Second;
  origin.minimal = true;
  origin.generating_point = interior2(0.0, 0.0);
  origin.hint.kind = SpectrumHint::Kind::MultiplicationInX;  // constant f(0,0)
  origin.note = "fixed point; H = f(0,0)·id";

  a.table = {quarter("qp++", 1.0, 1.0, {"axis-x+", "axis-xi+"}),
             quarter("qp+-", 1.0, -1.0, {"axis-x+", "axis-xi-"}),
             quarter("qp-+", -1.0, 1.0, {"axis-x-", "axis-xi+"}),
             quarter("qp--", -1.0, -1.0, {"axis-x-", "axis-xi-"}),
             axis("axis-x+", 1.0, 0.0, SpectrumHint::Kind::MultiplicationInX),
             axis("axis-x-", -1.0, 0.0, SpectrumHint::Kind::MultiplicationInX),
             axis("axis-xi+", 0.0, 1.0, SpectrumHint::Kind::MultiplicationInXi),
             axis("axis-xi-", 0.0, -1.0, SpectrumHint::Kind::MultiplicationInXi),
             origin};

  a.classifier = [table = a.table](const StatePoint& s) -> QuasiOrbit {
    double y = s.coords[0], eta = s.coords[1];
    auto get = [&table](const std::string& id) {
      for (const auto& e : table)
        if (e.id == id) return e;
      throw ValidationError("QuasiOrbit", "missing table entry " + id);
    };
    if (y == 0.0 && eta == 0.0) return get("origin");
    if (y == 0.0) return get(eta > 0 ? "axis-xi+" : "axis-xi-");
    if (eta == 0.0) return get(y > 0 ? "axis-x+" : "axis-x-");
    if (y > 0) return get(eta > 0 ? "qp++" : "qp+-");
    return get(eta > 0 ? "qp-+" : "qp--");
  };

  a.state_distance = [](const StatePoint& p, const StatePoint& q) {
    return std::hypot(p.coords[0] - q.coords[0], p.coords[1] - q.coords[1]);
  };
  a.state_sampler = [](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> box(-3.0, 3.0);
    return interior2(box(rng), box(rng));
  };
  return a;
}

ActionSpec make_action(const std::string& id_string, std::optional<std::array<double, 4>> torus_freq) {
  if (id_string == "translation") return make_translation_action();
  if (id_string == "radial-vo") return make_radial_vo_action();
  if (id_string == "torus-ap")
    return torus_freq ? make_torus_ap_action(*torus_freq) : make_torus_ap_action();
  if (id_string == "vo-ap") return make_vo_times_ap_action();
  if (id_string == "vo-tensor-vo") return make_vo_tensor_vo_action();
  if (id_string == "real-quantum-plane") return make_real_quantum_plane_action();
  throw ValidationError("action.id", "unknown catalog action '" + id_string + "'");
}

// ---------------------------------------------------------------------------
// Operations

StatePoint act(const ActionSpec& a, const StatePoint& sigma, const PhasePoint& X) {
  a.validate_point(sigma);
  if (X.dim() != a.n) throw ValidationError("PhasePoint", "dimension mismatch with action");
  return a.evaluator(sigma, X);
}

PhaseFunction pullback_symbol(const StateSymbol& f, const ActionSpec& a, const StatePoint& sigma) {
  a.validate_point(sigma);
  if (a.n != 1) throw ValidationError("action.n", "pullback to a phase function requires n = 1");
  PhaseFunction F;
  F.real_valued = f.real_valued;
  F.bound = f.bound;
  F.provenance = f.name + " pulled back along " + a.id_string;
  F.eval = [f, ev = a.evaluator, sigma](double x, double xi) {
    return f.eval(ev(sigma, PhasePoint(x, xi)));
  };
  return F;
}

QuasiOrbit quasi_orbit_of(const ActionSpec& a, const StatePoint& sigma) {
  a.validate_point(sigma);
  return a.classifier(sigma);
}

OrbitKind classify_kind(const QuasiOrbit& E) {
  if (E.minimal && E.id != "Xi" && E.kind != OrbitKind::Second)
    throw ValidationError("QuasiOrbit", "minimal quasi-orbit '" + E.id + "' must be of the second kind");
  return E.kind;
}

std::vector<QuasiOrbit> non_generic_suborbits(const ActionSpec& a, const QuasiOrbit& E) {
  if (E.kind == OrbitKind::Second)
    throw ValidationError("QuasiOrbit",
                          "quasi-orbit '" + E.id + "' is of the second kind; sp_ess = sp applies instead");
  std::vector<QuasiOrbit> out;
  out.reserve(E.non_generic_cover.size());
  for (const auto& id : E.non_generic_cover) {
    const QuasiOrbit* e = a.find(id);
    if (!e) throw ValidationError("QuasiOrbit", "cover id '" + id + "' missing from table");
    out.push_back(*e);
  }
  return out;
}

double equivariance_residual(
    const std::function<std::complex<double>(const StatePoint&, const PhasePoint&)>& F,
    const ActionSpec& a, int samples, std::uint64_t seed) {
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    auto rng = stream_for(seed, static_cast<std::uint64_t>(i));
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    StatePoint sigma = a.state_sampler(rng);
    PhasePoint X(u(rng), u(rng)), Y(u(rng), u(rng));
    std::complex<double> lhs = F(act(a, sigma, Y), X);
    std::complex<double> rhs = F(sigma, X + Y);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

std::complex<double> ergodic_average(const StateSymbol& g, const ActionSpec& a,
                                     const StatePoint& sigma, double R, int quadrature_points) {
  if (!(R > 0.0)) throw ValidationError("R", "ball radius must be positive");
  if (quadrature_points < 2) throw ValidationError("quadrature_points", "need at least 2 points per axis");
  if (a.n != 1) throw ValidationError("action.n", "ergodic_average implemented for n = 1");
  const int q = quadrature_points;
  const double h = 2.0 * R / q;
  std::complex<double> acc(0.0, 0.0);
  double measure = 0.0;
  for (int i = 0; i < q; ++i) {
    double x = -R + (i + 0.5) * h;
    for (int j = 0; j < q; ++j) {
      double xi = -R + (j + 0.5) * h;
      if (x * x + xi * xi > R * R) continue;
      acc += g.eval(act(a, sigma, PhasePoint(x, xi)));
      measure += 1.0;
    }
  }
  if (measure == 0.0) throw ValidationError("R", "quadrature resolved no cell inside the ball");
  return acc / measure;  // cell areas cancel, so a constant g averages to itself exactly
}

// ---------------------------------------------------------------------------
// State-symbol builders

StateSymbol state_symbol_from_expr(const SymbolExpr& f, std::optional<double> bound) {
  StateSymbol s;
  s.name = f.print();
  s.bound = bound ? bound : f.bound;
  s.real_valued = true;
  s.eval = [f](const StatePoint& p) {
    if (!p.is_interior())
      throw EvalError("expression symbol has no boundary extension", "tag '" + p.tag + "'");
    return f.eval(p.as_phase_point());
  };
  return s;
}

StateSymbol radial_tanh_symbol(double scale) {
  if (!(scale > 0.0)) throw ValidationError("scale", "radial-tanh scale must be positive");
  StateSymbol s;
  s.name = "radial-tanh(scale=" + fmt_angle(scale) + ")";
  s.bound = 1.0;
  s.eval = [scale](const StatePoint& p) -> std::complex<double> {
    if (!p.is_interior()) {
      if (p.tag != "dir") throw EvalError("radial-tanh has no extension", "tag '" + p.tag + "'");
      return 1.0;  // the single radial limit
    }
    double r2 = sq(p.coords[0]) + sq(p.coords[1]);
    return std::tanh(r2 / (scale * scale));
  };
  return s;
}

namespace {

double vo_profile(double r2, double c, double g0, double w) {
  return c + (g0 - c) * std::exp(-r2 / (w * w));
}

}  // namespace

StateSymbol vo_times_harper_symbol(double c, double g0, double w) {
  if (!(w > 0.0)) throw ValidationError("w", "VO profile width must be positive");
  StateSymbol s;
  s.name = "vo-times-harper(c=" + fmt_angle(c) + ",g0=" + fmt_angle(g0) + ",w=" + fmt_angle(w) + ")";
  s.bound = 2.0 * (std::abs(c) + std::abs(g0 - c));
  s.eval = [c, g0, w](const StatePoint& p) -> std::complex<double> {
    if (p.is_interior()) {
      double y = p.coords[0], eta = p.coords[1];
      return vo_profile(y * y + eta * eta, c, g0, w) * (std::cos(y) + std::cos(eta));
    }
    if (p.tag != "dir-torus" || p.coords.size() != 3)
      throw EvalError("vo-times-harper has no extension", "tag '" + p.tag + "'");
    return c * (std::cos(p.coords[1]) + std::cos(p.coords[2]));
  };
  return s;
}

StateSymbol vo_plus_harper_symbol(double c, double g0, double w) {
  if (!(w > 0.0)) throw ValidationError("w", "VO profile width must be positive");
  StateSymbol s;
  s.name = "vo-plus-harper(c=" + fmt_angle(c) + ",g0=" + fmt_angle(g0) + ",w=" + fmt_angle(w) + ")";
  s.bound = std::abs(c) + std::abs(g0 - c) + 2.0;
  s.eval = [c, g0, w](const StatePoint& p) -> std::complex<double> {
    if (p.is_interior()) {
      double y = p.coords[0], eta = p.coords[1];
      return vo_profile(y * y + eta * eta, c, g0, w) + std::cos(y) + std::cos(eta);
    }
    if (p.tag != "dir-torus" || p.coords.size() != 3)
      throw EvalError("vo-plus-harper has no extension", "tag '" + p.tag + "'");
    return c + std::cos(p.coords[1]) + std::cos(p.coords[2]);
  };
  return s;
}

StateSymbol tanh_prod_symbol() {
  StateSymbol s;
  s.name = "tanh-prod";
  s.bound = 1.0;
  s.eval = [](const StatePoint& p) -> std::complex<double> {
    if (p.is_interior()) return std::tanh(p.coords[0]) * std::tanh(p.coords[1]);
    if (p.tag == "x+") return std::tanh(p.coords[0]);
    if (p.tag == "x-") return -std::tanh(p.coords[0]);
    if (p.tag == "xi+") return std::tanh(p.coords[0]);
    if (p.tag == "xi-") return -std::tanh(p.coords[0]);
    if (p.tag.size() == 5 && p.tag[0] == 'x' && (p.tag[1] == '+' || p.tag[1] == '-')) {
      double sx = p.tag[1] == '+' ? 1.0 : -1.0;
      double sxi = p.tag.back() == '+' ? 1.0 : -1.0;
      return sx * sxi;
    }
    throw EvalError("tanh-prod has no extension", "tag '" + p.tag + "'");
  };
  return s;
}

StateSymbol make_named_symbol(const std::string& name, const std::map<std::string, double>& params) {
  auto get = [&params](const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  if (name == "radial-tanh") return radial_tanh_symbol(get("scale", 2.0));
  if (name == "vo-times-harper") return vo_times_harper_symbol(get("c", 0.7), get("g0", 0.0), get("w", 1.0));
  if (name == "vo-plus-harper") return vo_plus_harper_symbol(get("c", 0.4), get("g0", 0.7), get("w", 1.0));
  if (name == "tanh-prod") return tanh_prod_symbol();
  throw ValidationError("symbol.name", "unknown catalog symbol '" + name + "'");
}

}  // namespace qspec
