#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qspec/phase.hpp"
#include "qspec/phase_function.hpp"
#include "qspec/symbol.hpp"

namespace qspec {

/// A point of the state space Σ: either an interior point (coordinates of
/// Ξ, or torus angles) or a boundary point of a catalog compactification,
/// named by a tag from the action's boundary alphabet plus chart
/// coordinates (e.g. the angle of a radial direction).
struct StatePoint {
  std::string tag;             // empty = interior
  std::vector<double> coords;  // interior: (x.., xi..); boundary: per-tag chart

  bool is_interior() const { return tag.empty(); }

  static StatePoint interior(const PhasePoint& X) {
    StatePoint s;
    s.coords = X.x;
    s.coords.insert(s.coords.end(), X.xi.begin(), X.xi.end());
    return s;
  }
  static StatePoint interior(double x, double xi) { return interior(PhasePoint(x, xi)); }
  static StatePoint boundary(std::string tag, std::vector<double> coords) {
    StatePoint s;
    s.tag = std::move(tag);
    s.coords = std::move(coords);
    return s;
  }

  PhasePoint as_phase_point() const {
    if (!is_interior()) throw ValidationError("StatePoint", "boundary point has no phase coordinates");
    std::size_t n = coords.size() / 2;
    return PhasePoint(std::vector<double>(coords.begin(), coords.begin() + n),
                      std::vector<double>(coords.begin() + n, coords.end()));
  }
};

enum class OrbitKind { First, Second };

/// Closed-form spectral structure of an asymptotic Hamiltonian, when the
/// catalog knows one. The multiplier is the pullback at the quasi-orbit's
/// generating point, restricted to the live variable.
struct SpectrumHint {
  enum class Kind { None, MultiplicationInX, MultiplicationInXi };
  Kind kind = Kind::None;
};

/// A quasi-orbit E = closure of an orbit, as analytic catalog metadata:
/// its kind (Def. of first/second kind), minimality, a generating point
/// σ ∝ E, and a covering of its non-generic part by sub-quasi-orbit ids.
struct QuasiOrbit {
  std::string id;
  OrbitKind kind = OrbitKind::Second;
  bool minimal = false;
  StatePoint generating_point;
  std::vector<std::string> non_generic_cover;  // empty iff minimal
  SpectrumHint hint;
  std::string note;

  // Test metadata for the orbit-denseness proxy: sample |X| up to
  // sample_radius and expect approach within denseness_distance.
  double sample_radius = 0.0;
  double denseness_distance = 0.0;
};

enum class CatalogId { Translation, RadialVO, TorusAP, VOtimesAP, VOtensorVO, RealQuantumPlane };

/// A symbol f defined on the state space Σ of a catalog action: evaluable
/// at interior points and at every boundary tag of that action.
struct StateSymbol {
  std::function<std::complex<double>(const StatePoint&)> eval;
  std::string name;
  bool real_valued = true;
  std::optional<double> bound;

  std::complex<double> operator()(const StatePoint& s) const { return eval(s); }
};

/// A group action Θ of Ξ = ℝ²ⁿ on a state space Σ, shipped with its
/// analytic quasi-orbit lattice. Instances come from the catalog factories
/// below; the tables are metadata, not runtime inference.
class ActionSpec {
 public:
  CatalogId catalog_id = CatalogId::Translation;
  std::string id_string;
  std::size_t n = 1;
  std::vector<std::string> boundary_alphabet;

  std::function<StatePoint(const StatePoint&, const PhasePoint&)> evaluator;
  /// Maps a state point to its quasi-orbit (synthesizing parametric
  /// entries, e.g. a boundary fixed point at an arbitrary angle).
  std::function<QuasiOrbit(const StatePoint&)> classifier;
  /// Chart metric on Σ used by the orbit-denseness tests.
  std::function<double(const StatePoint&, const StatePoint&)> state_distance;
  /// Seeded state sampler used by equivariance checks.
  std::function<StatePoint(std::mt19937_64&)> state_sampler;

  std::vector<QuasiOrbit> table;

  const QuasiOrbit* find(const std::string& id) const {
    for (const auto& e : table)
      if (e.id == id) return &e;
    return nullptr;
  }

  void validate_point(const StatePoint& s) const;
};

// Catalog factories. All are n = 1 state spaces over Ξ = ℝ².
ActionSpec make_translation_action();
ActionSpec make_radial_vo_action(int representative_directions = 8);
ActionSpec make_torus_ap_action(std::array<double, 4> freq = {1.0, 0.0, 0.0, 1.4142135623730951});
ActionSpec make_vo_times_ap_action(int representative_directions = 2);
ActionSpec make_vo_tensor_vo_action();
ActionSpec make_real_quantum_plane_action();

/// Factory by catalog id string ("translation", "radial-vo", "torus-ap",
/// "vo-ap", "vo-tensor-vo", "real-quantum-plane").
ActionSpec make_action(const std::string& id_string,
                       std::optional<std::array<double, 4>> torus_freq = std::nullopt);

// Operations

/// Θ_X(σ). Throws if σ's tag is not in the action's alphabet.
StatePoint act(const ActionSpec& a, const StatePoint& sigma, const PhasePoint& X);

/// 𝒫_σ(f) = f∘Θ_σ as an evaluable phase function F_σ(X) = f(Θ_X(σ)).
PhaseFunction pullback_symbol(const StateSymbol& f, const ActionSpec& a, const StatePoint& sigma);

/// The table entry E_σ with σ ∝ E_σ.
QuasiOrbit quasi_orbit_of(const ActionSpec& a, const StatePoint& sigma);

/// The kind label, with the lattice consistency check
/// (minimal ∧ id ≠ "Xi" ⇒ second kind).
OrbitKind classify_kind(const QuasiOrbit& E);

/// The declared covering Q₁(E) of E^n by quasi-orbits. Errors if E is of
/// the second kind (there sp_ess = sp applies instead of a decomposition).
std::vector<QuasiOrbit> non_generic_suborbits(const ActionSpec& a, const QuasiOrbit& E);

/// Max over seeded samples (σ, X, Y) of |F(Θ_Y σ, X) − F(σ, X+Y)|.
double equivariance_residual(
    const std::function<std::complex<double>(const StatePoint&, const PhasePoint&)>& F,
    const ActionSpec& a, int samples, std::uint64_t seed);

/// Ball average (1/|B_R|)∫_{B_R} g(Θ_X(σ)) dX by tensor-product midpoint
/// quadrature over the bounding box, restricted to the ball. n = 1 only.
std::complex<double> ergodic_average(const StateSymbol& g, const ActionSpec& a,
                                     const StatePoint& sigma, double R, int quadrature_points = 401);

// State-symbol builders

/// Interior-only symbol from an expression (translation, torus and
/// quantum-plane state spaces, whose Σ has no boundary tags).
StateSymbol state_symbol_from_expr(const SymbolExpr& f, std::optional<double> bound = std::nullopt);

/// Radial VO symbol tanh(r²/scale²) with radial limit 1 at every direction.
StateSymbol radial_tanh_symbol(double scale);

/// VO⋅AP and VO+AP symbols on the vo-ap state space: the VO factor is
/// g(r) = c + (g0 − c)·exp(−r²/w²) (limit c), the AP factor is the trig
/// polynomial h(θ) = cos θ₁ + cos θ₂.
StateSymbol vo_times_harper_symbol(double c, double g0, double w);
StateSymbol vo_plus_harper_symbol(double c, double g0, double w);

/// tanh(x)·tanh(ξ) on the vo-tensor-vo state space, with its ±1 limits on
/// every boundary slice and corner.
StateSymbol tanh_prod_symbol();

/// Named catalog symbol lookup used by scenario configs; params feed the
/// factories above (keys: scale, c, g0, w).
StateSymbol make_named_symbol(const std::string& name, const std::map<std::string, double>& params);

}  // namespace qspec
