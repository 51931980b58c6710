#include <doctest.h>

#include <cmath>
#include <random>

#include "qspec/dynamics.hpp"
#include "qspec/errors.hpp"

using namespace qspec;

TEST_CASE("translation and quantum-plane actions: pointwise values") {
  ActionSpec tr = make_translation_action();
  StatePoint s = act(tr, StatePoint::interior(0.0, 0.0), PhasePoint(1.0, 2.0));
  CHECK(s.coords[0] == 1.0);
  CHECK(s.coords[1] == 2.0);

  ActionSpec qp = make_real_quantum_plane_action();
  StatePoint q = act(qp, StatePoint::interior(1.0, 1.0), PhasePoint(std::log(2.0), 0.0));
  CHECK(q.coords[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(q.coords[1] == 1.0);
  // the origin is a fixed point
  StatePoint o = act(qp, StatePoint::interior(0.0, 0.0), PhasePoint(5.0, -3.0));
  CHECK(o.coords[0] == 0.0);
  CHECK(o.coords[1] == 0.0);

  CHECK_THROWS_AS(act(qp, StatePoint::boundary("dir", {0.0}), PhasePoint(0.0, 0.0)), ValidationError);
}

TEST_CASE("group law over seeded samples") {
  std::mt19937_64 rng(41);
  // Dyadic samples make the translation group law exact in floating point.
  std::uniform_int_distribution<int> dy(-256, 256);
  ActionSpec tr = make_translation_action();
  for (int i = 0; i < 1000; ++i) {
    PhasePoint X(dy(rng) / 64.0, dy(rng) / 64.0), Y(dy(rng) / 64.0, dy(rng) / 64.0);
    StatePoint s = StatePoint::interior(dy(rng) / 64.0, dy(rng) / 64.0);
    StatePoint lhs = act(tr, act(tr, s, Y), X);
    StatePoint rhs = act(tr, s, X + Y);
    CHECK(lhs.coords[0] == rhs.coords[0]);
    CHECK(lhs.coords[1] == rhs.coords[1]);
  }

  std::uniform_real_distribution<double> u(-3.0, 3.0);
  ActionSpec torus = make_torus_ap_action();
  ActionSpec qp = make_real_quantum_plane_action();
  double worst_torus = 0.0, worst_qp = 0.0;
  for (int i = 0; i < 1000; ++i) {
    PhasePoint X(u(rng), u(rng)), Y(u(rng), u(rng));
    StatePoint st = StatePoint::interior(u(rng), u(rng));
    StatePoint lt = act(torus, act(torus, st, Y), X);
    StatePoint rt = act(torus, st, X + Y);
    worst_torus = std::max({worst_torus, std::abs(lt.coords[0] - rt.coords[0]),
                            std::abs(lt.coords[1] - rt.coords[1])});
    StatePoint lq = act(qp, act(qp, st, Y), X);
    StatePoint rq = act(qp, st, X + Y);
    worst_qp = std::max({worst_qp, std::abs(lq.coords[0] - rq.coords[0]),
                         std::abs(lq.coords[1] - rq.coords[1])});
  }
  CHECK(worst_torus <= 1e-12);
  CHECK(worst_qp <= 1e-10);
}

TEST_CASE("quasi-orbit classification on the quantum plane") {
  ActionSpec qp = make_real_quantum_plane_action();
  CHECK(quasi_orbit_of(qp, StatePoint::interior(1.0, 1.0)).id == "qp++");
  CHECK(quasi_orbit_of(qp, StatePoint::interior(1.0, 0.0)).id == "axis-x+");
  CHECK(quasi_orbit_of(qp, StatePoint::interior(0.0, -2.0)).id == "axis-xi-");
  CHECK(quasi_orbit_of(qp, StatePoint::interior(0.0, 0.0)).id == "origin");
  CHECK(quasi_orbit_of(qp, StatePoint::interior(-0.5, 3.0)).id == "qp-+");

  CHECK(classify_kind(quasi_orbit_of(qp, StatePoint::interior(2.0, 3.0))) == OrbitKind::First);
  CHECK(classify_kind(quasi_orbit_of(qp, StatePoint::interior(1.0, 0.0))) == OrbitKind::Second);

  auto subs = non_generic_suborbits(qp, quasi_orbit_of(qp, StatePoint::interior(1.0, 1.0)));
  REQUIRE(subs.size() == 2);
  CHECK(subs[0].id == "axis-x+");
  CHECK(subs[1].id == "axis-xi+");
  CHECK_THROWS_AS(non_generic_suborbits(qp, quasi_orbit_of(qp, StatePoint::interior(1.0, 0.0))),
                  ValidationError);
}

TEST_CASE("torus is a minimal second-kind quasi-orbit; translation full plane is first kind") {
  ActionSpec torus = make_torus_ap_action();
  QuasiOrbit t = quasi_orbit_of(torus, StatePoint::interior(0.3, 1.0));
  CHECK(t.minimal);
  CHECK(classify_kind(t) == OrbitKind::Second);

  ActionSpec tr = make_translation_action();
  QuasiOrbit xi = quasi_orbit_of(tr, StatePoint::interior(0.0, 0.0));
  CHECK(xi.id == "Xi");
  CHECK(classify_kind(xi) == OrbitKind::First);
  CHECK(xi.minimal);
}

TEST_CASE("catalog lattice consistency") {
  for (const ActionSpec& a :
       {make_translation_action(), make_radial_vo_action(), make_torus_ap_action(),
        make_vo_times_ap_action(), make_vo_tensor_vo_action(), make_real_quantum_plane_action()}) {
    for (const QuasiOrbit& e : a.table) {
      // kind dichotomy holds by type; the minimal consistency rule must not throw
      CHECK_NOTHROW(classify_kind(e));
      CHECK(e.non_generic_cover.empty() == e.minimal);
      for (const auto& id : e.non_generic_cover) {
        const QuasiOrbit* sub = a.find(id);
        REQUIRE(sub != nullptr);
        // the sub-orbit is strictly smaller: its generating point must not
        // classify back into e's own generic part
        QuasiOrbit back = quasi_orbit_of(a, sub->generating_point);
        CHECK(back.id == sub->id);
        CHECK(back.id != e.id);
      }
    }
  }
}

TEST_CASE("orbit sampler reaches declared sub-orbit representatives (denseness proxy)") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (const ActionSpec& a : {make_radial_vo_action(), make_vo_times_ap_action(),
                              make_vo_tensor_vo_action(), make_real_quantum_plane_action()}) {
    for (const QuasiOrbit& e : a.table) {
      if (e.kind != OrbitKind::First || e.non_generic_cover.empty()) continue;
      for (const auto& id : e.non_generic_cover) {
        const QuasiOrbit* sub = a.find(id);
        REQUIRE(sub != nullptr);
        double best = 1e300;
        for (int i = 0; i < 200000 && best > e.denseness_distance; ++i) {
          // box-uniform with a log-uniform magnitude so both moderate and
          // extreme group elements are explored
          double mag = std::pow(e.sample_radius, u01(rng));
          PhasePoint X(mag * (2.0 * u01(rng) - 1.0), mag * (2.0 * u01(rng) - 1.0));
          best = std::min(best, a.state_distance(act(a, e.generating_point, X), sub->generating_point));
        }
        CHECK_MESSAGE(best <= e.denseness_distance, a.id_string, "/", e.id, " -> ", id);
      }
    }
  }
}

TEST_CASE("pullback: constants, identity at the origin, direct substitution oracle") {
  ActionSpec tr = make_translation_action();
  StateSymbol cst;
  cst.name = "const";
  cst.eval = [](const StatePoint&) { return std::complex<double>(0.25, 0.0); };
  PhaseFunction Fc = pullback_symbol(cst, tr, StatePoint::interior(1.0, -1.0));
  CHECK(Fc.eval(3.0, 4.0) == std::complex<double>(0.25, 0.0));

  // Translation at the origin: pullback is the symbol itself.
  StateSymbol g = state_symbol_from_expr(parse_symbol("gaussian(x)*gaussian(xi)"));
  PhaseFunction Fg = pullback_symbol(g, tr, StatePoint::interior(0.0, 0.0));
  CHECK(Fg.eval(0.3, -0.7).real() ==
        doctest::Approx(std::exp(-0.5 * (0.09 + 0.49))).epsilon(1e-14));

  // Quantum plane, f = tanh(y)+tanh(eta), sigma = (1,0):
  // F(x,xi) = tanh(e^x) pointwise on a 100-sample box.
  ActionSpec qp = make_real_quantum_plane_action();
  StateSymbol f = state_symbol_from_expr(parse_symbol("tanh(x)+tanh(xi)"));
  PhaseFunction F = pullback_symbol(f, qp, StatePoint::interior(1.0, 0.0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    double x = u(rng), xi = u(rng);
    CHECK(F.eval(x, xi).real() == doctest::Approx(std::tanh(std::exp(x))).epsilon(1e-14));
  }
}

TEST_CASE("equivariance residual: pullback families satisfy it, frozen families do not") {
  for (const ActionSpec& a : {make_translation_action(), make_real_quantum_plane_action(),
                              make_torus_ap_action(), make_vo_tensor_vo_action()}) {
    StateSymbol f;
    f.name = "probe";
    f.eval = [](const StatePoint& s) {
      double acc = std::cos(s.coords.empty() ? 0.0 : s.coords[0]);
      if (s.coords.size() > 1) acc += std::tanh(s.coords[1]);
      return std::complex<double>(acc, 0.0);
    };
    auto family = [&a, f](const StatePoint& sigma, const PhasePoint& X) {
      return f.eval(act(a, sigma, X));
    };
    CHECK(equivariance_residual(family, a, 200, 99) <= 1e-12);
  }

  // F(sigma, X) := h(X) ignoring sigma violates equivariance for a
  // transitive action and non-constant h.
  ActionSpec tr = make_translation_action();
  auto frozen = [](const StatePoint&, const PhasePoint& X) {
    return std::complex<double>(std::cos(X.x[0]), 0.0);
  };
  CHECK(equivariance_residual(frozen, tr, 200, 99) > 0.1);

  auto constant = [](const StatePoint&, const PhasePoint&) { return std::complex<double>(2.0, 0.0); };
  CHECK(equivariance_residual(constant, tr, 200, 99) == 0.0);
}

TEST_CASE("ergodic averages: constants, torus monomial decay, gaussian decay") {
  ActionSpec torus = make_torus_ap_action();
  StateSymbol cst;
  cst.name = "const";
  cst.eval = [](const StatePoint&) { return std::complex<double>(1.5, 0.0); };
  CHECK(ergodic_average(cst, torus, StatePoint::interior(0.2, 0.4), 10.0, 101).real() ==
        doctest::Approx(1.5).epsilon(1e-15));

  StateSymbol mono;
  mono.name = "e^{i theta1}";
  mono.real_valued = false;
  mono.eval = [](const StatePoint& s) { return std::polar(1.0, s.coords[0]); };
  std::complex<double> tor = ergodic_average(mono, torus, StatePoint::interior(0.7, 0.1), 200.0, 401);
  CHECK(std::abs(tor) <= 0.02);
  // quadrature oracle: the midpoint rule has converged at this resolution
  std::complex<double> tor_fine =
      ergodic_average(mono, torus, StatePoint::interior(0.7, 0.1), 200.0, 1203);
  CHECK(std::abs(tor - tor_fine) <= 1e-3);

  ActionSpec radial = make_radial_vo_action();
  StateSymbol decaying;
  decaying.name = "gaussian";
  decaying.eval = [](const StatePoint& s) {
    if (!s.is_interior()) return std::complex<double>(0.0, 0.0);
    return std::complex<double>(
        std::exp(-0.5 * (s.coords[0] * s.coords[0] + s.coords[1] * s.coords[1])), 0.0);
  };
  std::complex<double> dec =
      ergodic_average(decaying, radial, StatePoint::interior(0.0, 0.0), 100.0, 401);
  CHECK(std::abs(dec) <= 1e-3);
  // direct-integral oracle: ∫gaussian/|B_R| = 2π(1−e^{−R²/2})/(πR²) = 2/R²
  CHECK(std::abs(dec - std::complex<double>(2e-4, 0.0)) <= 1e-6);

  CHECK_THROWS_AS(ergodic_average(cst, torus, StatePoint::interior(0.0, 0.0), -1.0, 101),
                  ValidationError);
}

TEST_CASE("named symbols evaluate their boundary extensions") {
  StateSymbol rt = radial_tanh_symbol(2.0);
  CHECK(rt.eval(StatePoint::boundary("dir", {1.0})).real() == 1.0);
  CHECK(rt.eval(StatePoint::interior(0.0, 0.0)).real() == 0.0);

  StateSymbol tp = tanh_prod_symbol();
  CHECK(tp.eval(StatePoint::boundary("x+", {0.5})).real() == doctest::Approx(std::tanh(0.5)));
  CHECK(tp.eval(StatePoint::boundary("x-xi+", {})).real() == -1.0);

  StateSymbol vt = vo_times_harper_symbol(0.7, 0.0, 1.0);
  CHECK(vt.eval(StatePoint::boundary("dir-torus", {0.0, 0.0, 0.0})).real() ==
        doctest::Approx(1.4));

  CHECK_THROWS_AS(make_named_symbol("nope", {}), ValidationError);
}
