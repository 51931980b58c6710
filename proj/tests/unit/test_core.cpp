#include <doctest.h>

#include <cmath>
#include <random>

#include "qspec/errors.hpp"
#include "qspec/grid.hpp"
#include "qspec/phase.hpp"
#include "qspec/spectral_set.hpp"
#include "qspec/symbol.hpp"

using namespace qspec;

TEST_CASE("symplectic form: direct values and antisymmetry") {
  CHECK(symplectic_form(PhasePoint(1.0, 0.0), PhasePoint(0.0, 1.0)) == 1.0);
  CHECK(symplectic_form(PhasePoint(2.0, 3.0), PhasePoint(5.0, 7.0)) == doctest::Approx(-1.0));
  PhasePoint X(0.3, -1.7);
  CHECK(symplectic_form(X, X) == 0.0);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    PhasePoint A(u(rng), u(rng)), B(u(rng), u(rng));
    CHECK(symplectic_form(A, B) == doctest::Approx(-symplectic_form(B, A)).epsilon(1e-14));
  }

  CHECK_THROWS_AS(symplectic_form(PhasePoint({1.0, 2.0}, {0.0, 0.0}), PhasePoint(1.0, 1.0)),
                  ValidationError);
}

TEST_CASE("grid construction and dual orthogonality") {
  Grid g = make_grid(8.0, 256);
  CHECK(g.spacing == doctest::Approx(1.0 / 16.0));
  CHECK_THROWS_AS(make_grid(8.0, 255), ValidationError);
  CHECK_THROWS_AS(make_grid(-1.0, 64), ValidationError);
  CHECK_THROWS_AS(make_grid(8.0, 4), ValidationError);

  // Σ_m e^{i(x_j−x_k)ξ_m/ħ}/N − δ_jk small at machine scale.
  for (double hbar : {1.0, 0.5}) {
    Grid h = make_grid(4.0, 32);
    for (int j : {0, 3, 17}) {
      for (int k : {0, 5, 31}) {
        std::complex<double> acc(0.0, 0.0);
        for (int m = 0; m < h.N; ++m)
          acc += std::polar(1.0, (h.node(j) - h.node(k)) * h.dual_node(m, hbar) / hbar);
        double expected = (j == k) ? 1.0 : 0.0;
        CHECK(std::abs(acc / double(h.N) - expected) <= 1e-12);
      }
    }
  }
}

TEST_CASE("symbol parser: grammar instances") {
  SymbolExpr e = parse_symbol("cos(x)+cos(xi)");
  CHECK(e.print() == "cos(x)+cos(xi)");
  CHECK(e.eval(PhasePoint(0.0, 0.0)).real() == doctest::Approx(2.0));

  SymbolExpr t = parse_symbol("tanh(x)*tanh(xi)");
  CHECK(t.print() == "tanh(x)*tanh(xi)");

  // whitespace-insensitive
  SymbolExpr ws = parse_symbol("  cos ( x )\t+ cos(\txi ) ");
  CHECK(ws.print() == "cos(x)+cos(xi)");

  CHECK_THROWS_WITH_AS(parse_symbol("cos(x"), doctest::Contains("offset 5"), ParseError);
  try {
    parse_symbol("cos(x");
    CHECK(false);
  } catch (const ParseError& pe) {
    CHECK(pe.where() == 5);
  }
  CHECK_THROWS_AS(parse_symbol("bogus(x)"), ParseError);
  CHECK_THROWS_AS(parse_symbol("y+1"), ParseError);
  CHECK_THROWS_AS(parse_symbol("sin(x, xi)"), ValidationError);
}

TEST_CASE("symbol eval: trivial values and domain errors") {
  CHECK(parse_symbol("0").eval(PhasePoint(3.0, -2.0)) == std::complex<double>(0.0, 0.0));
  CHECK(std::abs(parse_symbol("tanh(x)").eval(PhasePoint(50.0, 0.0)).real() - 1.0) <= 1e-12);
  CHECK_THROWS_AS(parse_symbol("1/(x-x)").eval(PhasePoint(1.0, 0.0)), EvalError);
  CHECK_THROWS_AS(parse_symbol("sqrt(0-1-x*x)").eval(PhasePoint(1.0, 0.0)), EvalError);
  // the offending subexpression is reported
  try {
    parse_symbol("cos(x)+1/(xi-xi)").eval(PhasePoint(0.0, 0.0));
    CHECK(false);
  } catch (const EvalError& e) {
    CHECK(e.subexpr() == "1/(xi-xi)");
  }
}

TEST_CASE("symbol print/parse round-trip is a fixed point") {
  auto same_tree = [](const ast::NodePtr& a, const ast::NodePtr& b) {
    auto rec = [](auto&& self, const ast::NodePtr& x, const ast::NodePtr& y) -> bool {
      if (!x || !y) return x == y;
      if (x->kind != y->kind || x->number != y->number || x->var_is_xi != y->var_is_xi ||
          x->var_index != y->var_index || x->func != y->func)
        return false;
      return self(self, x->lhs, y->lhs) && self(self, x->rhs, y->rhs);
    };
    return rec(rec, a, b);
  };

  const char* cases[] = {
      "cos(x)+cos(xi)",
      "1-(2-x)",
      "-(x*xi)/(1+x*x)",
      "tanh(sqrt(x*x+xi*xi))",
      "gaussian(x-0.5)*gaussian(xi)",
      "2*pi*x/(3.5e-2+xi*xi)",
      "x-xi-1-2",
      "atan(exp(-x))",
  };
  for (const char* c : cases) {
    SymbolExpr once = parse_symbol(c);
    SymbolExpr twice = parse_symbol(once.print());
    CHECK_MESSAGE(same_tree(once.root(), twice.root()), c);
    CHECK(once.print() == twice.print());
  }

  // Random expression generator: compare tree and numeric values.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  auto gen = [&](auto&& self, int depth) -> std::string {
    int pick = static_cast<int>(rng() % (depth > 3 ? 2 : 6));
    switch (pick) {
      case 0: return "x";
      case 1: return "xi";
      case 2: return "(" + self(self, depth + 1) + "+" + self(self, depth + 1) + ")";
      case 3: return "(" + self(self, depth + 1) + "*" + self(self, depth + 1) + ")";
      case 4: return "-" + self(self, depth + 1);
      default: {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f", u(rng));
        return std::string("tanh(") + buf + "*" + self(self, depth + 1) + ")";
      }
    }
  };
  for (int i = 0; i < 100; ++i) {
    SymbolExpr once = parse_symbol(gen(gen, 0));
    SymbolExpr twice = parse_symbol(once.print());
    CHECK(same_tree(once.root(), twice.root()));
    PhasePoint X(0.7, -0.4);
    CHECK(once.eval(X).real() == doctest::Approx(twice.eval(X).real()).epsilon(1e-15));
  }
}

TEST_CASE("eval agrees with hand-coded closed forms on catalog expressions") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  SymbolExpr harper = parse_symbol("cos(x)+cos(xi)");
  SymbolExpr gauss = parse_symbol("gaussian(x)*gaussian(xi)");
  SymbolExpr tanhp = parse_symbol("tanh(x)*tanh(xi)");
  SymbolExpr radial = parse_symbol("tanh(sqrt(x*x+xi*xi))");
  for (int i = 0; i < 500; ++i) {
    double x = u(rng), xi = u(rng);
    PhasePoint X(x, xi);
    CHECK(harper.eval(X).real() == doctest::Approx(std::cos(x) + std::cos(xi)).epsilon(1e-14));
    CHECK(gauss.eval(X).real() ==
          doctest::Approx(std::exp(-0.5 * (x * x + xi * xi))).epsilon(1e-14));
    CHECK(tanhp.eval(X).real() == doctest::Approx(std::tanh(x) * std::tanh(xi)).epsilon(1e-14));
    CHECK(radial.eval(X).real() ==
          doctest::Approx(std::tanh(std::hypot(x, xi))).epsilon(1e-14));
  }
}

TEST_CASE("spectral set: merge semantics") {
  SpectralSet s({3.0, 1.0, 1.05, 2.0}, 0.1);
  CHECK(s.values() == std::vector<double>{1.0, 1.05, 2.0, 3.0});
  SpectralSet m = s.merged();
  CHECK(m.values() == std::vector<double>{1.0, 2.0, 3.0});
  // idempotent
  CHECK(m.merged().values() == m.values());
  CHECK_THROWS_AS(SpectralSet({1.0}, -0.5), ValidationError);
}
