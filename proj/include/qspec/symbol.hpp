#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qspec/phase.hpp"

namespace qspec {

// Expression AST over the phase variables. For n = 1 the variables are
// `x` and `xi`; for n >= 2 they are `x1..xn`, `xi1..xin`. Nodes are
// immutable and shared, so SymbolExpr is a cheap value type.
namespace ast {

enum class Kind { Number, Var, Neg, Add, Sub, Mul, Div, Call };

// Built-in unary functions. `gaussian(t)` is exp(−t²/2).
enum class Func { Sin, Cos, Tanh, Exp, Atan, Sqrt, Gaussian };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Kind kind;
  double number = 0.0;        // Kind::Number
  bool var_is_xi = false;     // Kind::Var
  std::size_t var_index = 0;  // Kind::Var, 0-based coordinate
  Func func = Func::Sin;      // Kind::Call
  NodePtr lhs, rhs;           // children (lhs only for Neg/Call)
};

}  // namespace ast

/// A parsed, evaluable bounded symbol f. Metadata records the declared
/// boundedness (with bound M when set) and smoothness; the quantization
/// engine enforces |f| <= M on every sampled point when the flag is set.
class SymbolExpr {
 public:
  SymbolExpr() = default;
  explicit SymbolExpr(ast::NodePtr root) : root_(std::move(root)) {}

  const ast::NodePtr& root() const { return root_; }
  bool empty() const { return root_ == nullptr; }

  /// Highest coordinate index used, i.e. the minimal phase-space dimension
  /// the expression needs. A constant expression reports 1.
  std::size_t min_dim() const;

  std::complex<double> eval(const PhasePoint& X) const;
  double eval_real(const PhasePoint& X) const { return eval(X).real(); }

  /// Canonical text form; parse(print(e)) reproduces the same tree.
  std::string print() const;

  bool declared_bounded = false;
  std::optional<double> bound;  // |f| <= bound when declared_bounded
  bool declared_smooth = true;

 private:
  ast::NodePtr root_;
};

/// Parses the symbol grammar (docs/grammar.md). Throws ParseError with the
/// byte offset of the failure, or ValidationError for arity errors.
SymbolExpr parse_symbol(const std::string& text);

std::complex<double> eval_symbol(const SymbolExpr& f, const PhasePoint& X);

}  // namespace qspec
