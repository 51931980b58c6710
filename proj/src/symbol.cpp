#include "qspec/symbol.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>

#include "qspec/errors.hpp"

namespace qspec {

using ast::Func;
using ast::Kind;
using ast::Node;
using ast::NodePtr;

namespace {

NodePtr make_number(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Number;
  n->number = v;
  return n;
}

NodePtr make_var(bool is_xi, std::size_t index) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->var_is_xi = is_xi;
  n->var_index = index;
  return n;
}

NodePtr make_unary(Kind k, NodePtr c) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->lhs = std::move(c);
  return n;
}

NodePtr make_binary(Kind k, NodePtr l, NodePtr r) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}

NodePtr make_call(Func f, NodePtr arg) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Call;
  n->func = f;
  n->lhs = std::move(arg);
  return n;
}

const std::map<std::string, Func, std::less<>> kFuncs = {
    {"sin", Func::Sin},   {"cos", Func::Cos},   {"tanh", Func::Tanh},
    {"exp", Func::Exp},   {"atan", Func::Atan}, {"sqrt", Func::Sqrt},
    {"gaussian", Func::Gaussian}};

const char* func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Tanh: return "tanh";
    case Func::Exp: return "exp";
    case Func::Atan: return "atan";
    case Func::Sqrt: return "sqrt";
    case Func::Gaussian: return "gaussian";
  }
  return "?";
}

// Recursive-descent parser. Whitespace-insensitive; offsets are byte
// positions into the original text.
class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("syntax error at offset " + std::to_string(pos_) + ": " + what, pos_);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (eat('+')) lhs = make_binary(Kind::Add, lhs, term());
      else if (eat('-')) lhs = make_binary(Kind::Sub, lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (eat('*')) lhs = make_binary(Kind::Mul, lhs, unary());
      else if (eat('/')) lhs = make_binary(Kind::Div, lhs, unary());
      else return lhs;
    }
  }

  NodePtr unary() {
    if (eat('-')) return make_unary(Kind::Neg, unary());
    return primary();
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    const char* begin = s_.data() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    return make_number(v);
  }

  NodePtr identifier() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    std::string name = s_.substr(start, pos_ - start);

    if (peek() == '(') {
      auto it = kFuncs.find(name);
      if (it == kFuncs.end()) {
        pos_ = start;
        throw ParseError("unknown function '" + name + "' at offset " + std::to_string(start), start);
      }
      eat('(');
      NodePtr arg = expr();
      if (eat(',')) throw ValidationError(name, "function '" + name + "' takes exactly one argument");
      if (!eat(')')) fail("expected ')'");
      return make_call(it->second, arg);
    }

    if (name == "x") return make_var(false, 0);
    if (name == "xi") return make_var(true, 0);
    if (name == "pi") return make_number(M_PI);
    // xK / xiK forms for n >= 2.
    auto suffix_index = [&](std::size_t prefix_len) -> std::optional<std::size_t> {
      if (name.size() <= prefix_len) return std::nullopt;
      std::size_t idx = 0;
      for (std::size_t i = prefix_len; i < name.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) return std::nullopt;
        idx = idx * 10 + static_cast<std::size_t>(name[i] - '0');
      }
      return idx >= 1 ? std::optional<std::size_t>(idx - 1) : std::nullopt;
    };
    if (name.rfind("xi", 0) == 0) {
      if (auto idx = suffix_index(2)) return make_var(true, *idx);
    }
    if (name[0] == 'x') {
      if (auto idx = suffix_index(1)) return make_var(false, *idx);
    }
    pos_ = start;
    throw ParseError("unknown identifier '" + name + "' at offset " + std::to_string(start), start);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

int precedence(Kind k) {
  switch (k) {
    case Kind::Add:
    case Kind::Sub: return 1;
    case Kind::Mul:
    case Kind::Div: return 2;
    case Kind::Neg: return 3;
    default: return 4;
  }
}

void format_number(double v, std::string& out) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

void print_node(const NodePtr& n, std::string& out, int parent_prec, bool rhs_of_sub) {
  int prec = precedence(n->kind);
  bool need_paren = prec < parent_prec || (rhs_of_sub && prec == parent_prec);
  if (need_paren) out += '(';
  switch (n->kind) {
    case Kind::Number:
      if (n->number < 0) {
        out += '(';
        format_number(n->number, out);
        out += ')';
      } else {
        format_number(n->number, out);
      }
      break;
    case Kind::Var:
      out += n->var_is_xi ? "xi" : "x";
      if (n->var_index > 0) out += std::to_string(n->var_index + 1);
      break;
    case Kind::Neg:
      out += '-';
      print_node(n->lhs, out, precedence(Kind::Neg) + 1, false);
      break;
    case Kind::Add:
      print_node(n->lhs, out, prec, false);
      out += '+';
      print_node(n->rhs, out, prec + 1, false);
      break;
    case Kind::Sub:
      print_node(n->lhs, out, prec, false);
      out += '-';
      print_node(n->rhs, out, prec, true);
      break;
    case Kind::Mul:
      print_node(n->lhs, out, prec, false);
      out += '*';
      print_node(n->rhs, out, prec + 1, false);
      break;
    case Kind::Div:
      print_node(n->lhs, out, prec, false);
      out += '/';
      print_node(n->rhs, out, prec + 1, false);
      break;
    case Kind::Call:
      out += func_name(n->func);
      out += '(';
      print_node(n->lhs, out, 0, false);
      out += ')';
      break;
  }
  if (need_paren) out += ')';
}

std::string print_subexpr(const NodePtr& n) {
  std::string out;
  print_node(n, out, 0, false);
  return out;
}

double eval_node(const NodePtr& n, const PhasePoint& X) {
  switch (n->kind) {
    case Kind::Number: return n->number;
    case Kind::Var: {
      const auto& v = n->var_is_xi ? X.xi : X.x;
      if (n->var_index >= v.size())
        throw ValidationError("PhasePoint",
                              "expression uses coordinate index " + std::to_string(n->var_index + 1) +
                                  " but point has dimension " + std::to_string(v.size()));
      return v[n->var_index];
    }
    case Kind::Neg: return -eval_node(n->lhs, X);
    case Kind::Add: return eval_node(n->lhs, X) + eval_node(n->rhs, X);
    case Kind::Sub: return eval_node(n->lhs, X) - eval_node(n->rhs, X);
    case Kind::Mul: return eval_node(n->lhs, X) * eval_node(n->rhs, X);
    case Kind::Div: {
      double denom = eval_node(n->rhs, X);
      if (denom == 0.0) throw EvalError("division by zero", print_subexpr(n));
      return eval_node(n->lhs, X) / denom;
    }
    case Kind::Call: {
      double a = eval_node(n->lhs, X);
      switch (n->func) {
        case Func::Sin: return std::sin(a);
        case Func::Cos: return std::cos(a);
        case Func::Tanh: return std::tanh(a);
        case Func::Exp: return std::exp(a);
        case Func::Atan: return std::atan(a);
        case Func::Sqrt:
          if (a < 0.0) throw EvalError("sqrt of negative value", print_subexpr(n));
          return std::sqrt(a);
        case Func::Gaussian: return std::exp(-0.5 * a * a);
      }
      return 0.0;
    }
  }
  return 0.0;
}

std::size_t min_dim_node(const NodePtr& n) {
  if (!n) return 1;
  std::size_t d = 1;
  if (n->kind == Kind::Var) d = n->var_index + 1;
  if (n->lhs) d = std::max(d, min_dim_node(n->lhs));
  if (n->rhs) d = std::max(d, min_dim_node(n->rhs));
  return d;
}

}  // namespace

std::size_t SymbolExpr::min_dim() const { return min_dim_node(root_); }

std::complex<double> SymbolExpr::eval(const PhasePoint& X) const {
  if (!root_) throw ValidationError("SymbolExpr", "empty expression");
  double v = eval_node(root_, X);
  if (!std::isfinite(v)) throw EvalError("non-finite result", print_subexpr(root_));
  return {v, 0.0};
}

std::string SymbolExpr::print() const {
  if (!root_) return "";
  return print_subexpr(root_);
}

SymbolExpr parse_symbol(const std::string& text) {
  Parser p(text);
  return SymbolExpr(p.parse());
}

std::complex<double> eval_symbol(const SymbolExpr& f, const PhasePoint& X) { return f.eval(X); }

}  // namespace qspec
