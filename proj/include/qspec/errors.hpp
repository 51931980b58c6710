#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qspec {

// Parse failure in the symbol grammar or the scenario config format.
// `where` is a byte offset for symbol text and a 1-based line number for
// config files; `kind` tells which.
class ParseError : public std::runtime_error {
 public:
  enum class Where { ByteOffset, Line };

  ParseError(std::string msg, std::size_t where, Where kind = Where::ByteOffset)
      : std::runtime_error(std::move(msg)), where_(where), kind_(kind) {}

  std::size_t where() const noexcept { return where_; }
  Where where_kind() const noexcept { return kind_; }

 private:
  std::size_t where_;
  Where kind_;
};

// A structurally valid input that violates a documented precondition;
// `field` names the offending field or argument.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& msg)
      : std::invalid_argument(msg), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Runtime evaluation failure (division by zero, sqrt of a negative value);
// carries the offending subexpression in printed form.
class EvalError : public std::runtime_error {
 public:
  EvalError(const std::string& msg, std::string subexpr)
      : std::runtime_error(msg + " in subexpression '" + subexpr + "'"),
        subexpr_(std::move(subexpr)) {}

  const std::string& subexpr() const noexcept { return subexpr_; }

 private:
  std::string subexpr_;
};

// Numerical failure: eigensolver non-convergence, residual contract breach,
// unbounded symbol sample. Maps to CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qspec
