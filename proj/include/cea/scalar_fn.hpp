#pragma once

// Real functions of one variable, written in a small infix language.
//
//   expr    := term   (('+' | '-') term)*
//   term    := unary  (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' exponent)?
//   exponent:= '-' exponent | power          (right associative)
//   primary := number | 't' | 'pi' | name '(' expr ')' | '(' expr ')'
//
// name is one of exp, log, sin, cos, sqrt, abs. The only free variable is `t`;
// chain generators substitute s, tau or t for it at call time.

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cea {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, const std::string& what);
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Raised when an expression is evaluated outside its domain. offset() is the
// position in the source text of the failing node.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what, std::size_t offset = npos);
  std::size_t offset() const noexcept { return offset_; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::size_t offset_;
};

class ScalarFn {
 public:
  struct Node;

  // The zero function.
  ScalarFn();

  static ScalarFn parse(std::string_view text);
  static ScalarFn constant(double value);

  double operator()(double x) const;

  // Fully parenthesised rendering; parsing it back gives the same tree.
  std::string str() const;
  const std::string& source() const noexcept { return source_; }
  // Source text with the variable renamed, e.g. "exp(t)+t" -> "exp(s)+s".
  std::string source_in(std::string_view var) const;

  // True when the tree is a literal constant (possibly negated).
  bool is_constant() const noexcept;

 private:
  ScalarFn(std::shared_ptr<const Node> root, std::string source);

  std::shared_ptr<const Node> root_;
  std::string source_;
};

inline ScalarFn parse(std::string_view text) { return ScalarFn::parse(text); }
inline double eval(const ScalarFn& fn, double x) { return fn(x); }

// Threshold of a step solution of Cantor's second equation.
class StepSpec {
 public:
  explicit StepSpec(double alpha);
  double alpha() const noexcept { return alpha_; }

 private:
  double alpha_;
};

// 1 for s <= t < alpha, 0 for t >= alpha. Requires 0 <= s <= t.
double cantor2_step(const StepSpec& spec, double s, double t);

}  // namespace cea
