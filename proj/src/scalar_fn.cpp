#include "cea/scalar_fn.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

namespace cea {

ParseError::ParseError(std::size_t offset, const std::string& what)
    : std::runtime_error("parse error at offset " + std::to_string(offset) + ": " + what),
      offset_(offset) {}

DomainError::DomainError(const std::string& what, std::size_t offset)
    : std::runtime_error(offset == npos ? what
                                        : what + " (at offset " + std::to_string(offset) + ")"),
      offset_(offset) {}

enum class NodeKind { Constant, Variable, Add, Sub, Mul, Div, Pow, Neg, Call };
enum class Builtin { Exp, Log, Sin, Cos, Sqrt, Abs };

struct ScalarFn::Node {
  NodeKind kind;
  std::size_t offset = 0;
  double value = 0.0;
  Builtin fn = Builtin::Exp;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const ScalarFn::Node>;

struct BuiltinInfo {
  std::string_view name;
  Builtin fn;
};

constexpr std::array<BuiltinInfo, 6> kBuiltins{{
    {"exp", Builtin::Exp},
    {"log", Builtin::Log},
    {"sin", Builtin::Sin},
    {"cos", Builtin::Cos},
    {"sqrt", Builtin::Sqrt},
    {"abs", Builtin::Abs},
}};

std::string_view builtin_name(Builtin fn) {
  for (const auto& b : kBuiltins) {
    if (b.fn == fn) return b.name;
  }
  return "?";
}

NodePtr make_leaf(NodeKind kind, std::size_t offset, double value = 0.0) {
  auto n = std::make_shared<ScalarFn::Node>();
  n->kind = kind;
  n->offset = offset;
  n->value = value;
  return n;
}

NodePtr make_node(NodeKind kind, std::size_t offset, NodePtr lhs, NodePtr rhs = nullptr) {
  auto n = std::make_shared<ScalarFn::Node>();
  n->kind = kind;
  n->offset = offset;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    auto root = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }
  [[noreturn]] void fail_at(std::size_t at, const std::string& msg) const {
    throw ParseError(at, msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    auto lhs = term();
    for (;;) {
      skip_ws();
      std::size_t at = pos_;
      if (accept('+')) {
        lhs = make_node(NodeKind::Add, at, lhs, term());
      } else if (accept('-')) {
        lhs = make_node(NodeKind::Sub, at, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    auto lhs = unary();
    for (;;) {
      skip_ws();
      std::size_t at = pos_;
      if (accept('*')) {
        lhs = make_node(NodeKind::Mul, at, lhs, unary());
      } else if (accept('/')) {
        lhs = make_node(NodeKind::Div, at, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    skip_ws();
    std::size_t at = pos_;
    if (accept('-')) return make_node(NodeKind::Neg, at, unary());
    return power();
  }

  NodePtr power() {
    auto base = primary();
    skip_ws();
    std::size_t at = pos_;
    if (accept('^')) return make_node(NodeKind::Pow, at, base, exponent());
    return base;
  }

  NodePtr exponent() {
    skip_ws();
    std::size_t at = pos_;
    if (accept('-')) return make_node(NodeKind::Neg, at, exponent());
    return power();
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (c == '(') {
      ++pos_;
      auto inner = expr();
      if (!accept(')')) {
        skip_ws();
        fail(pos_ < text_.size() ? "expected ')'" : "unexpected end of input, expected ')'");
      }
      return inner;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    std::size_t start = pos_;
    std::size_t end = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) {
        ++end;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (end < text_.size() && text_[end] == '.') {
      ++end;
      mantissa += digits();
    }
    if (mantissa == 0) fail_at(start, "malformed number");
    if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
      std::size_t e = end++;
      if (end < text_.size() && (text_[end] == '+' || text_[end] == '-')) ++end;
      if (digits() == 0) fail_at(e, "malformed exponent");
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + end, value);
    if (ec != std::errc() || ptr != text_.data() + end) fail_at(start, "malformed number");
    if (!std::isfinite(value)) fail_at(start, "number out of range");
    pos_ = end;
    return make_leaf(NodeKind::Constant, start, value);
  }

  NodePtr identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    std::string_view name = text_.substr(start, pos_ - start);
    skip_ws();
    bool call = pos_ < text_.size() && text_[pos_] == '(';
    if (!call) {
      if (name == "t") return make_leaf(NodeKind::Variable, start);
      if (name == "pi") return make_leaf(NodeKind::Constant, start, std::numbers::pi);
      fail_at(start, "unknown identifier '" + std::string(name) + "'");
    }
    const BuiltinInfo* info = nullptr;
    for (const auto& b : kBuiltins) {
      if (b.name == name) info = &b;
    }
    if (info == nullptr) fail_at(start, "unknown function '" + std::string(name) + "'");
    ++pos_;  // '('
    std::vector<NodePtr> args;
    skip_ws();
    if (!accept(')')) {
      do {
        args.push_back(expr());
      } while (accept(','));
      if (!accept(')')) {
        skip_ws();
        fail(pos_ < text_.size() ? "expected ')'" : "unexpected end of input, expected ')'");
      }
    }
    if (args.size() != 1) {
      fail_at(start, "function '" + std::string(name) + "' expects 1 argument, got " +
                         std::to_string(args.size()));
    }
    auto n = make_node(NodeKind::Call, start, args.front());
    std::const_pointer_cast<ScalarFn::Node>(n)->fn = info->fn;
    return n;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

double evaluate(const ScalarFn::Node& n, double x) {
  switch (n.kind) {
    case NodeKind::Constant:
      return n.value;
    case NodeKind::Variable:
      return x;
    case NodeKind::Add:
      return evaluate(*n.lhs, x) + evaluate(*n.rhs, x);
    case NodeKind::Sub:
      return evaluate(*n.lhs, x) - evaluate(*n.rhs, x);
    case NodeKind::Mul:
      return evaluate(*n.lhs, x) * evaluate(*n.rhs, x);
    case NodeKind::Div: {
      double num = evaluate(*n.lhs, x);
      double den = evaluate(*n.rhs, x);
      if (den == 0.0) throw DomainError("division by zero", n.offset);
      return num / den;
    }
    case NodeKind::Pow: {
      double base = evaluate(*n.lhs, x);
      double expo = evaluate(*n.rhs, x);
      if (base < 0.0 && std::trunc(expo) != expo) {
        throw DomainError("negative base with non-integer exponent", n.offset);
      }
      if (base == 0.0 && expo < 0.0) throw DomainError("zero to a negative power", n.offset);
      return std::pow(base, expo);
    }
    case NodeKind::Neg:
      return -evaluate(*n.lhs, x);
    case NodeKind::Call: {
      double a = evaluate(*n.lhs, x);
      switch (n.fn) {
        case Builtin::Exp:
          return std::exp(a);
        case Builtin::Log:
          if (a <= 0.0) throw DomainError("log of non-positive value", n.offset);
          return std::log(a);
        case Builtin::Sin:
          return std::sin(a);
        case Builtin::Cos:
          return std::cos(a);
        case Builtin::Sqrt:
          if (a < 0.0) throw DomainError("sqrt of negative value", n.offset);
          return std::sqrt(a);
        case Builtin::Abs:
          return std::fabs(a);
      }
    }
  }
  return 0.0;
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), ptr);
}

void render(const ScalarFn::Node& n, std::string& out) {
  auto binary = [&](char op) {
    out += '(';
    render(*n.lhs, out);
    out += op;
    render(*n.rhs, out);
    out += ')';
  };
  switch (n.kind) {
    case NodeKind::Constant:
      if (n.value < 0.0 || std::signbit(n.value)) {
        out += "(-" + format_number(-n.value) + ")";
      } else {
        out += format_number(n.value);
      }
      return;
    case NodeKind::Variable:
      out += 't';
      return;
    case NodeKind::Add:
      return binary('+');
    case NodeKind::Sub:
      return binary('-');
    case NodeKind::Mul:
      return binary('*');
    case NodeKind::Div:
      return binary('/');
    case NodeKind::Pow:
      return binary('^');
    case NodeKind::Neg:
      out += "(-";
      render(*n.lhs, out);
      out += ')';
      return;
    case NodeKind::Call:
      out += builtin_name(n.fn);
      out += '(';
      render(*n.lhs, out);
      out += ')';
      return;
  }
}

}  // namespace

ScalarFn::ScalarFn() : ScalarFn(make_leaf(NodeKind::Constant, 0, 0.0), "0") {}

ScalarFn::ScalarFn(std::shared_ptr<const Node> root, std::string source)
    : root_(std::move(root)), source_(std::move(source)) {}

ScalarFn ScalarFn::parse(std::string_view text) {
  Parser p(text);
  return ScalarFn(p.parse(), std::string(text));
}

ScalarFn ScalarFn::constant(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("constant must be finite");
  auto leaf = make_leaf(NodeKind::Constant, 0, value);
  std::string text;
  render(*leaf, text);
  return ScalarFn(std::move(leaf), std::move(text));
}

double ScalarFn::operator()(double x) const { return evaluate(*root_, x); }

std::string ScalarFn::str() const {
  std::string out;
  render(*root_, out);
  return out;
}

std::string ScalarFn::source_in(std::string_view var) const {
  std::string out;
  std::size_t i = 0;
  while (i < source_.size()) {
    char c = source_[i];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < source_.size() &&
             (std::isalnum(static_cast<unsigned char>(source_[j])) || source_[j] == '_')) {
        ++j;
      }
      std::string_view word(source_.data() + i, j - i);
      if (word == "t") {
        out += var;
      } else {
        out += word;
      }
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      // Skip whole numbers so exponents such as 1e5 are left alone.
      std::size_t j = i;
      while (j < source_.size() &&
             (std::isalnum(static_cast<unsigned char>(source_[j])) || source_[j] == '.' ||
              ((source_[j] == '+' || source_[j] == '-') && (source_[j - 1] == 'e' || source_[j - 1] == 'E')))) {
        ++j;
      }
      out.append(source_, i, j - i);
      i = j;
    } else {
      out += c;
      ++i;
    }
  }
  return out;
}

bool ScalarFn::is_constant() const noexcept {
  const Node* n = root_.get();
  while (n->kind == NodeKind::Neg) n = n->lhs.get();
  return n->kind == NodeKind::Constant;
}

StepSpec::StepSpec(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("step threshold must be a positive finite number");
  }
}

double cantor2_step(const StepSpec& spec, double s, double t) {
  if (!(s >= 0.0) || !(s <= t)) throw DomainError("step function requires 0 <= s <= t");
  return t < spec.alpha() ? 1.0 : 0.0;
}

}  // namespace cea
