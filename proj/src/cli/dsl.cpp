#include "idsd/cli/dsl.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>

namespace idsd::cli {

std::string_view to_string(ParseErrorKind kind) noexcept {
  switch (kind) {
    case ParseErrorKind::syntax: return "syntax";
    case ParseErrorKind::unknown_label: return "unknown_label";
    case ParseErrorKind::malformed_coefficient: return "malformed_coefficient";
    case ParseErrorKind::pauli_violation: return "pauli_violation";
    case ParseErrorKind::unknown_parameter: return "unknown_parameter";
    case ParseErrorKind::duplicate_declaration: return "duplicate_declaration";
  }
  return "unknown";
}

namespace {

std::string format_message(ParseErrorKind kind, int line, int column, const std::string& message,
                           const std::set<std::string>& expected) {
  std::string out = std::string(to_string(kind)) + " at " + std::to_string(line) + ":" + std::to_string(column) +
                    ": " + message;
  if (!expected.empty()) {
    out += " (expected ";
    bool first = true;
    for (const auto& e : expected) {
      if (!first) out += ", ";
      out += e;
      first = false;
    }
    out += ")";
  }
  return out;
}

}  // namespace

ParseError::ParseError(ParseErrorKind kind, int line, int column, const std::string& message,
                       std::set<std::string> expected)
    : Error(kind == ParseErrorKind::pauli_violation ? ErrorCode::pauli_violation : ErrorCode::parse_error,
            format_message(kind, line, column, message, expected)),
      kind_(kind),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

// ---------------------------------------------------------------- expressions

bool Expr::operator==(const Expr& other) const {
  if (kind != other.kind || value != other.value || name != other.name || args.size() != other.args.size())
    return false;
  for (std::size_t i = 0; i < args.size(); ++i)
    if (!(*args[i] == *other.args[i])) return false;
  return true;
}

namespace {

const std::set<std::string> kFunctions = {"cos", "sin", "tan", "exp", "sqrt", "abs", "conj"};

cplx apply_function(const std::string& name, cplx x) {
  if (name == "cos") return std::cos(x);
  if (name == "sin") return std::sin(x);
  if (name == "tan") return std::tan(x);
  if (name == "exp") return std::exp(x);
  if (name == "sqrt") return x.imag() == 0.0 && x.real() >= 0.0 ? cplx(std::sqrt(x.real())) : std::sqrt(x);
  if (name == "abs") return std::abs(x);
  if (name == "conj") return std::conj(x);
  throw Error(ErrorCode::parse_error, "unknown function '" + name + "'");
}

cplx power(cplx base, cplx exponent) {
  if (exponent.imag() == 0.0 && exponent.real() == std::round(exponent.real()) && std::abs(exponent.real()) <= 64) {
    auto n = static_cast<int>(exponent.real());
    cplx out = 1.0;
    for (int k = 0; k < std::abs(n); ++k) out *= base;
    return n < 0 ? 1.0 / out : out;
  }
  if (base.imag() == 0.0 && base.real() >= 0.0 && exponent.imag() == 0.0) return std::pow(base.real(), exponent.real());
  return std::pow(base, exponent);
}

std::string format_real(double x) {
  if (x == 0.0) x = 0.0;  // drop the sign of zero
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string format_number(cplx v) {
  if (v.imag() == 0.0) {
    std::string s = format_real(v.real());
    return s.front() == '-' ? "(" + s + ")" : s;
  }
  if (v.real() == 0.0) {
    std::string s = format_real(v.imag()) + "i";
    return s.front() == '-' ? "(" + s + ")" : s;
  }
  std::string im = format_real(std::abs(v.imag()));
  return "(" + format_real(v.real()) + (v.imag() < 0 ? "-" : "+") + im + "i)";
}

ExprPtr number(cplx v) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::number;
  e->value = v;
  return e;
}

}  // namespace

namespace {

// Signed zeros would pick the wrong side of the sqrt and pow branch cuts.
cplx unsigned_zeros(cplx z) { return {z.real() == 0.0 ? 0.0 : z.real(), z.imag() == 0.0 ? 0.0 : z.imag()}; }

cplx evaluate_raw(const Expr& e, const ParamMap& params);

}  // namespace

cplx evaluate(const Expr& e, const ParamMap& params) { return unsigned_zeros(evaluate_raw(e, params)); }

namespace {

cplx evaluate_raw(const Expr& e, const ParamMap& params) {
  switch (e.kind) {
    case Expr::Kind::number: return e.value;
    case Expr::Kind::param: {
      auto it = params.find(e.name);
      if (it == params.end())
        throw ParseError(ParseErrorKind::unknown_parameter, 0, 0, "parameter '" + e.name + "' has no value");
      return it->second;
    }
    case Expr::Kind::neg: return -evaluate(*e.args[0], params);
    case Expr::Kind::add: return evaluate(*e.args[0], params) + evaluate(*e.args[1], params);
    case Expr::Kind::sub: return evaluate(*e.args[0], params) - evaluate(*e.args[1], params);
    case Expr::Kind::mul: return evaluate(*e.args[0], params) * evaluate(*e.args[1], params);
    case Expr::Kind::div: return evaluate(*e.args[0], params) / evaluate(*e.args[1], params);
    case Expr::Kind::pow: return power(evaluate(*e.args[0], params), evaluate(*e.args[1], params));
    case Expr::Kind::call: return apply_function(e.name, evaluate(*e.args[0], params));
  }
  return 0.0;
}

}  // namespace

std::string to_text(const Expr& e) {
  auto bin = [&](const char* op) { return "(" + to_text(*e.args[0]) + op + to_text(*e.args[1]) + ")"; };
  switch (e.kind) {
    case Expr::Kind::number: return format_number(e.value);
    case Expr::Kind::param: return e.name;
    case Expr::Kind::neg: return "(-" + to_text(*e.args[0]) + ")";
    case Expr::Kind::add: return bin("+");
    case Expr::Kind::sub: return bin("-");
    case Expr::Kind::mul: return bin("*");
    case Expr::Kind::div: return bin("/");
    case Expr::Kind::pow: return bin("^");
    case Expr::Kind::call: return e.name + "(" + to_text(*e.args[0]) + ")";
  }
  return "";
}

bool KetTerm::operator==(const KetTerm& other) const {
  return first == other.first && second == other.second && *coefficient == *other.coefficient;
}

bool StateSpec::operator==(const StateSpec& other) const {
  return statistics == other.statistics && basis == other.basis && parameters == other.parameters &&
         terms == other.terms;
}

// ---------------------------------------------------------------- lexer

namespace {

enum class Tok { ident, number, imag, symbol, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  double value = 0.0;
  int line = 1;
  int column = 1;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      t.kind = Tok::ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < src.size() &&
                                                              std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i;
      while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) ++j;
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
          j = k;
        }
      }
      t.text = std::string(src.substr(i, j - i));
      auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.value);
      if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size())
        throw ParseError(ParseErrorKind::malformed_coefficient, line, col, "malformed number '" + t.text + "'");
      t.kind = Tok::number;
      if (j < src.size() && src[j] == 'i' && (j + 1 >= src.size() || !ident_char(src[j + 1]))) {
        t.kind = Tok::imag;
        ++j;
      } else if (j < src.size() && ident_char(src[j]) && !std::isdigit(static_cast<unsigned char>(src[j]))) {
        // A label part such as "2a" stays a single token.
        while (j < src.size() && ident_char(src[j])) ++j;
        t.kind = Tok::ident;
        t.text = std::string(src.substr(i, j - i));
      }
      advance(j - i);
    } else if (std::string_view(";,:|>+-*/^()=").find(c) != std::string_view::npos) {
      t.kind = Tok::symbol;
      t.text = std::string(1, c);
      advance(1);
    } else {
      throw ParseError(ParseErrorKind::syntax, line, col, std::string("unexpected character '") + c + "'");
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

// ---------------------------------------------------------------- parser

struct PendingKet {
  BasisLabel first, second;
  int line, column;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  StateSpec parse_spec() {
    StateSpec spec;
    bool have_stats = false, have_basis = false, have_expr = false;
    std::vector<PendingKet> kets;
    while (peek().kind != Tok::end) {
      if (is_symbol(";")) {
        next();
        continue;
      }
      const Token& head = peek();
      if (head.kind == Tok::ident && (head.text == "boson" || head.text == "fermion")) {
        if (have_stats) fail(ParseErrorKind::duplicate_declaration, head, "statistics declared twice");
        spec.statistics = head.text == "boson" ? Statistics::boson() : Statistics::fermion();
        have_stats = true;
        next();
      } else if (head.kind == Tok::ident && head.text == "basis") {
        if (have_basis) fail(ParseErrorKind::duplicate_declaration, head, "basis declared twice");
        next();
        parse_basis(spec);
        have_basis = true;
      } else if (head.kind == Tok::ident && head.text == "param") {
        next();
        parse_params(spec);
      } else {
        if (have_expr) fail(ParseErrorKind::duplicate_declaration, head, "state expression given twice");
        parse_sum(spec, kets);
        have_expr = true;
      }
      if (peek().kind != Tok::end) expect_symbol(";");
    }
    const Token& end = peek();
    if (!have_stats) fail(ParseErrorKind::syntax, end, "missing statistics", {"'boson'", "'fermion'"});
    if (!have_basis) fail(ParseErrorKind::syntax, end, "missing basis declaration", {"'basis'"});
    if (!have_expr) fail(ParseErrorKind::syntax, end, "missing state expression", {"'|'"});

    Basis basis = [&] {
      try {
        return Basis(spec.basis);
      } catch (const Error& e) {
        throw ParseError(ParseErrorKind::duplicate_declaration, basis_line_, basis_col_, e.what());
      }
    }();
    for (const auto& k : kets) {
      for (const auto* l : {&k.first, &k.second})
        if (!basis.find(*l))
          throw ParseError(ParseErrorKind::unknown_label, k.line, k.column, "undeclared label '" + l->str() + "'");
      if (spec.statistics.is_fermion() && k.first == k.second)
        throw ParseError(ParseErrorKind::pauli_violation, k.line, k.column,
                         "two fermions in the same state |" + k.first.str() + "," + k.second.str() + ">");
    }
    return spec;
  }

  ExprPtr parse_standalone_expr() {
    auto e = parse_arith();
    if (peek().kind != Tok::end) fail(ParseErrorKind::malformed_coefficient, peek(), "trailing input", {"end of input"});
    return e;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool is_symbol(const char* s, std::size_t k = 0) const {
    return peek(k).kind == Tok::symbol && peek(k).text == s;
  }

  [[noreturn]] void fail(ParseErrorKind kind, const Token& at, const std::string& msg,
                         std::set<std::string> expected = {}) const {
    throw ParseError(kind, at.line, at.column, msg, std::move(expected));
  }

  std::string describe(const Token& t) const {
    switch (t.kind) {
      case Tok::end: return "end of input";
      case Tok::ident: return "identifier '" + t.text + "'";
      default: return "'" + t.text + (t.kind == Tok::imag ? "i'" : "'");
    }
  }

  void expect_symbol(const char* s) {
    if (!is_symbol(s)) fail(ParseErrorKind::syntax, peek(), "unexpected " + describe(peek()), {"'" + std::string(s) + "'"});
    next();
  }

  std::string label_part() {
    const Token& t = peek();
    if (t.kind != Tok::ident && t.kind != Tok::number)
      fail(ParseErrorKind::syntax, t, "unexpected " + describe(t), {"label"});
    next();
    return t.text;
  }

  BasisLabel parse_label() {
    BasisLabel l;
    l.parts.push_back(label_part());
    while (is_symbol(":")) {
      next();
      l.parts.push_back(label_part());
    }
    return l;
  }

  void parse_basis(StateSpec& spec) {
    basis_line_ = peek().line;
    basis_col_ = peek().column;
    spec.basis.push_back(parse_label());
    while (is_symbol(",")) {
      next();
      spec.basis.push_back(parse_label());
    }
  }

  void parse_params(StateSpec& spec) {
    do {
      if (!spec.parameters.empty() && is_symbol(",")) next();
      const Token& name = peek();
      if (name.kind != Tok::ident) fail(ParseErrorKind::syntax, name, "unexpected " + describe(name), {"parameter name"});
      if (name.text == "pi" || name.text == "i" || kFunctions.count(name.text))
        fail(ParseErrorKind::syntax, name, "'" + name.text + "' is reserved");
      next();
      expect_symbol("=");
      const Token& at = peek();
      auto e = parse_arith();
      if (e->kind != Expr::Kind::number)
        fail(ParseErrorKind::malformed_coefficient, at, "parameter values must be constant");
      if (e->value.imag() != 0.0) fail(ParseErrorKind::malformed_coefficient, at, "parameter values must be real");
      if (!spec.parameters.emplace(name.text, e->value.real()).second)
        fail(ParseErrorKind::duplicate_declaration, name, "parameter '" + name.text + "' declared twice");
    } while (is_symbol(","));
  }

  void parse_sum(StateSpec& spec, std::vector<PendingKet>& kets) {
    bool first = true;
    while (true) {
      bool negate = false;
      if (is_symbol("+") || is_symbol("-")) {
        negate = peek().text == "-";
        next();
      } else if (!first) {
        break;
      }
      first = false;
      ExprPtr coef = number(1.0);
      bool explicit_coef = false;
      if (!is_symbol("|")) {
        coef = parse_product(true);
        explicit_coef = true;
        if (is_symbol("*")) next();
      }
      if (!is_symbol("|"))
        fail(ParseErrorKind::syntax, peek(), "unexpected " + describe(peek()), {"'|'", "'*'"});
      const Token& bar = next();
      BasisLabel a = parse_label();
      expect_symbol(",");
      BasisLabel b = parse_label();
      expect_symbol(">");
      if (negate) coef = fold(Expr::Kind::neg, "", {coef}, bar);
      (void)explicit_coef;
      spec.terms.push_back({coef, a, b});
      kets.push_back({a, b, bar.line, bar.column});
    }
  }

  ExprPtr fold(Expr::Kind kind, std::string name, std::vector<ExprPtr> args, const Token& at) {
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->name = std::move(name);
    e->args = std::move(args);
    bool constant = !e->args.empty();
    for (const auto& a : e->args) constant = constant && a->kind == Expr::Kind::number;
    if (!constant) return e;
    cplx v = evaluate(*e, {});
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      fail(ParseErrorKind::malformed_coefficient, at, "coefficient evaluates to a non-finite value");
    return number(v);
  }

  ExprPtr parse_arith() {
    auto lhs = parse_product(false);
    while (is_symbol("+") || is_symbol("-")) {
      const Token& op = next();
      auto rhs = parse_product(false);
      lhs = fold(op.text == "+" ? Expr::Kind::add : Expr::Kind::sub, "", {lhs, rhs}, op);
    }
    return lhs;
  }

  // Inside a ket term a '*' directly before '|' ends the coefficient.
  ExprPtr parse_product(bool before_ket) {
    auto lhs = parse_unary();
    while (is_symbol("*") || is_symbol("/")) {
      if (before_ket && is_symbol("*") && is_symbol("|", 1)) break;
      const Token& op = next();
      auto rhs = parse_unary();
      lhs = fold(op.text == "*" ? Expr::Kind::mul : Expr::Kind::div, "", {lhs, rhs}, op);
    }
    return lhs;
  }

  ExprPtr parse_unary() {
    if (is_symbol("-")) {
      const Token& op = next();
      return fold(Expr::Kind::neg, "", {parse_unary()}, op);
    }
    if (is_symbol("+")) next();
    return parse_power();
  }

  ExprPtr parse_power() {
    auto base = parse_primary();
    if (is_symbol("^")) {
      const Token& op = next();
      return fold(Expr::Kind::pow, "", {base, parse_unary()}, op);
    }
    return base;
  }

  ExprPtr parse_primary() {
    const Token& t = peek();
    static const std::set<std::string> kStart = {"number", "parameter", "'('", "function"};
    switch (t.kind) {
      case Tok::number: next(); return number(t.value);
      case Tok::imag: next(); return number(cplx(0.0, t.value));
      case Tok::ident: {
        next();
        if (t.text == "pi") return number(std::numbers::pi);
        if (t.text == "i") return number(cplx(0.0, 1.0));
        if (is_symbol("(")) {
          if (!kFunctions.count(t.text))
            fail(ParseErrorKind::malformed_coefficient, t, "unknown function '" + t.text + "'");
          next();
          auto arg = parse_arith();
          expect_symbol(")");
          return fold(Expr::Kind::call, t.text, {arg}, t);
        }
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::param;
        e->name = t.text;
        return e;
      }
      case Tok::symbol:
        if (t.text == "(") {
          next();
          auto e = parse_arith();
          expect_symbol(")");
          return e;
        }
        [[fallthrough]];
      default:
        fail(ParseErrorKind::malformed_coefficient, t, "unexpected " + describe(t), kStart);
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int basis_line_ = 1, basis_col_ = 1;
};

}  // namespace

StateSpec parse_state(std::string_view text) { return Parser(text).parse_spec(); }

double evaluate_constant(std::string_view text) {
  auto e = Parser(text).parse_standalone_expr();
  cplx v = evaluate(*e, {});
  if (v.imag() != 0.0 || !std::isfinite(v.real()))
    throw ParseError(ParseErrorKind::malformed_coefficient, 1, 1, "'" + std::string(text) + "' is not a finite real number");
  return v.real();
}

std::string to_text(const StateSpec& spec) {
  std::string out = spec.statistics.name();
  out += "; basis ";
  for (std::size_t i = 0; i < spec.basis.size(); ++i) {
    if (i) out += ",";
    out += spec.basis[i].str();
  }
  out += ";";
  if (!spec.parameters.empty()) {
    out += " param ";
    bool first = true;
    for (const auto& [k, v] : spec.parameters) {
      if (!first) out += ", ";
      out += k + "=" + format_number(v);
      first = false;
    }
    out += ";";
  }
  out += " ";
  for (std::size_t i = 0; i < spec.terms.size(); ++i) {
    const auto& t = spec.terms[i];
    if (i) out += " + ";
    out += to_text(*t.coefficient) + "*|" + t.first.str() + "," + t.second.str() + ">";
  }
  return out;
}

ParamMap effective_parameters(const StateSpec& spec, const ParamMap& overrides) {
  ParamMap p = spec.parameters;
  for (const auto& [k, v] : overrides) p[k] = v;
  return p;
}

BasisPtr make_basis(const StateSpec& spec) { return Basis::make(spec.basis); }

namespace {

cplx coefficient_value(const KetTerm& t, const ParamMap& params) {
  cplx c = evaluate(*t.coefficient, params);
  if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
    throw ParseError(ParseErrorKind::malformed_coefficient, 0, 0,
                     "coefficient of |" + t.first.str() + "," + t.second.str() + "> is not finite");
  return c;
}

}  // namespace

TwoParticleState build_state(const StateSpec& spec, const ParamMap& overrides) {
  return build_state(spec, make_basis(spec), overrides);
}

TwoParticleState build_state(const StateSpec& spec, const BasisPtr& basis, const ParamMap& overrides) {
  const ParamMap params = effective_parameters(spec, overrides);
  TwoParticleState state(spec.statistics, basis);
  for (const auto& t : spec.terms)
    state += coefficient_value(t, params) * TwoParticleState::basis_pair(spec.statistics, basis, t.first, t.second);
  if (state.is_zero()) throw Error(ErrorCode::degenerate_state, "state expression sums to the zero state");
  return state;
}

std::vector<oracle::ProductTerm> product_terms(const StateSpec& spec, const BasisPtr& basis,
                                               const ParamMap& overrides) {
  const ParamMap params = effective_parameters(spec, overrides);
  std::vector<oracle::ProductTerm> out;
  for (const auto& t : spec.terms)
    out.push_back({coefficient_value(t, params), Ket::unit(basis, t.first), Ket::unit(basis, t.second)});
  return out;
}

}  // namespace idsd::cli
