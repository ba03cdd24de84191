#pragma once

// Text format for two-particle states.
//
//   spec      := statement (';' statement)* [';']
//   statement := 'boson' | 'fermion'
//              | 'basis' label (',' label)*
//              | 'param' name '=' expr (',' name '=' expr)*
//              | sum
//   sum       := ['+'|'-'] term (('+'|'-') term)*
//   term      := [product ['*']] '|' label ',' label '>'
//   label     := token (':' token)*
//   expr      := arithmetic over numbers, imaginary literals (2i, 0.5i),
//                'i', 'pi', parameters, + - * / ^ and cos sin tan exp sqrt
//                abs conj
//
// Whitespace and newlines are insignificant; '#' starts a comment. Constant
// subexpressions are folded while parsing, so only parameter-dependent parts
// stay symbolic.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "idsd/core.hpp"
#include "idsd/oracle.hpp"

namespace idsd::cli {

using ParamMap = std::map<std::string, double>;

enum class ParseErrorKind {
  syntax,
  unknown_label,
  malformed_coefficient,
  pauli_violation,
  unknown_parameter,
  duplicate_declaration,
};

std::string_view to_string(ParseErrorKind kind) noexcept;

class ParseError : public Error {
 public:
  ParseError(ParseErrorKind kind, int line, int column, const std::string& message,
             std::set<std::string> expected = {});

  ParseErrorKind kind() const noexcept { return kind_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::set<std::string>& expected() const noexcept { return expected_; }

 private:
  ParseErrorKind kind_;
  int line_;
  int column_;
  std::set<std::string> expected_;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Coefficient expression tree.
struct Expr {
  enum class Kind { number, param, neg, add, sub, mul, div, pow, call };
  Kind kind = Kind::number;
  cplx value;         // number
  std::string name;   // param or function name
  std::vector<ExprPtr> args;

  bool operator==(const Expr& other) const;
};

cplx evaluate(const Expr& e, const ParamMap& params);
std::string to_text(const Expr& e);

struct KetTerm {
  ExprPtr coefficient;
  BasisLabel first;
  BasisLabel second;

  bool operator==(const KetTerm& other) const;
};

struct StateSpec {
  Statistics statistics = Statistics::boson();
  std::vector<BasisLabel> basis;
  ParamMap parameters;
  std::vector<KetTerm> terms;

  bool operator==(const StateSpec& other) const;
};

StateSpec parse_state(std::string_view text);

/// Canonical text; parse_state(to_text(s)) == s.
std::string to_text(const StateSpec& spec);

/// Parses and evaluates a parameter-free expression to a real number.
double evaluate_constant(std::string_view text);

/// Declared parameters overridden by `overrides`.
ParamMap effective_parameters(const StateSpec& spec, const ParamMap& overrides);

BasisPtr make_basis(const StateSpec& spec);

/// The no-label state. Throws degenerate_state when the terms cancel.
TwoParticleState build_state(const StateSpec& spec, const ParamMap& overrides = {});
TwoParticleState build_state(const StateSpec& spec, const BasisPtr& basis, const ParamMap& overrides);

/// The same superposition as product terms for the labeled oracle.
std::vector<oracle::ProductTerm> product_terms(const StateSpec& spec, const BasisPtr& basis,
                                               const ParamMap& overrides = {});

}  // namespace idsd::cli
