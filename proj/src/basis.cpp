#include "idsd/basis.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "idsd/error.hpp"

namespace idsd {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::basis_mismatch: return "basis_mismatch";
    case ErrorCode::statistics_mismatch: return "statistics_mismatch";
    case ErrorCode::unsupported_basis: return "unsupported_basis";
    case ErrorCode::degenerate_state: return "degenerate_state";
    case ErrorCode::no_support: return "no_support";
    case ErrorCode::pauli_violation: return "pauli_violation";
    case ErrorCode::zero_eigenvalue: return "zero_eigenvalue";
    case ErrorCode::decomposition_failure: return "decomposition_failure";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::verification_failure: return "verification_failure";
  }
  return "unknown";
}

std::string BasisLabel::str() const {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ':';
    out += parts[i];
  }
  return out;
}

BasisLabel parse_label(const std::string& text) {
  BasisLabel label;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, ':')) label.parts.push_back(part);
  if (!text.empty() && text.back() == ':') label.parts.emplace_back();
  return label;
}

Basis::Basis(std::vector<BasisLabel> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw Error(ErrorCode::invalid_argument, "basis must not be empty");
  arity_ = labels_.front().arity();
  std::set<BasisLabel> seen;
  for (const auto& l : labels_) {
    if (l.arity() != arity_ || arity_ == 0)
      throw Error(ErrorCode::invalid_argument, "basis label '" + l.str() + "' has non-uniform arity");
    for (const auto& p : l.parts)
      if (p.empty()) throw Error(ErrorCode::invalid_argument, "basis label '" + l.str() + "' has an empty part");
    if (!seen.insert(l).second)
      throw Error(ErrorCode::invalid_argument, "duplicate basis label '" + l.str() + "'");
  }
}

std::shared_ptr<const Basis> Basis::simple(std::initializer_list<std::string> tokens) {
  std::vector<BasisLabel> labels;
  for (const auto& t : tokens) labels.push_back(BasisLabel{t});
  return make(std::move(labels));
}

std::shared_ptr<const Basis> Basis::make(std::vector<BasisLabel> labels) {
  return std::make_shared<const Basis>(std::move(labels));
}

std::optional<std::size_t> Basis::find(const BasisLabel& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

std::size_t Basis::index_of(const BasisLabel& label) const {
  if (auto i = find(label)) return *i;
  throw Error(ErrorCode::invalid_argument, "unknown basis label '" + label.str() + "'");
}

std::vector<std::string> Basis::values_of(std::size_t part) const {
  if (part >= arity_) throw Error(ErrorCode::unsupported_basis, "basis has no observable part " + std::to_string(part));
  std::vector<std::string> out;
  for (const auto& l : labels_)
    if (std::find(out.begin(), out.end(), l.parts[part]) == out.end()) out.push_back(l.parts[part]);
  return out;
}

bool same_basis(const BasisPtr& a, const BasisPtr& b) {
  return a == b || (a && b && *a == *b);
}

}  // namespace idsd
