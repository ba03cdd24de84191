#pragma once

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace idsd {

/// Exchange sign of the particle species.
class Statistics {
 public:
  static constexpr Statistics boson() { return Statistics(+1); }
  static constexpr Statistics fermion() { return Statistics(-1); }

  constexpr int eta() const noexcept { return eta_; }
  constexpr bool is_boson() const noexcept { return eta_ > 0; }
  constexpr bool is_fermion() const noexcept { return eta_ < 0; }

  constexpr bool operator==(const Statistics&) const = default;

  const char* name() const noexcept { return is_boson() ? "boson" : "fermion"; }

 private:
  explicit constexpr Statistics(int eta) : eta_(eta) {}
  int eta_;
};

/// Tuple of observable values identifying one single-particle basis state,
/// e.g. {"up"} or {"L", "up"}.
struct BasisLabel {
  std::vector<std::string> parts;

  BasisLabel() = default;
  BasisLabel(std::initializer_list<std::string> p) : parts(p) {}
  explicit BasisLabel(std::vector<std::string> p) : parts(std::move(p)) {}

  std::size_t arity() const noexcept { return parts.size(); }

  /// Parts joined by ':' as written in the state DSL.
  std::string str() const;

  auto operator<=>(const BasisLabel&) const = default;
};

/// Parses "L:up" into {"L","up"}.
BasisLabel parse_label(const std::string& text);

/// Ordered orthonormal single-particle basis. Labels are pairwise distinct
/// and share one arity.
class Basis {
 public:
  explicit Basis(std::vector<BasisLabel> labels);

  /// Convenience for single-token labels.
  static std::shared_ptr<const Basis> simple(std::initializer_list<std::string> tokens);
  static std::shared_ptr<const Basis> make(std::vector<BasisLabel> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t arity() const noexcept { return arity_; }
  bool composite() const noexcept { return arity_ >= 2; }

  const BasisLabel& operator[](std::size_t i) const { return labels_[i]; }
  const std::vector<BasisLabel>& labels() const noexcept { return labels_; }

  std::optional<std::size_t> find(const BasisLabel& label) const;
  std::size_t index_of(const BasisLabel& label) const;  // throws if absent

  /// Distinct values of one observable (label part), in first-seen order.
  std::vector<std::string> values_of(std::size_t part) const;

  bool operator==(const Basis& other) const { return labels_ == other.labels_; }

 private:
  std::vector<BasisLabel> labels_;
  std::size_t arity_ = 0;
};

using BasisPtr = std::shared_ptr<const Basis>;

bool same_basis(const BasisPtr& a, const BasisPtr& b);

}  // namespace idsd
