#pragma once

#include <functional>
#include <string>
#include <vector>

#include "idsd/core.hpp"

namespace idsd {

/// Selects single-particle basis labels, e.g. every label on site L.
using LabelPredicate = std::function<bool(const BasisLabel&)>;

/// Matches labels listed exactly or whose leading parts equal a listed
/// shorter label ("L" selects "L:up" and "L:dn").
LabelPredicate label_prefix_set(std::vector<BasisLabel> items);

/// Matches labels whose part `part` equals `value`.
LabelPredicate observable_equals(std::size_t part, std::string value);

enum class TraceKind { global, local, fixed_observable };

std::string to_string(TraceKind kind);

/// Single-particle reduced density matrix, normalized to unit trace.
///
/// `basis` is the basis of `matrix`. For global and local traces it is the
/// state's own single-particle basis; a fixed-observable trace lives on the
/// labels of the remaining observables. `embedding` maps kets of `basis` into
/// the state's single-particle space (identity unless fixed-observable).
struct ReducedDensity {
  BasisPtr basis;
  Eigen::MatrixXcd matrix;
  TraceKind kind = TraceKind::global;
  std::string description;  // "global", "local:L", "fixed:0=L"
  double raw_trace = 0.0;   // trace before normalization
  Eigen::MatrixXcd embedding;
  /// Fixed-observable only: the unmeasured particle has support on more than
  /// one value of the fixed observable, so the reduction to the remaining
  /// observables is not spectrum preserving.
  bool overlapping = false;

  std::size_t dim() const noexcept { return basis->size(); }

  /// Matrix before normalization.
  Eigen::MatrixXcd raw() const { return raw_trace * matrix; }

  /// Lifts a ket of `basis` into the state's single-particle space.
  Ket embed(const Ket& k, const BasisPtr& full_basis) const;

  /// Throws verification_failure unless Hermitian, PSD and unit trace.
  void validate(double herm_tol = 1e-12, double psd_tol = 1e-10, double trace_tol = 1e-12) const;
};

/// rho = 1/2 sum_j <j|Psi><Psi|j> over the complete basis. raw_trace equals
/// <Psi|Psi>.
ReducedDensity reduce_global(const TwoParticleState& state);

/// rho_S = sum_{j in S} <j|Psi><Psi|j>, normalized. The result is expressed on
/// the full basis; its support sits on the complement of S when the state
/// links S to its complement.
ReducedDensity reduce_local(const TwoParticleState& state, const LabelPredicate& subspace,
                            std::string description = "local");

/// Fixes observable `fixed_part` at `a_value` on the measured particle and sums
/// over the remaining observables, then traces the fixed observable of the
/// other particle to land on the remaining-observable basis.
ReducedDensity reduce_fixed_observable(const TwoParticleState& state, const std::string& a_value,
                                       std::size_t fixed_part = 0);

}  // namespace idsd
