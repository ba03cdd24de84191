#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "idsd/basis.hpp"
#include "idsd/error.hpp"

namespace idsd {

using cplx = std::complex<double>;

/// Amplitudes below this magnitude are dropped when canonicalizing.
inline constexpr double kPruneTol = 1e-12;

/// Single-particle state over a labeled orthonormal basis. Normalization is
/// tracked, not forced.
class Ket {
 public:
  Ket(BasisPtr basis, Eigen::VectorXcd amplitudes);

  /// Zero ket.
  explicit Ket(BasisPtr basis);

  static Ket unit(BasisPtr basis, std::size_t index);
  static Ket unit(BasisPtr basis, const BasisLabel& label);

  const BasisPtr& basis() const noexcept { return basis_; }
  const Eigen::VectorXcd& amplitudes() const noexcept { return amp_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(amp_.size()); }
  cplx operator[](std::size_t i) const { return amp_(static_cast<Eigen::Index>(i)); }

  double norm() const { return amp_.norm(); }
  bool is_normalized(double tol = 1e-12) const { return std::abs(amp_.squaredNorm() - 1.0) <= tol; }
  Ket normalized() const;

  /// Index of the largest-magnitude amplitude (lowest index on ties).
  std::size_t dominant_index() const;

  Ket& operator+=(const Ket& other);
  Ket& operator-=(const Ket& other);
  Ket& operator*=(cplx s);

  friend Ket operator+(Ket a, const Ket& b) { return a += b; }
  friend Ket operator-(Ket a, const Ket& b) { return a -= b; }
  friend Ket operator*(cplx s, Ket k) { return k *= s; }
  friend Ket operator*(Ket k, cplx s) { return k *= s; }

 private:
  BasisPtr basis_;
  Eigen::VectorXcd amp_;
};

/// <bra|ket>, antilinear in the bra.
cplx braket(const Ket& bra, const Ket& ket);

/// Two identical particles without labels: sum_ij c_ij |i,j> with
/// c_ji = eta * c_ij held exactly.
class TwoParticleState {
 public:
  /// Zero state.
  TwoParticleState(Statistics stats, BasisPtr basis);

  /// Interprets `coeffs` as sum_ij m_ij |i,j> and stores the exchange-symmetric
  /// representative (m + eta m^T)/2 of the same vector.
  TwoParticleState(Statistics stats, BasisPtr basis, const Eigen::MatrixXcd& coeffs);

  /// |label_a, label_b> for two basis labels.
  static TwoParticleState basis_pair(Statistics stats, BasisPtr basis,
                                     const BasisLabel& a, const BasisLabel& b);

  Statistics statistics() const noexcept { return stats_; }
  const BasisPtr& basis() const noexcept { return basis_; }
  std::size_t dim() const noexcept { return basis_->size(); }
  const Eigen::MatrixXcd& coeffs() const noexcept { return c_; }

  /// <Psi|Psi> under the symmetric two-particle scalar product.
  double norm2() const;
  bool is_zero(double tol = kPruneTol) const;
  TwoParticleState normalized() const;

  /// Re-expresses the state in another orthonormal basis; column k of
  /// `old_in_new` holds the old basis vector k in new-basis components.
  TwoParticleState in_basis(BasisPtr new_basis, const Eigen::MatrixXcd& old_in_new) const;

  TwoParticleState& operator+=(const TwoParticleState& other);
  TwoParticleState& operator-=(const TwoParticleState& other);
  TwoParticleState& operator*=(cplx s);

  friend TwoParticleState operator+(TwoParticleState a, const TwoParticleState& b) { return a += b; }
  friend TwoParticleState operator-(TwoParticleState a, const TwoParticleState& b) { return a -= b; }
  friend TwoParticleState operator*(cplx s, TwoParticleState x) { return x *= s; }
  friend TwoParticleState operator*(TwoParticleState x, cplx s) { return x *= s; }

 private:
  void check_compatible(const TwoParticleState& other) const;

  Statistics stats_;
  BasisPtr basis_;
  Eigen::MatrixXcd c_;
};

/// |phi, psi>: the symmetric external product of two single-particle kets.
TwoParticleState wedge(const Ket& phi, const Ket& psi, Statistics stats);

/// <bra|ket> = <f|p><z|q> + eta <f|q><z|p>, extended bilinearly.
cplx inner2(const TwoParticleState& bra, const TwoParticleState& ket);

/// One-particle projection <k|Psi> = sum <k|phi>|psi> + eta <k|psi>|phi>.
/// The returned ket is generally unnormalized.
Ket project1(const Ket& bra, const TwoParticleState& state);

/// Mixed-rank object left after projecting one particle onto a value of the
/// non-fixed observables: sum_{a,k} amp(a,k) |a> x |k>, where |a> carries
/// only the fixed observable of the measured particle and |k> is the full
/// state of the other one.
struct PartialProjection {
  BasisPtr basis;                    // full single-particle basis
  std::size_t fixed_part = 0;        // label part holding observable A
  std::vector<std::string> a_values; // distinct A values, row order
  Eigen::MatrixXcd amp;              // a_values.size() x basis->size()

  /// Row for one A value, as a ket of the unmeasured particle.
  Ket at(const std::string& a_value) const;
};

/// Applies <b| (values of every observable except `fixed_part`) to the state.
/// Requires a composite basis.
PartialProjection project1_partial(const BasisLabel& b, const TwoParticleState& state,
                                   std::size_t fixed_part = 0);

/// The label with one part removed, e.g. ("L","up") minus part 0 -> ("up").
BasisLabel drop_part(const BasisLabel& label, std::size_t part);

}  // namespace idsd
