#include "idsd/core.hpp"

#include <algorithm>

namespace idsd {

namespace {

void require_same_basis(const BasisPtr& a, const BasisPtr& b, const char* what) {
  if (!same_basis(a, b)) throw Error(ErrorCode::basis_mismatch, std::string(what) + ": kets live on different bases");
}

}  // namespace

// ---------------------------------------------------------------- Ket

Ket::Ket(BasisPtr basis, Eigen::VectorXcd amplitudes) : basis_(std::move(basis)), amp_(std::move(amplitudes)) {
  if (!basis_) throw Error(ErrorCode::invalid_argument, "ket without basis");
  if (static_cast<std::size_t>(amp_.size()) != basis_->size())
    throw Error(ErrorCode::basis_mismatch, "amplitude count does not match basis dimension");
}

Ket::Ket(BasisPtr basis) : Ket(basis, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->size()))) {}

Ket Ket::unit(BasisPtr basis, std::size_t index) {
  Ket k(std::move(basis));
  k.amp_(static_cast<Eigen::Index>(index)) = 1.0;
  return k;
}

Ket Ket::unit(BasisPtr basis, const BasisLabel& label) {
  auto idx = basis->index_of(label);
  return unit(std::move(basis), idx);
}

Ket Ket::normalized() const {
  double n = norm();
  if (n < kPruneTol) throw Error(ErrorCode::degenerate_state, "cannot normalize a zero ket");
  return Ket(basis_, amp_ / n);
}

std::size_t Ket::dominant_index() const {
  std::size_t best = 0;
  double best_mag = -1.0;
  for (Eigen::Index i = 0; i < amp_.size(); ++i) {
    // Relative slack so that numerically tied components resolve to the lower index.
    double m = std::abs(amp_(i));
    if (m > best_mag * (1.0 + 1e-9) + 1e-15) {
      best_mag = m;
      best = static_cast<std::size_t>(i);
    }
  }
  return best;
}

Ket& Ket::operator+=(const Ket& other) {
  require_same_basis(basis_, other.basis_, "ket sum");
  amp_ += other.amp_;
  return *this;
}

Ket& Ket::operator-=(const Ket& other) {
  require_same_basis(basis_, other.basis_, "ket difference");
  amp_ -= other.amp_;
  return *this;
}

Ket& Ket::operator*=(cplx s) {
  amp_ *= s;
  return *this;
}

cplx braket(const Ket& bra, const Ket& ket) {
  require_same_basis(bra.basis(), ket.basis(), "braket");
  return bra.amplitudes().dot(ket.amplitudes());  // Eigen conjugates the left operand
}

// ---------------------------------------------------------------- TwoParticleState

TwoParticleState::TwoParticleState(Statistics stats, BasisPtr basis)
    : stats_(stats), basis_(std::move(basis)) {
  if (!basis_) throw Error(ErrorCode::invalid_argument, "state without basis");
  auto d = static_cast<Eigen::Index>(basis_->size());
  c_ = Eigen::MatrixXcd::Zero(d, d);
}

TwoParticleState::TwoParticleState(Statistics stats, BasisPtr basis, const Eigen::MatrixXcd& coeffs)
    : TwoParticleState(stats, std::move(basis)) {
  if (coeffs.rows() != c_.rows() || coeffs.cols() != c_.cols())
    throw Error(ErrorCode::basis_mismatch, "coefficient matrix does not match basis dimension");
  c_ = 0.5 * (coeffs + static_cast<double>(stats_.eta()) * coeffs.transpose());
}

TwoParticleState TwoParticleState::basis_pair(Statistics stats, BasisPtr basis, const BasisLabel& a,
                                              const BasisLabel& b) {
  Ket ka = Ket::unit(basis, a);
  Ket kb = Ket::unit(basis, b);
  return wedge(ka, kb, stats);
}

double TwoParticleState::norm2() const {
  // With c symmetric, <Psi|Psi> = sum conj(c_ij) c_ij (1 + eta^2) = 2 |c|_F^2.
  return 2.0 * c_.squaredNorm();
}

bool TwoParticleState::is_zero(double tol) const { return norm2() <= tol * tol; }

TwoParticleState TwoParticleState::normalized() const {
  double n2 = norm2();
  if (n2 <= kPruneTol * kPruneTol) throw Error(ErrorCode::degenerate_state, "cannot normalize a zero-norm state");
  TwoParticleState out = *this;
  out.c_ /= std::sqrt(n2);
  return out;
}

TwoParticleState TwoParticleState::in_basis(BasisPtr new_basis, const Eigen::MatrixXcd& old_in_new) const {
  if (!new_basis || static_cast<std::size_t>(old_in_new.rows()) != new_basis->size() ||
      static_cast<std::size_t>(old_in_new.cols()) != dim())
    throw Error(ErrorCode::basis_mismatch, "change-of-basis matrix has wrong shape");
  TwoParticleState out(stats_, std::move(new_basis));
  out.c_ = old_in_new * c_ * old_in_new.transpose();
  return out;
}

void TwoParticleState::check_compatible(const TwoParticleState& other) const {
  if (stats_ != other.stats_) throw Error(ErrorCode::statistics_mismatch, "states of different statistics");
  require_same_basis(basis_, other.basis_, "two-particle state");
}

TwoParticleState& TwoParticleState::operator+=(const TwoParticleState& other) {
  check_compatible(other);
  c_ += other.c_;
  return *this;
}

TwoParticleState& TwoParticleState::operator-=(const TwoParticleState& other) {
  check_compatible(other);
  c_ -= other.c_;
  return *this;
}

TwoParticleState& TwoParticleState::operator*=(cplx s) {
  c_ *= s;
  return *this;
}

// ---------------------------------------------------------------- operations

TwoParticleState wedge(const Ket& phi, const Ket& psi, Statistics stats) {
  require_same_basis(phi.basis(), psi.basis(), "wedge");
  // sum_ij a_i b_j |i,j>; the constructor symmetrizes.
  Eigen::MatrixXcd outer = phi.amplitudes() * psi.amplitudes().transpose();
  return TwoParticleState(stats, phi.basis(), outer);
}

cplx inner2(const TwoParticleState& bra, const TwoParticleState& ket) {
  if (bra.statistics() != ket.statistics())
    throw Error(ErrorCode::statistics_mismatch, "inner2: states of different statistics");
  require_same_basis(bra.basis(), ket.basis(), "inner2");
  // <k,l|i,j> = d_ki d_lj + eta d_kj d_li; the symmetry of both coefficient
  // matrices collapses the sum to twice the Frobenius product.
  const auto& a = bra.coeffs();
  const auto& b = ket.coeffs();
  cplx direct = (a.conjugate().cwiseProduct(b)).sum();
  cplx exchanged = (a.conjugate().cwiseProduct(b.transpose())).sum();
  return direct + static_cast<double>(bra.statistics().eta()) * exchanged;
}

Ket project1(const Ket& bra, const TwoParticleState& state) {
  require_same_basis(bra.basis(), state.basis(), "project1");
  // <k| sum c_ij |i,j> = sum c_ij (<k|i>|j> + eta <k|j>|i>)
  const auto& c = state.coeffs();
  Eigen::VectorXcd kc = bra.amplitudes().conjugate();
  Eigen::VectorXcd first = c.transpose() * kc;
  Eigen::VectorXcd second = c * kc;
  return Ket(state.basis(), first + static_cast<double>(state.statistics().eta()) * second);
}

BasisLabel drop_part(const BasisLabel& label, std::size_t part) {
  BasisLabel out;
  for (std::size_t i = 0; i < label.parts.size(); ++i)
    if (i != part) out.parts.push_back(label.parts[i]);
  return out;
}

Ket PartialProjection::at(const std::string& a_value) const {
  auto it = std::find(a_values.begin(), a_values.end(), a_value);
  if (it == a_values.end()) return Ket(basis);
  auto row = static_cast<Eigen::Index>(it - a_values.begin());
  return Ket(basis, amp.row(row).transpose());
}

PartialProjection project1_partial(const BasisLabel& b, const TwoParticleState& state, std::size_t fixed_part) {
  const Basis& basis = *state.basis();
  if (!basis.composite())
    throw Error(ErrorCode::unsupported_basis, "partial projection needs composite basis labels");
  if (fixed_part >= basis.arity())
    throw Error(ErrorCode::unsupported_basis, "no observable part " + std::to_string(fixed_part));
  if (b.arity() + 1 != basis.arity())
    throw Error(ErrorCode::invalid_argument, "bra '" + b.str() + "' does not match the non-fixed observables");

  PartialProjection out;
  out.basis = state.basis();
  out.fixed_part = fixed_part;
  out.a_values = basis.values_of(fixed_part);
  const auto d = static_cast<Eigen::Index>(basis.size());
  out.amp = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(out.a_values.size()), d);

  // <b| sum c_ij |i,j> = sum c_ij (<b|B_i> |A_i> x |j> + eta <b|B_j> |i> x |A_j>).
  // The A-only slot is stored first; the slot swap carries no sign because the
  // subsequent <a| acts on that slot wherever it sits.
  const auto& c = state.coeffs();
  const double eta = state.statistics().eta();
  auto row_of = [&](std::size_t i) {
    const auto& v = basis[i].parts[fixed_part];
    return static_cast<Eigen::Index>(std::find(out.a_values.begin(), out.a_values.end(), v) - out.a_values.begin());
  };
  for (Eigen::Index i = 0; i < d; ++i) {
    if (drop_part(basis[static_cast<std::size_t>(i)], fixed_part) != b) continue;
    const Eigen::Index r = row_of(static_cast<std::size_t>(i));
    for (Eigen::Index k = 0; k < d; ++k) {
      out.amp(r, k) += c(i, k);        // measured particle in the first slot
      out.amp(r, k) += eta * c(k, i);  // measured particle in the second slot
    }
  }
  return out;
}

}  // namespace idsd
