#include "idsd/oracle.hpp"

#include <algorithm>
#include <functional>

#include <Eigen/Eigenvalues>

namespace idsd::oracle {

namespace {

Eigen::VectorXcd kron(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  Eigen::VectorXcd out(a.size() * b.size());
  for (Eigen::Index k = 0; k < a.size(); ++k) out.segment(k * b.size(), b.size()) = a(k) * b;
  return out;
}

}  // namespace

LabeledState symmetrize(const Ket& phi, const Ket& psi, Statistics stats) {
  if (!same_basis(phi.basis(), psi.basis())) throw Error(ErrorCode::basis_mismatch, "symmetrize: basis mismatch");
  Eigen::VectorXcd v = kron(phi.amplitudes(), psi.amplitudes()) +
                       static_cast<double>(stats.eta()) * kron(psi.amplitudes(), phi.amplitudes());
  double n = v.norm();
  if (n < kPruneTol) throw Error(ErrorCode::pauli_violation, "symmetrized product vanishes");
  return LabeledState{phi.basis(), stats, v / n};
}

LabeledState symmetrize(const std::vector<ProductTerm>& terms, Statistics stats) {
  if (terms.empty()) throw Error(ErrorCode::degenerate_state, "no product terms");
  const BasisPtr& basis = terms.front().phi.basis();
  const auto d = static_cast<Eigen::Index>(basis->size());
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d * d);
  for (const auto& t : terms) {
    if (!same_basis(t.phi.basis(), basis) || !same_basis(t.psi.basis(), basis))
      throw Error(ErrorCode::basis_mismatch, "symmetrize: basis mismatch");
    v += t.coefficient * (kron(t.phi.amplitudes(), t.psi.amplitudes()) +
                          static_cast<double>(stats.eta()) * kron(t.psi.amplitudes(), t.phi.amplitudes()));
  }
  double n = v.norm();
  if (n < kPruneTol) throw Error(ErrorCode::degenerate_state, "symmetrized superposition vanishes");
  return LabeledState{basis, stats, v / n};
}

double exchange_defect(const LabeledState& s) {
  const auto d = static_cast<Eigen::Index>(s.dim());
  double worst = 0.0;
  for (Eigen::Index k = 0; k < d; ++k)
    for (Eigen::Index l = 0; l < d; ++l)
      worst = std::max(worst, std::abs(s.vector(k * d + l) - static_cast<double>(s.statistics.eta()) * s.vector(l * d + k)));
  return worst;
}

Eigen::MatrixXcd oracle_reduce_global(const LabeledState& s) {
  const auto d = static_cast<Eigen::Index>(s.dim());
  // Row k of the reshaped vector is the second-factor amplitude given |k>.
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k)
    for (Eigen::Index kp = 0; kp < d; ++kp)
      for (Eigen::Index l = 0; l < d; ++l) rho(k, kp) += s.vector(k * d + l) * std::conj(s.vector(kp * d + l));
  return rho / rho.trace().real();
}

Eigen::MatrixXcd oracle_reduce_local(const LabeledState& s, const LabelPredicate& subspace) {
  const auto d = static_cast<Eigen::Index>(s.dim());
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index b = 0; b < d; ++b) {
    if (!subspace((*s.basis)[static_cast<std::size_t>(b)])) continue;
    Eigen::VectorXcd w = s.vector.segment(b * d, d);  // (<b| (x) I)|s>
    rho += w * w.adjoint();
  }
  double tr = rho.trace().real();
  if (!(tr >= 1e-12)) throw Error(ErrorCode::no_support, "labeled state has no support on the subspace");
  return rho / tr;
}

std::vector<double> spectrum(const Eigen::MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

double spectrum_deviation(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end(), std::greater<>());
  std::sort(b.begin(), b.end(), std::greater<>());
  std::size_t n = std::max(a.size(), b.size());
  a.resize(n, 0.0);
  b.resize(n, 0.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace idsd::oracle
