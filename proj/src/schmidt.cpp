#include "idsd/schmidt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace idsd {

namespace {

// Orthonormal basis of span(V) built from projected unit vectors, picking at
// each step the basis direction with the largest residual.
Eigen::MatrixXcd canonical_block(const Eigen::MatrixXcd& v) {
  const Eigen::Index n = v.rows();
  const Eigen::Index m = v.cols();
  Eigen::MatrixXcd residual_proj = v * v.adjoint();
  Eigen::MatrixXcd out(n, m);
  for (Eigen::Index step = 0; step < m; ++step) {
    Eigen::Index best = 0;
    double best_norm = -1.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      double nk = residual_proj.col(k).norm();
      if (nk > best_norm * (1.0 + 1e-9) + 1e-15) {
        best_norm = nk;
        best = k;
      }
    }
    Eigen::VectorXcd u = residual_proj.col(best) / best_norm;
    out.col(step) = u;
    residual_proj -= u * u.adjoint();
  }
  return out;
}

void fix_phase(Eigen::Ref<Eigen::VectorXcd> v, std::size_t dominant) {
  cplx a = v(static_cast<Eigen::Index>(dominant));
  if (std::abs(a) > 0.0) v *= std::conj(a) / std::abs(a);
  v(static_cast<Eigen::Index>(dominant)) = std::abs(v(static_cast<Eigen::Index>(dominant)));
}

}  // namespace

std::vector<Eigenpair> eigendecompose(const ReducedDensity& rho, double zero_tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::verification_failure, "eigensolver did not converge");
  const Eigen::Index n = rho.matrix.rows();

  // Descending order.
  Eigen::VectorXd values = es.eigenvalues().reverse();
  Eigen::MatrixXcd vectors = es.eigenvectors().rowwise().reverse();
  for (Eigen::Index i = 0; i < n; ++i)
    if (values(i) < zero_tol) values(i) = 0.0;

  // Degenerate blocks.
  std::vector<Eigen::Index> block(static_cast<std::size_t>(n));
  Eigen::Index start = 0;
  Eigen::Index block_id = 0;
  for (Eigen::Index i = 0; i <= n; ++i) {
    if (i == n || values(i) < values(start) - kDegeneracyTol) {
      if (i - start > 1) vectors.middleCols(start, i - start) = canonical_block(vectors.middleCols(start, i - start));
      for (Eigen::Index k = start; k < i; ++k) block[static_cast<std::size_t>(k)] = block_id;
      ++block_id;
      start = i;
    }
  }

  std::vector<Eigenpair> pairs;
  std::vector<std::size_t> dominant;
  for (Eigen::Index i = 0; i < n; ++i) {
    Ket k(rho.basis, vectors.col(i));
    std::size_t dom = k.dominant_index();
    Eigen::VectorXcd amp = k.amplitudes();
    fix_phase(amp, dom);
    for (auto& a : amp) {
      if (std::abs(a.real()) < kPruneTol) a.real(0.0);
      if (std::abs(a.imag()) < kPruneTol) a.imag(0.0);
    }
    pairs.push_back({values(i), Ket(rho.basis, amp)});
    dominant.push_back(dom);
  }

  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (block[a] != block[b]) return block[a] < block[b];
    return (*rho.basis)[dominant[a]] < (*rho.basis)[dominant[b]];
  });
  std::vector<Eigenpair> sorted;
  sorted.reserve(pairs.size());
  for (auto i : order) sorted.push_back(pairs[i]);
  return sorted;
}

Ket bar_vector(const TwoParticleState& state, const Ket& ket) {
  // sum_j <i,j|Psi> |j> coincides with the one-particle projection <i|Psi>.
  return project1(ket, state);
}

Ket tilde_partner(const TwoParticleState& state, const Ket& eigenket, double lambda, double zero_tol) {
  if (!(lambda > zero_tol))
    throw Error(ErrorCode::zero_eigenvalue, "no partner state for a vanishing eigenvalue");
  Ket bar = bar_vector(state, eigenket);
  double n = bar.norm();
  if (n < zero_tol) throw Error(ErrorCode::zero_eigenvalue, "partner state vanishes");
  return (1.0 / n) * bar;
}

double entropy_bits(std::span<const double> lambdas) {
  double s = 0.0;
  for (double l : lambdas)
    if (l > 0.0) s -= l * std::log2(l);
  return s < 0.0 ? 0.0 : s;
}

double entropy(const SchmidtDecomposition& sd) {
  std::vector<double> l;
  for (const auto& t : sd.terms) l.push_back(t.lambda);
  return entropy_bits(l);
}

std::size_t schmidt_number(const SchmidtDecomposition& sd) { return sd.terms.size(); }

TwoParticleState reconstruct(const SchmidtDecomposition& sd, Statistics stats) {
  if (sd.terms.empty()) throw Error(ErrorCode::invalid_argument, "empty decomposition");
  TwoParticleState out(stats, sd.terms.front().ket.basis());
  for (const auto& t : sd.terms) out += t.coefficient * wedge(t.ket, t.ket_tilde, stats);
  return out;
}

SchmidtDecomposition decompose(const TwoParticleState& state, const ReducedDensity& rho, double zero_tol) {
  return decompose(state, rho, eigendecompose(rho, zero_tol), zero_tol);
}

SchmidtDecomposition decompose(const TwoParticleState& state, const ReducedDensity& rho,
                               const std::vector<Eigenpair>& eigensystem, double zero_tol) {
  const TwoParticleState psi = state.normalized();
  SchmidtDecomposition sd;
  TwoParticleState candidate(psi.statistics(), psi.basis());
  for (const auto& ep : eigensystem) {
    sd.spectrum.push_back(ep.lambda);
    if (!(ep.lambda > zero_tol)) continue;
    Ket i = rho.embed(ep.ket, psi.basis());
    Ket tilde = tilde_partner(psi, i, ep.lambda, zero_tol);
    candidate += std::sqrt(ep.lambda) * wedge(i, tilde, psi.statistics());
    sd.terms.push_back({ep.lambda, cplx(std::sqrt(ep.lambda)), std::move(i), std::move(tilde)});
  }
  if (sd.terms.empty()) throw Error(ErrorCode::decomposition_failure, "reduced density has no nonzero eigenvalue");

  const double cand_norm2 = candidate.norm2();
  if (cand_norm2 < kPruneTol)
    throw Error(ErrorCode::decomposition_failure, "Schmidt terms cancel; reduced density does not match the state");
  const cplx overlap = inner2(candidate, psi);
  sd.prefactor = overlap / cand_norm2;
  sd.reconstruction_fidelity = std::min(1.0, std::norm(overlap) / cand_norm2);
  if (sd.reconstruction_fidelity < 1.0 - kFidelityTol)
    throw Error(ErrorCode::decomposition_failure,
                "Schmidt terms do not reproduce the state (fidelity " + std::to_string(sd.reconstruction_fidelity) + ")");

  for (auto& t : sd.terms) t.coefficient = sd.prefactor * std::sqrt(t.lambda);
  sd.schmidt_number = sd.terms.size();
  sd.entropy = entropy(sd);
  return sd;
}

}  // namespace idsd
