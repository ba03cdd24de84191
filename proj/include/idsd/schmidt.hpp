#pragma once

#include <span>
#include <vector>

#include "idsd/trace.hpp"

namespace idsd {

/// Eigenvalues below this are treated as zero; defines the Schmidt number.
inline constexpr double kDefaultZeroTol = 1e-10;

/// Eigenvalues closer than this form one degenerate block.
inline constexpr double kDegeneracyTol = 1e-9;

/// Decompositions whose reconstruction fidelity falls below 1 - this fail.
inline constexpr double kFidelityTol = 1e-8;

struct Eigenpair {
  double lambda = 0.0;
  Ket ket;  // on the reduced density's basis
};

/// Full orthonormal eigensystem of a reduced density.
///
/// Eigenvalues are sorted descending and values below `zero_tol` are clamped
/// to zero. Inside a degenerate block the eigenvectors are rebuilt greedily
/// from the projections of basis vectors onto the block, so repeated calls
/// and equivalent inputs give the same basis. The largest-magnitude component
/// of every eigenvector is made real positive, and ties in eigenvalue are
/// ordered by the label of that component.
std::vector<Eigenpair> eigendecompose(const ReducedDensity& rho, double zero_tol = kDefaultZeroTol);

/// Unit-norm partner |i~> proportional to |i-bar> = sum_j <i,j|Psi>|j>.
///
/// For a global trace of a normalized state |i-bar> has norm sqrt(2 lambda);
/// the partner is normalized by the actual norm so that localized and
/// fixed-observable traces are covered by the same routine.
Ket tilde_partner(const TwoParticleState& state, const Ket& eigenket, double lambda,
                  double zero_tol = kDefaultZeroTol);

/// |i-bar> = sum_j <i,j|Psi>|j>, unnormalized.
Ket bar_vector(const TwoParticleState& state, const Ket& ket);

struct SchmidtTerm {
  double lambda = 0.0;
  cplx coefficient;  // prefactor * sqrt(lambda)
  Ket ket;           // |i>, on the state's basis
  Ket ket_tilde;     // |i~>, on the state's basis
};

struct SchmidtDecomposition {
  std::vector<SchmidtTerm> terms;  // descending lambda
  std::vector<double> spectrum;    // every eigenvalue of the reduced density
  std::size_t schmidt_number = 0;
  double entropy = 0.0;            // bits
  double reconstruction_fidelity = 0.0;
  cplx prefactor;
};

/// Schmidt decomposition of `state` with respect to a reduced density `rho`
/// computed from it. Terms run over eigenvalues above `zero_tol`; a single
/// complex prefactor is fitted so that sum prefactor sqrt(lambda_i) |i, i~>
/// reproduces the normalized state, and the fit's fidelity is checked.
SchmidtDecomposition decompose(const TwoParticleState& state, const ReducedDensity& rho,
                               double zero_tol = kDefaultZeroTol);

/// Same, with a caller-supplied eigensystem of `rho`.
SchmidtDecomposition decompose(const TwoParticleState& state, const ReducedDensity& rho,
                               const std::vector<Eigenpair>& eigensystem, double zero_tol = kDefaultZeroTol);

/// -sum lambda log2 lambda with 0 log 0 = 0.
double entropy_bits(std::span<const double> lambdas);

double entropy(const SchmidtDecomposition& sd);
std::size_t schmidt_number(const SchmidtDecomposition& sd);

/// The state rebuilt from its terms.
TwoParticleState reconstruct(const SchmidtDecomposition& sd, Statistics stats);

}  // namespace idsd
