#pragma once

#include <vector>

#include "idsd/trace.hpp"

namespace idsd::oracle {

/// Labeled first-quantization state: a unit vector over the ordered product
/// basis |k> (x) |l>, index k * d + l, exchange-symmetric up to eta.
struct LabeledState {
  BasisPtr basis;
  Statistics statistics = Statistics::boson();
  Eigen::VectorXcd vector;

  std::size_t dim() const noexcept { return basis->size(); }
};

/// (phi (x) psi + eta psi (x) phi) / norm.
LabeledState symmetrize(const Ket& phi, const Ket& psi, Statistics stats);

struct ProductTerm {
  cplx coefficient;
  Ket phi;
  Ket psi;
};

/// Normalized sum_t c_t (phi_t (x) psi_t + eta psi_t (x) phi_t).
LabeledState symmetrize(const std::vector<ProductTerm>& terms, Statistics stats);

/// Exchange defect: max |v[k,l] - eta v[l,k]|.
double exchange_defect(const LabeledState& s);

/// Trace over the second tensor factor.
Eigen::MatrixXcd oracle_reduce_global(const LabeledState& s);

/// sum_{b in S} (<b| (x) I)|s><s|(|b> (x) I), normalized.
Eigen::MatrixXcd oracle_reduce_local(const LabeledState& s, const LabelPredicate& subspace);

/// Eigenvalues of a Hermitian matrix, descending.
std::vector<double> spectrum(const Eigen::MatrixXcd& h);

/// Largest elementwise difference between two spectra after sorting
/// descending and zero-padding the shorter one.
double spectrum_deviation(std::vector<double> a, std::vector<double> b);

}  // namespace idsd::oracle
