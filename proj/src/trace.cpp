#include "idsd/trace.hpp"

#include <algorithm>
#include <map>

#include <Eigen/Eigenvalues>

namespace idsd {

namespace {

constexpr double kSupportTol = 1e-12;

ReducedDensity finish(BasisPtr basis, const Eigen::MatrixXcd& raw, TraceKind kind, std::string description,
                      ErrorCode zero_code, const char* zero_msg) {
  double tr = raw.trace().real();
  if (!(tr >= kSupportTol)) throw Error(zero_code, zero_msg);
  ReducedDensity rho;
  rho.basis = std::move(basis);
  // Exact Hermitian symmetrization removes rounding asymmetry.
  rho.matrix = 0.5 * (raw + raw.adjoint()) / tr;
  rho.kind = kind;
  rho.description = std::move(description);
  rho.raw_trace = tr;
  rho.embedding = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(rho.basis->size()),
                                             static_cast<Eigen::Index>(rho.basis->size()));
  return rho;
}

}  // namespace

LabelPredicate label_prefix_set(std::vector<BasisLabel> items) {
  return [items = std::move(items)](const BasisLabel& l) {
    for (const auto& it : items) {
      if (it.arity() == 0 || it.arity() > l.arity()) continue;
      if (std::equal(it.parts.begin(), it.parts.end(), l.parts.begin())) return true;
    }
    return false;
  };
}

LabelPredicate observable_equals(std::size_t part, std::string value) {
  return [part, value = std::move(value)](const BasisLabel& l) {
    return part < l.arity() && l.parts[part] == value;
  };
}

std::string to_string(TraceKind kind) {
  switch (kind) {
    case TraceKind::global: return "global";
    case TraceKind::local: return "local";
    case TraceKind::fixed_observable: return "fixed";
  }
  return "unknown";
}

Ket ReducedDensity::embed(const Ket& k, const BasisPtr& full_basis) const {
  if (!same_basis(k.basis(), basis)) throw Error(ErrorCode::basis_mismatch, "ket is not on the reduced basis");
  if (static_cast<std::size_t>(embedding.rows()) != full_basis->size())
    throw Error(ErrorCode::basis_mismatch, "embedding does not target this basis");
  return Ket(full_basis, embedding * k.amplitudes());
}

void ReducedDensity::validate(double herm_tol, double psd_tol, double trace_tol) const {
  if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > herm_tol)
    throw Error(ErrorCode::verification_failure, "reduced density is not Hermitian");
  if (std::abs(matrix.trace() - cplx(1.0)) > trace_tol)
    throw Error(ErrorCode::verification_failure, "reduced density does not have unit trace");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -psd_tol)
    throw Error(ErrorCode::verification_failure, "reduced density has a negative eigenvalue");
}

ReducedDensity reduce_global(const TwoParticleState& state) {
  const auto d = static_cast<Eigen::Index>(state.dim());
  Eigen::MatrixXcd raw = Eigen::MatrixXcd::Zero(d, d);
  for (std::size_t j = 0; j < state.dim(); ++j) {
    Ket v = project1(Ket::unit(state.basis(), j), state);
    raw += 0.5 * v.amplitudes() * v.amplitudes().adjoint();
  }
  return finish(state.basis(), raw, TraceKind::global, "global", ErrorCode::degenerate_state,
                "global trace of a zero-norm state");
}

ReducedDensity reduce_local(const TwoParticleState& state, const LabelPredicate& subspace, std::string description) {
  const auto d = static_cast<Eigen::Index>(state.dim());
  Eigen::MatrixXcd raw = Eigen::MatrixXcd::Zero(d, d);
  std::size_t selected = 0;
  for (std::size_t j = 0; j < state.dim(); ++j) {
    if (!subspace((*state.basis())[j])) continue;
    ++selected;
    Ket v = project1(Ket::unit(state.basis(), j), state);
    raw += v.amplitudes() * v.amplitudes().adjoint();
  }
  if (selected == 0) throw Error(ErrorCode::invalid_argument, "local trace subspace selects no basis label");
  return finish(state.basis(), raw, TraceKind::local, std::move(description), ErrorCode::no_support,
                "state has no support on the local subspace");
}

ReducedDensity reduce_fixed_observable(const TwoParticleState& state, const std::string& a_value,
                                       std::size_t fixed_part) {
  const Basis& basis = *state.basis();
  if (!basis.composite())
    throw Error(ErrorCode::unsupported_basis, "fixed-observable trace needs composite basis labels");
  if (fixed_part >= basis.arity())
    throw Error(ErrorCode::unsupported_basis, "no observable part " + std::to_string(fixed_part));
  auto a_values = basis.values_of(fixed_part);
  if (std::find(a_values.begin(), a_values.end(), a_value) == a_values.end())
    throw Error(ErrorCode::invalid_argument, "'" + a_value + "' is not a value of observable " +
                                                 std::to_string(fixed_part));

  // Remaining-observable labels, in first-seen order.
  std::vector<BasisLabel> b_labels;
  for (const auto& l : basis.labels()) {
    auto b = drop_part(l, fixed_part);
    if (std::find(b_labels.begin(), b_labels.end(), b) == b_labels.end()) b_labels.push_back(b);
  }

  // Sum over b of <a b|Psi><Psi|a b>, built from the partial projection <b|Psi>
  // followed by <a| on the measured particle's remaining slot.
  const auto d = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& b : b_labels) {
    Ket v = project1_partial(b, state, fixed_part).at(a_value);
    full += v.amplitudes() * v.amplitudes().adjoint();
  }
  double tr = full.trace().real();
  if (!(tr >= kSupportTol))
    throw Error(ErrorCode::no_support, "state has no support at " + a_value);

  // Trace out the fixed observable of the unmeasured particle.
  auto b_index = [&](std::size_t i) {
    auto b = drop_part(basis[i], fixed_part);
    return static_cast<Eigen::Index>(std::find(b_labels.begin(), b_labels.end(), b) - b_labels.begin());
  };
  const auto nb = static_cast<Eigen::Index>(b_labels.size());
  Eigen::MatrixXcd reduced = Eigen::MatrixXcd::Zero(nb, nb);
  std::map<std::string, double> block_weight;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    block_weight[basis[i].parts[fixed_part]] += full(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
    for (std::size_t k = 0; k < basis.size(); ++k) {
      if (basis[i].parts[fixed_part] != basis[k].parts[fixed_part]) continue;
      reduced(b_index(i), b_index(k)) += full(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
    }
  }

  std::string dominant;
  double dominant_w = -1.0;
  int occupied = 0;
  for (const auto& v : a_values) {
    double w = block_weight[v];
    if (w > kSupportTol * tr) ++occupied;
    if (w > dominant_w * (1.0 + 1e-9)) {
      dominant_w = w;
      dominant = v;
    }
  }

  ReducedDensity rho = finish(Basis::make(b_labels), reduced, TraceKind::fixed_observable,
                              "fixed:" + std::to_string(fixed_part) + "=" + a_value, ErrorCode::no_support,
                              "state has no support at the fixed observable value");
  rho.overlapping = occupied > 1;
  rho.embedding = Eigen::MatrixXcd::Zero(d, nb);
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (basis[i].parts[fixed_part] == dominant) rho.embedding(static_cast<Eigen::Index>(i), b_index(i)) = 1.0;
  return rho;
}

}  // namespace idsd
