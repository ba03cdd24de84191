#include "idsd/cli/fixtures.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>

#include "idsd/cli/run.hpp"

namespace idsd::cli {

namespace {

using std::numbers::pi;

// Collects the first failed expectation of a fixture.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failure_.empty()) failure_ = what;
  }
  void near(double got, double want, const std::string& what, double tol = kFixtureTol) {
    if (std::abs(got - want) <= tol) return;
    char buf[160];
    std::snprintf(buf, sizeof buf, ": got %.15g, want %.15g", got, want);
    expect(false, what + buf);
  }
  void spectrum(const std::vector<double>& got, const std::vector<double>& want, const std::string& what) {
    expect(got.size() == want.size(), what + ": spectrum size");
    for (std::size_t i = 0; i < std::min(got.size(), want.size()); ++i)
      near(got[i], want[i], what + ": lambda_" + std::to_string(i + 1));
  }
  const std::string& failure() const { return failure_; }

 private:
  std::string failure_;
};

const char* kBellLike =
    "basis L:up, L:dn, R:up, R:dn;\n"
    "param a = 0.6, t = 0;\n"
    "a*|L:up,R:dn> + sqrt(1 - a^2)*exp(i*t)*|L:dn,R:up>";

const char* kBosonQubits =
    "boson; basis up, dn;\n"
    "param theta = pi/2, phi = 0;\n"
    "cos(theta/2)*|up,up> + exp(i*phi)*sin(theta/2)*|up,dn>";

const char* kQutrits =
    "boson; basis e1, e2, e3;\n"
    "param phi = 0.3;\n"
    "cos(phi)*|e1,e2> + sin(phi)*|e1,e3>";

StateSpec bell_like(Statistics st) { return parse_state(std::string(st.name()) + "; " + kBellLike); }

ResultRecord run(const StateSpec& spec, const std::string& trace, ParamMap params = {}) {
  RunOptions opts;
  opts.trace = parse_trace_mode(trace);
  opts.params = std::move(params);
  return run_decompose(spec, opts);
}

double binary_entropy(double p) {
  auto h = [](double x) { return x > 0 ? -x * std::log2(x) : 0.0; };
  return h(p) + h(1 - p);
}

// Amplitude vector of a normalized combination of basis labels.
Ket ket_of(const BasisPtr& basis, std::initializer_list<std::pair<BasisLabel, cplx>> parts) {
  Ket k(basis);
  for (const auto& [label, amp] : parts) k += amp * Ket::unit(basis, label);
  return k;
}

// |<a|b>| for unit kets; 1 means equal up to a phase.
double overlap(const Ket& a, const Ket& b) { return std::abs(braket(a, b)); }

double distance(const Ket& a, const Ket& b) { return (a.amplitudes() - b.amplitudes()).norm(); }

void common(Checker& c, const ResultRecord& r, const std::string& tag) {
  c.expect(r.oracle.status != OracleCheck::Status::fail, tag + ": oracle check failed");
  c.expect(r.sd.reconstruction_fidelity >= 1 - kFixtureTol, tag + ": reconstruction fidelity");
}

struct Fixture {
  std::string name;
  std::function<void(Checker&)> body;
};

std::vector<Fixture> fixtures() {
  std::vector<Fixture> out;

  for (Statistics st : {Statistics::boson(), Statistics::fermion()}) {
    const double eta = st.eta();
    const std::string s = st.name();

    // Local trace on site L pairs the spin at R with eta times the opposite spin at L.
    out.push_back({"bell_like_local_pairing_" + s, [st, eta](Checker& c) {
                     auto spec = bell_like(st);
                     auto r = run(spec, "local:L");
                     auto basis = make_basis(spec);
                     common(c, r, "local");
                     c.spectrum(r.sd.spectrum, {0.64, 0.36, 0.0, 0.0}, "local");
                     c.near(r.sd.entropy, binary_entropy(0.36), "entropy");
                     c.expect(r.sd.schmidt_number == 2, "schmidt number");
                     if (r.sd.terms.size() != 2) return c.expect(false, "two terms");
                     const auto& t1 = r.sd.terms[0];
                     const auto& t2 = r.sd.terms[1];
                     c.near(distance(t1.ket, Ket::unit(basis, {"R", "up"})), 0, "|1> = |R up>");
                     c.near(distance(t1.ket_tilde, eta * Ket::unit(basis, {"L", "dn"})), 0, "|1~> = eta |L dn>");
                     c.near(distance(t2.ket, Ket::unit(basis, {"R", "dn"})), 0, "|2> = |R dn>");
                     c.near(distance(t2.ket_tilde, eta * Ket::unit(basis, {"L", "up"})), 0, "|2~> = eta |L up>");
                     c.near(std::abs(t1.coefficient - cplx(0.8)), 0, "coefficient |beta|");
                     c.near(std::abs(t2.coefficient - cplx(0.6)), 0, "coefficient alpha");
                     c.near(std::abs(braket(t1.ket, t1.ket_tilde)) + std::abs(braket(t2.ket, t2.ket_tilde)), 0,
                            "<i|i~> = 0");
                   }});

    out.push_back({"bell_like_local_complex_beta_" + s, [st](Checker& c) {
                     for (double a : {0.1, 0.45, std::numbers::sqrt2 / 2, 0.93}) {
                       auto r = run(bell_like(st), "local:L", {{"a", a}, {"t", 1.1}});
                       common(c, r, "local");
                       const double b2 = 1 - a * a;
                       c.spectrum(r.sd.spectrum, {std::max(a * a, b2), std::min(a * a, b2), 0.0, 0.0}, "local");
                       c.near(r.sd.entropy, -a * a * std::log2(a * a) - b2 * std::log2(b2), "local entropy");
                     }
                   }});

    // Global trace: four eigenvalues alpha^2/2, |beta|^2/2 and a 1/sqrt2 prefactor.
    out.push_back({"bell_like_global_" + s, [st](Checker& c) {
                     const double a = 0.6, a2 = a * a, b2 = 1 - a2;
                     auto r = run(bell_like(st), "global", {{"a", a}, {"t", -0.4}});
                     common(c, r, "global");
                     c.spectrum(r.sd.spectrum, {b2 / 2, b2 / 2, a2 / 2, a2 / 2}, "global");
                     c.near(r.sd.entropy, -a2 * std::log2(a2 / 2) - b2 * std::log2(b2 / 2), "global entropy");
                     c.near(std::abs(r.sd.prefactor), 1 / std::numbers::sqrt2, "|prefactor|");
                     c.expect(r.sd.schmidt_number == 4, "schmidt number 4");
                     if (r.sd.terms.size() != 4) return c.expect(false, "four terms");
                     const double want[] = {0.4, 0.4, 0.3, 0.3};
                     for (std::size_t i = 0; i < 4; ++i)
                       c.near(std::abs(r.sd.terms[i].coefficient), want[i], "|coefficient " + std::to_string(i + 1) + "|");
                   }});

    // Global trace pairs each site-spin ket with the opposite spin at the other site.
    out.push_back({"bell_like_global_pairing_" + s, [st](Checker& c) {
                     auto spec = bell_like(st);
                     auto basis = make_basis(spec);
                     auto r = run(spec, "global");
                     common(c, r, "global");
                     auto partner = [&](const BasisLabel& l) -> BasisLabel {
                       return {l.parts[0] == "L" ? "R" : "L", l.parts[1] == "up" ? "dn" : "up"};
                     };
                     for (const auto& t : r.sd.terms) {
                       auto i = basis->labels()[t.ket.dominant_index()];
                       c.near(overlap(t.ket, Ket::unit(basis, i)), 1, "|i> is a basis ket");
                       c.near(overlap(t.ket_tilde, Ket::unit(basis, partner(i))), 1, "|i~> of " + i.str());
                     }
                   }});

    // alpha = 1: the product |L up, R dn> has global entropy 1 and local entropy 0.
    out.push_back({"bell_like_alpha_one_" + s, [st](Checker& c) {
                     auto spec = bell_like(st);
                     auto g = run(spec, "global", {{"a", 1.0}});
                     auto l = run(spec, "local:L", {{"a", 1.0}});
                     common(c, g, "global");
                     common(c, l, "local");
                     c.near(g.sd.entropy, 1.0, "S global", 1e-12);
                     c.near(l.sd.entropy, 0.0, "S local", 1e-12);
                     c.expect(l.sd.schmidt_number == 1, "local schmidt number 1");
                   }});

    // Fixed site L, summed over spin: the nonoverlapping sites reproduce the local trace.
    out.push_back({"fixed_site_bell_like_" + s, [st](Checker& c) {
                     auto spec = bell_like(st);
                     auto r = run(spec, "fixed:A=L", {{"t", 0.9}});
                     common(c, r, "fixed");
                     c.expect(r.oracle.status == OracleCheck::Status::pass, "oracle compared");
                     c.expect(!r.overlapping, "no overlap");
                     c.spectrum(r.sd.spectrum, {0.64, 0.36}, "fixed");
                     c.near(r.sd.entropy, binary_entropy(0.36), "entropy");
                   }});

    // Orthogonal basis states |i,j> are maximally entangled for either statistics.
    out.push_back({"basis_state_orthogonal_" + s, [st](Checker& c) {
                     auto r = run(parse_state(std::string(st.name()) + "; basis e1,e2,e3,e4; |e2,e4>"), "global");
                     common(c, r, "global");
                     c.spectrum(r.sd.spectrum, {0.5, 0.5, 0.0, 0.0}, "global");
                     c.near(r.sd.entropy, 1.0, "entropy");
                     c.expect(r.sd.schmidt_number == 2, "schmidt number 2");
                   }});

    // Partners of a global trace are eigenvectors of the same density; fermion partners are orthogonal.
    out.push_back({"partner_structure_" + s, [st](Checker& c) {
                     std::string text = std::string(st.name()) + "; basis e1,e2,e3; (0.3+0.2i)*|e1,e2> + 0.7*|e2,e3> - 0.5i*|e1,e3>";
                     if (st.is_boson()) text += " + 0.4*|e2,e2> + 0.2*|e3,e3>";
                     auto spec = parse_state(text);
                     auto state = build_state(spec).normalized();
                     auto rho = reduce_global(state);
                     auto sd = decompose(state, rho);
                     c.expect(sd.reconstruction_fidelity >= 1 - kFixtureTol, "fidelity");
                     for (const auto& t : sd.terms) {
                       Eigen::VectorXcd lhs = rho.matrix * t.ket_tilde.amplitudes();
                       c.near((lhs - t.lambda * t.ket_tilde.amplitudes()).norm(), 0, "rho |i~> = lambda |i~>");
                       if (st.is_fermion()) c.near(overlap(t.ket, t.ket_tilde), 0, "<i|i~> = 0");
                     }
                   }});
  }

  // A repeated single-particle state is a pure reduced density for bosons.
  out.push_back({"basis_state_repeated_boson", [](Checker& c) {
                   auto r = run(parse_state("boson; basis e1,e2,e3; |e3,e3>"), "global");
                   common(c, r, "global");
                   c.spectrum(r.sd.spectrum, {1.0, 0.0, 0.0}, "global");
                   c.near(r.sd.entropy, 0.0, "entropy");
                   c.expect(r.sd.schmidt_number == 1, "schmidt number 1");
                 }});

  // Two fermions at the same site with opposite spins.
  out.push_back({"fixed_site_same_site_fermions", [](Checker& c) {
                   auto r = run(parse_state("fermion; basis L:up,L:dn,R:up,R:dn; |L:up,L:dn>"), "fixed:L");
                   common(c, r, "fixed");
                   c.spectrum(r.sd.spectrum, {0.5, 0.5}, "fixed");
                   c.near(r.sd.entropy, 1.0, "entropy");
                 }});

  // Boson qubits at one site: closed-form density, spectrum and Schmidt kets.
  out.push_back({"boson_qubits_density", [](Checker& c) {
                   auto spec = parse_state(kBosonQubits);
                   for (double theta : {0.3, pi / 2, 2.5}) {
                     for (double phi : {0.0, 0.8}) {
                       auto state = build_state(spec, {{"theta", theta}, {"phi", phi}}).normalized();
                       auto rho = reduce_global(state);
                       const double n = 1 + std::pow(std::cos(theta / 2), 2);
                       const double a = 4 * std::pow(std::cos(theta / 2), 2) + std::pow(std::sin(theta / 2), 2);
                       const double b = std::pow(std::sin(theta / 2), 2);
                       const cplx off = std::polar(std::sin(theta), -phi);
                       c.near(rho.matrix(0, 0).real(), a / (2 * n), "rho(up,up)");
                       c.near(rho.matrix(1, 1).real(), b / (2 * n), "rho(dn,dn)");
                       c.near(std::abs(rho.matrix(0, 1) - off / (2 * n)), 0, "rho(up,dn)");
                     }
                   }
                 }});

  out.push_back({"boson_qubits_half_angle", [](Checker& c) {
                   auto spec = parse_state(kBosonQubits);
                   auto basis = make_basis(spec);
                   const double theta = pi / 2;
                   auto r = run(spec, "global");
                   common(c, r, "global");
                   const double n = 1 + std::pow(std::cos(theta / 2), 2);
                   const double l1 = 2 * std::pow(std::cos(theta / 4), 4) / n;
                   const double l2 = 2 * std::pow(std::sin(theta / 4), 4) / n;
                   c.spectrum(r.sd.spectrum, {l1, l2}, "global");
                   c.near(l1 + l2, 1.0, "unit trace");
                   c.near(r.sd.entropy, -l1 * std::log2(l1) - l2 * std::log2(l2), "entropy");
                   c.near(r.sd.entropy, 0.1874, "entropy near 0.1874", 2e-4);
                   if (r.sd.terms.size() != 2) return c.expect(false, "two terms");
                   Ket k1 = ket_of(basis, {{BasisLabel{"up"}, std::cos(theta / 4)}, {BasisLabel{"dn"}, std::sin(theta / 4)}});
                   Ket k2 = ket_of(basis, {{BasisLabel{"up"}, -std::sin(theta / 4)}, {BasisLabel{"dn"}, std::cos(theta / 4)}});
                   c.near(overlap(r.sd.terms[0].ket, k1), 1, "|1>");
                   c.near(overlap(r.sd.terms[1].ket, k2), 1, "|2>");
                   for (const auto& t : r.sd.terms) c.near(overlap(t.ket, t.ket_tilde), 1, "|i~> = |i> up to phase");
                   c.near(std::abs(r.sd.prefactor), 1 / std::numbers::sqrt2, "|prefactor|");
                 }});

  out.push_back({"boson_qubits_endpoints", [](Checker& c) {
                   auto spec = parse_state(kBosonQubits);
                   auto same = run(spec, "global", {{"theta", 0.0}});
                   auto opposite = run(spec, "global", {{"theta", pi}, {"phi", 1.3}});
                   common(c, same, "theta=0");
                   common(c, opposite, "theta=pi");
                   c.near(same.sd.entropy, 0.0, "S(0)");
                   c.expect(same.sd.schmidt_number == 1, "s(0) = 1");
                   c.near(opposite.sd.entropy, 1.0, "S(pi)");
                   c.expect(opposite.sd.schmidt_number == 2, "s(pi) = 2");
                 }});

  // Qutrits: |e1, cos phi e2 + sin phi e3> is maximally entangled for every phi.
  out.push_back({"qutrits", [](Checker& c) {
                   auto spec = parse_state(kQutrits);
                   auto basis = make_basis(spec);
                   for (double phi : {0.0, 0.3, 1.2, pi / 2, 4.0}) {
                     auto r = run(spec, "global", {{"phi", phi}});
                     common(c, r, "global");
                     c.spectrum(r.sd.spectrum, {0.5, 0.5, 0.0}, "global");
                     c.near(r.sd.entropy, 1.0, "entropy");
                     c.expect(r.sd.schmidt_number == 2, "schmidt number 2");
                     if (r.sd.terms.size() != 2) return c.expect(false, "two terms");
                     Ket e1 = Ket::unit(basis, 0);
                     Ket u = ket_of(basis, {{BasisLabel{"e2"}, std::cos(phi)}, {BasisLabel{"e3"}, std::sin(phi)}});
                     for (const auto& t : r.sd.terms) {
                       c.near(std::abs(t.coefficient), 0.5, "|coefficient|");
                       const bool is_e1 = overlap(t.ket, e1) > 0.5;
                       c.near(overlap(t.ket, is_e1 ? e1 : u), 1, "|i>");
                       c.near(overlap(t.ket_tilde, is_e1 ? u : e1), 1, "|i~>");
                     }
                     c.near(std::abs(r.sd.prefactor), 1 / std::numbers::sqrt2, "|prefactor|");
                   }
                 }});

  return out;
}

}  // namespace

std::vector<FixtureResult> run_fixtures() {
  std::vector<FixtureResult> results;
  for (const auto& f : fixtures()) {
    FixtureResult r;
    r.name = f.name;
    try {
      Checker c;
      f.body(c);
      r.passed = c.failure().empty();
      r.detail = c.failure();
    } catch (const std::exception& e) {
      r.detail = e.what();
    }
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace idsd::cli
