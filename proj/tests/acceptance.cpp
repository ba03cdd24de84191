// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>

#include "idsd/cli/app.hpp"
#include "idsd/cli/dsl.hpp"
#include "idsd/cli/run.hpp"
#include "idsd/oracle.hpp"
#include "idsd/schmidt.hpp"
#include "test_support.hpp"

using namespace idsd;
namespace t = idsd::testing;

namespace {

constexpr double kTol = 1e-10;       // criteria 1-9 and the sweep endpoints
constexpr double kExactTol = 1e-12;  // alpha = 1 entropies

const Statistics kBoth[] = {Statistics::boson(), Statistics::fermion()};

// Worst deviation seen plus any boolean failures, for one criterion.
struct Tally {
  double worst = 0.0;
  double tol = kTol;
  std::string failure;

  void dev(double d, const std::string& what, double tolerance = -1) {
    const double tl = tolerance < 0 ? tol : tolerance;
    worst = std::max(worst, std::isfinite(d) ? d : INFINITY);
    if (!(d <= tl) && failure.empty()) {
      char buf[64];
      std::snprintf(buf, sizeof buf, " (%.3g > %.0e)", d, tl);
      failure = what + buf;
    }
  }
  void require(bool ok, const std::string& what) {
    if (!ok && failure.empty()) failure = what;
  }
};

double h2(double x) { return x > 0 ? -x * std::log2(x) : 0.0; }

std::vector<double> nonzero(const std::vector<double>& s) {
  std::vector<double> out;
  for (double l : s)
    if (l > kDefaultZeroTol) out.push_back(l);
  return out;
}

TwoParticleState bell(Statistics st, double alpha, double theta) {
  return t::bell_state(st, alpha, std::polar(std::sqrt(1 - alpha * alpha), theta));
}

// 1. Local trace on site L of alpha|L up,R dn> + beta|L dn,R up>.
void bell_local(Tally& c) {
  for (auto st : kBoth) {
    for (int k = 1; k <= 20; ++k) {
      const double a = k / 21.0, a2 = a * a, b2 = 1 - a2;
      auto psi = bell(st, a, 0.37 * k);
      auto rho = reduce_local(psi, observable_equals(0, "L"));
      auto sd = decompose(psi, rho);
      c.dev(oracle::spectrum_deviation(nonzero(sd.spectrum), {b2, a2}), "eigenvalues");
      c.dev(std::abs(sd.entropy - (-a2 * std::log2(a2) - b2 * std::log2(b2))), "entropy");
    }
  }
}

// 2. Global trace of the same state, and the alpha = 1 limit.
void bell_global(Tally& c) {
  for (auto st : kBoth) {
    for (int k = 1; k <= 20; ++k) {
      const double a = k / 21.0, a2 = a * a, b2 = 1 - a2;
      auto psi = bell(st, a, -0.21 * k);
      auto sd = decompose(psi, reduce_global(psi));
      c.dev(oracle::spectrum_deviation(sd.spectrum, {a2 / 2, a2 / 2, b2 / 2, b2 / 2}), "eigenvalues");
      c.dev(std::abs(sd.entropy - (-a2 * std::log2(a2 / 2) - b2 * std::log2(b2 / 2))), "entropy");
    }
    auto product = bell(st, 1.0, 0.0);
    auto g = decompose(product, reduce_global(product));
    auto l = decompose(product, reduce_local(product, observable_equals(0, "L")));
    c.dev(std::abs(g.entropy - 1.0), "S_global(alpha=1)", kExactTol);
    c.dev(std::abs(l.entropy), "S_local(alpha=1)", kExactTol);
  }
}

// 3. Local Schmidt pairs: |R up> with eta|L dn>, |R dn> with eta|L up>.
void local_pairing(Tally& c) {
  auto basis = t::site_spin_basis();
  auto unit = [&](const char* site, const char* spin) { return Ket::unit(basis, BasisLabel{site, spin}); };
  for (auto st : kBoth) {
    const double eta = st.eta();
    for (double a : {0.2, 0.6, 0.75, 0.95}) {
      for (double theta : {0.0, 1.3}) {
        const double b = std::sqrt(1 - a * a);
        auto psi = bell(st, a, theta);
        auto sd = decompose(psi, reduce_local(psi, observable_equals(0, "L")));
        c.require(sd.terms.size() == 2, "two Schmidt terms");
        c.dev(1 - sd.reconstruction_fidelity, "fidelity");
        for (const auto& term : sd.terms) {
          const bool up = (term.ket.amplitudes() - unit("R", "up").amplitudes()).norm() < kTol;
          const bool dn = (term.ket.amplitudes() - unit("R", "dn").amplitudes()).norm() < kTol;
          c.require(up || dn, "|i> is |R up> or |R dn>");
          // beta's phase rides on the partner; at theta = 0 it is exactly eta|L dn>.
          Ket want = up ? eta * std::polar(1.0, theta) * unit("L", "dn") : eta * unit("L", "up");
          c.dev((term.ket_tilde.amplitudes() - want.amplitudes()).norm(), "partner with eta");
          c.dev(std::abs(term.coefficient - cplx(up ? b : a)), "coefficient");
          c.dev(std::abs(braket(term.ket, term.ket_tilde)), "<i|i~> = 0");
        }
      }
    }
  }
}

const char* kQubitsText =
    "boson; basis up,dn; param theta=0, phi=0; cos(theta/2)*|up,up> + exp(i*phi)*sin(theta/2)*|up,dn>";

// 4. Boson qubits at one site over theta in [0, pi].
void boson_qubits(Tally& c) {
  auto spec = cli::parse_state(kQubitsText);
  for (double phi : {0.0, 0.9}) {
    cli::RunOptions opts;
    opts.params = {{"phi", phi}};
    auto table = cli::run_sweep(spec, "theta", cli::parse_range("0:pi:101"), opts, 1);
    c.require(table.rows.size() == 101, "101 grid points");
    c.dev(std::abs(table.rows.front().entropy), "S(0)");
    c.dev(std::abs(table.rows.back().entropy - 1.0), "S(pi)");
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
      const auto& row = table.rows[k];
      c.require(!row.flagged, "grid point flagged");
      c.require(row.oracle.status == cli::OracleCheck::Status::pass, "oracle check at every grid point");
      c.dev(row.oracle.max_deviation, "oracle deviation");
      if (k) c.require(row.entropy >= table.rows[k - 1].entropy, "entropy nondecreasing");
      const double th = row.value, n = 1 + std::pow(std::cos(th / 2), 2);
      c.dev(oracle::spectrum_deviation(row.spectrum, {std::pow(1 + std::cos(th / 2), 2) / (2 * n),
                                                      std::pow(1 - std::cos(th / 2), 2) / (2 * n)}),
            "unit-trace spectrum");
    }
  }
}

// 5. Qutrits cos(phi)|e1,e2> + sin(phi)|e1,e3>.
void qutrits(Tally& c) {
  auto basis = t::numbered_basis(3);
  auto e = [&](std::size_t i) { return Ket::unit(basis, i); };
  for (int k = 0; k < 50; ++k) {
    const double phi = 2 * std::numbers::pi * k / 49.0;
    auto psi = std::cos(phi) * wedge(e(0), e(1), Statistics::boson()) +
               std::sin(phi) * wedge(e(0), e(2), Statistics::boson());
    auto sd = decompose(psi, reduce_global(psi));
    c.dev(oracle::spectrum_deviation(sd.spectrum, {0.5, 0.5, 0.0}), "spectrum");
    c.dev(std::abs(sd.entropy - 1.0), "entropy");
    c.require(sd.schmidt_number == 2 && sd.terms.size() == 2, "s = 2");
    Ket u = std::cos(phi) * e(1) + std::sin(phi) * e(2);
    for (const auto& term : sd.terms) {
      const bool first = std::abs(braket(e(0), term.ket)) > 0.5;
      c.dev(std::abs(1 - std::abs(braket(first ? e(0) : u, term.ket))), "|i>");
      c.dev(std::abs(1 - std::abs(braket(first ? u : e(0), term.ket_tilde))), "|i~>");
      c.dev(std::abs(std::abs(term.coefficient) - 0.5), "coefficient 1/2");
    }
    c.dev(1 - sd.reconstruction_fidelity, "fidelity");
  }
}

// 6. Basis states |i,j>: orthogonal pairs maximally mixed, repeated boson ket pure.
void basis_states(Tally& c) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    auto basis = t::numbered_basis(2 + static_cast<std::size_t>(trial % 7));
    Ket i = t::random_ket(basis, rng);
    Ket j = t::random_ket(basis, rng);
    j = (j - braket(i, j) * i).normalized();
    for (auto st : kBoth) {
      auto psi = wedge(i, j, st);
      auto sd = decompose(psi, reduce_global(psi));
      c.dev(oracle::spectrum_deviation(sd.spectrum, {0.5, 0.5}), "orthogonal pair spectrum");
      c.require(sd.schmidt_number == 2, "orthogonal pair s = 2");
    }
    auto same = wedge(i, i, Statistics::boson());
    auto sd = decompose(same, reduce_global(same));
    c.dev(oracle::spectrum_deviation(sd.spectrum, {1.0}), "repeated ket spectrum");
    c.require(sd.schmidt_number == 1, "repeated ket s = 1");
  }
}

// 7. Partners are eigenvectors; fermion partners orthogonal with paired
// eigenvalues; nondegenerate boson partners equal their kets up to phase.
void partners(Tally& c) {
  std::mt19937_64 rng(7);
  for (auto st : kBoth) {
    for (int trial = 0; trial < 200; ++trial) {
      auto basis = t::numbered_basis(2 + static_cast<std::size_t>(trial % 7));
      auto psi = t::random_state(st, basis, rng, 1 + trial % 4).state.normalized();
      auto rho = reduce_global(psi);
      auto sd = decompose(psi, rho);
      bool nondegenerate = true;
      for (std::size_t k = 0; k + 1 < sd.terms.size(); ++k)
        if (sd.terms[k].lambda - sd.terms[k + 1].lambda < kDegeneracyTol) nondegenerate = false;
      for (const auto& term : sd.terms) {
        const auto& v = term.ket_tilde.amplitudes();
        c.dev((rho.matrix * v - term.lambda * v).norm(), "rho|i~> = lambda|i~>");
        if (st.is_fermion()) c.dev(std::abs(braket(term.ket, term.ket_tilde)), "fermion <i|i~> = 0");
        if (st.is_boson() && nondegenerate)
          c.dev(std::abs(1 - std::abs(braket(term.ket, term.ket_tilde))), "boson |<i|i~>| = 1");
      }
      if (st.is_fermion()) {
        auto nz = nonzero(sd.spectrum);
        std::size_t k = 0;
        while (k < nz.size()) {
          std::size_t m = k + 1;
          while (m < nz.size() && nz[k] - nz[m] < kDegeneracyTol) ++m;
          c.require((m - k) % 2 == 0, "fermion eigenvalue multiplicity even");
          k = m;
        }
      }
    }
  }
}

// 8. <i-bar|i'-bar> = 2 lambda_i delta_ii'.
void gram_identity(Tally& c) {
  std::mt19937_64 rng(8);
  for (auto st : kBoth) {
    for (int trial = 0; trial < 100; ++trial) {
      auto basis = t::numbered_basis(2 + static_cast<std::size_t>(trial % 7));
      auto psi = t::random_state(st, basis, rng, 1 + trial % 4).state.normalized();
      auto rho = reduce_global(psi);
      auto eig = eigendecompose(rho);
      std::vector<Ket> bars;
      for (const auto& ep : eig) bars.push_back(bar_vector(psi, ep.ket));
      for (std::size_t a = 0; a < eig.size(); ++a)
        for (std::size_t b = 0; b < eig.size(); ++b)
          c.dev(std::abs(braket(bars[a], bars[b]) - (a == b ? 2 * eig[a].lambda : 0.0)), "Gram matrix");
    }
  }
}

// 9. No-label spectra against the labeled first-quantization oracle.
void oracle_equivalence(Tally& c) {
  std::mt19937_64 rng(9);
  for (auto st : kBoth) {
    for (int trial = 0; trial < 500; ++trial) {
      const std::size_t d = 2 + static_cast<std::size_t>(trial % 5);
      auto basis = t::numbered_basis(d);
      auto r = t::random_state(st, basis, rng, 1 + trial % 3);
      auto labeled = oracle::symmetrize(r.terms, st);
      c.dev(oracle::spectrum_deviation(oracle::spectrum(reduce_global(r.state).matrix),
                                       oracle::spectrum(oracle::oracle_reduce_global(labeled))),
            "global spectrum");
      std::vector<BasisLabel> chosen;
      for (std::size_t i = 0; i < d; ++i)
        if ((rng() & 1u) || chosen.empty()) chosen.push_back((*basis)[i]);
      auto pred = label_prefix_set(chosen);
      c.dev(oracle::spectrum_deviation(oracle::spectrum(reduce_local(r.state, pred).matrix),
                                       oracle::spectrum(oracle::oracle_reduce_local(labeled, pred))),
            "local spectrum");
    }
  }
}

struct Run {
  int code;
  std::string out;
};

Run cli_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run_cli(args, out, err);
  return {code, out.str()};
}

// 10. check is green; the theta sweep CSV has 101 rows and exact endpoints;
// outputs repeat byte for byte.
void cli_outputs(Tally& c) {
  auto check = cli_run({"check"});
  c.require(check.code == 0, "check exit code");
  c.require(check.out.find("FAIL") == std::string::npos, "check fixtures green");

  std::vector<std::string> sweep{"sweep", "--state", kQubitsText, "--vary", "theta", "--range", "0:pi:101"};
  auto first = cli_run(sweep);
  c.require(first.code == 0, "sweep exit code");
  std::istringstream in(first.out);
  std::string header, line;
  std::getline(in, header);
  c.require(header == "param,entropy_bits,schmidt_number,lambda_1,lambda_2", "CSV header");
  std::vector<std::pair<double, double>> rows;
  while (std::getline(in, line)) {
    double p = NAN, s = NAN;
    std::sscanf(line.c_str(), "%lf,%lf", &p, &s);
    rows.emplace_back(p, s);
  }
  c.require(rows.size() == 101, "101 CSV rows");
  if (rows.size() == 101) {
    c.dev(std::abs(rows.front().first), "first param");
    c.dev(std::abs(rows.front().second), "S at theta = 0");
    c.dev(std::abs(rows.back().first - std::numbers::pi), "last param");
    c.dev(std::abs(rows.back().second - 1.0), "S at theta = pi");
  }

  auto threaded = sweep;
  threaded.insert(threaded.end(), {"--threads", "4"});
  c.require(cli_run(sweep).out == first.out, "sweep repeatable");
  c.require(cli_run(threaded).out == first.out, "sweep independent of threads");
  std::vector<std::string> dec{"decompose", "--state", kQubitsText, "--param", "theta=2", "--param", "phi=0.5"};
  c.require(cli_run(dec).out == cli_run(dec).out, "decompose JSON repeatable");
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Tally&)>>> criteria{
      {"Bell-like state, local trace on site L", bell_local},
      {"Bell-like state, global trace and alpha = 1", bell_global},
      {"local Schmidt pairing with eta", local_pairing},
      {"boson qubits theta sweep", boson_qubits},
      {"qutrits over 50 values of phi", qutrits},
      {"basis states |i,j>", basis_states},
      {"tilde partners, 200 random states per statistics", partners},
      {"Gram matrix of unnormalized partners", gram_identity},
      {"oracle equivalence, 500 random states per statistics", oracle_equivalence},
      {"CLI check, sweep and determinism", cli_outputs},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Tally tally;
    try {
      criteria[k].second(tally);
    } catch (const std::exception& e) {
      tally.failure = std::string("exception: ") + e.what();
    }
    const bool ok = tally.failure.empty();
    failed += ok ? 0 : 1;
    std::printf("%s %2zu  %-52s max dev %.2e%s%s\n", ok ? "PASS" : "FAIL", k + 1, criteria[k].first, tally.worst,
                ok ? "" : "  ", tally.failure.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
