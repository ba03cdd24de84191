#include <cmath>
#include <numbers>

#include "doctest.h"
#include "idsd/core.hpp"
#include "test_support.hpp"

using namespace idsd;
using idsd::testing::max_abs;

namespace {

const Statistics kBoth[] = {Statistics::boson(), Statistics::fermion()};

Eigen::VectorXcd kron(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  Eigen::VectorXcd out(a.size() * b.size());
  for (Eigen::Index k = 0; k < a.size(); ++k) out.segment(k * b.size(), b.size()) = a(k) * b;
  return out;
}

}  // namespace

TEST_CASE("wedge of orthogonal spins is antisymmetric for fermions") {
  auto b = testing::spin_basis();
  auto s = wedge(Ket::unit(b, 0), Ket::unit(b, 1), Statistics::fermion());
  CHECK(std::abs(s.coeffs()(0, 1)) > 0.0);
  CHECK(s.coeffs()(1, 0) == -s.coeffs()(0, 1));
  CHECK(s.coeffs()(0, 0) == cplx(0.0));
  CHECK(s.coeffs()(1, 1) == cplx(0.0));
}

TEST_CASE("Pauli exclusion: fermion wedge of a ket with itself vanishes") {
  auto b = testing::spin_basis();
  auto s = wedge(Ket::unit(b, 0), Ket::unit(b, 0), Statistics::fermion());
  CHECK(s.is_zero());
  CHECK(s.norm2() == 0.0);

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto basis = testing::numbered_basis(2 + trial % 7);
    Ket phi = testing::random_ket(basis, rng);
    CHECK(wedge(phi, phi, Statistics::fermion()).norm2() < 1e-24);
  }
}

TEST_CASE("boson pair with a rotated spin expands by linearity") {
  auto b = testing::spin_basis();
  const double theta = 1.1, phi = 0.4;
  Ket up = Ket::unit(b, 0);
  Ket dn = Ket::unit(b, 1);
  Ket up_u = std::cos(theta / 2) * up + std::polar(std::sin(theta / 2), phi) * dn;
  auto lhs = wedge(up, up_u, Statistics::boson());
  auto rhs = std::cos(theta / 2) * wedge(up, up, Statistics::boson()) +
             std::polar(std::sin(theta / 2), phi) * wedge(up, dn, Statistics::boson());
  CHECK(max_abs(lhs.coeffs() - rhs.coeffs()) < 1e-15);
  // Unnormalized: norm^2 = 1 + cos^2(theta/2).
  CHECK(lhs.norm2() == doctest::Approx(1.0 + std::pow(std::cos(theta / 2), 2)).epsilon(1e-14));
}

TEST_CASE("wedge rejects kets on different bases") {
  auto a = testing::spin_basis();
  auto b = testing::numbered_basis(2);
  try {
    wedge(Ket::unit(a, 0), Ket::unit(b, 1), Statistics::boson());
    FAIL("expected basis mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::basis_mismatch);
  }
}

TEST_CASE("inner2 reference values") {
  auto b = testing::spin_basis();
  Ket up = Ket::unit(b, 0), dn = Ket::unit(b, 1);
  for (auto st : kBoth) {
    auto s = wedge(up, dn, st);
    CHECK(inner2(s, s).real() == doctest::Approx(1.0).epsilon(1e-15));
    // |phi,psi> = eta |psi,phi>
    CHECK(std::abs(inner2(s, wedge(dn, up, st)) - static_cast<double>(st.eta()) * inner2(s, s)) < 1e-15);
  }
  auto bb = wedge(up, up, Statistics::boson());
  CHECK(inner2(bb, bb).real() == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("inner2 rejects mixed statistics") {
  auto b = testing::spin_basis();
  auto x = wedge(Ket::unit(b, 0), Ket::unit(b, 1), Statistics::boson());
  auto y = wedge(Ket::unit(b, 0), Ket::unit(b, 1), Statistics::fermion());
  CHECK_THROWS_AS(inner2(x, y), Error);
}

TEST_CASE("exchange symmetry and two-particle scalar product on random kets") {
  std::mt19937_64 rng(7);
  for (auto st : kBoth) {
    for (int trial = 0; trial < 50; ++trial) {
      auto basis = testing::numbered_basis(2 + trial % 7);
      auto r = testing::random_state(st, basis, rng);
      CHECK(max_abs(r.state.coeffs().transpose() - static_cast<double>(st.eta()) * r.state.coeffs()) == 0.0);
      if (st.is_fermion()) CHECK(r.state.coeffs().diagonal().cwiseAbs().maxCoeff() == 0.0);

      Ket a = testing::random_ket(basis, rng), bk = testing::random_ket(basis, rng);
      Ket c = testing::random_ket(basis, rng), dk = testing::random_ket(basis, rng);
      cplx expected = braket(a, c) * braket(bk, dk) + static_cast<double>(st.eta()) * braket(a, dk) * braket(bk, c);
      CHECK(std::abs(inner2(wedge(a, bk, st), wedge(c, dk, st)) - expected) < 1e-12);

      cplx n = inner2(r.state, r.state);
      CHECK(std::abs(n.imag()) < 1e-12);
      CHECK(n.real() >= 0.0);
      CHECK(std::abs(inner2(r.state, wedge(c, dk, st)) - std::conj(inner2(wedge(c, dk, st), r.state))) < 1e-12);
    }
  }
}

TEST_CASE("project1 reference values") {
  auto b = testing::spin_basis();
  Ket up = Ket::unit(b, 0), dn = Ket::unit(b, 1);
  auto boson = wedge(up, dn, Statistics::boson());
  CHECK(max_abs(project1(up, boson).amplitudes() - dn.amplitudes()) < 1e-15);

  auto fermion = wedge(up, dn, Statistics::fermion());
  CHECK(max_abs(project1(up, fermion).amplitudes() - dn.amplitudes()) < 1e-15);
  CHECK(max_abs(project1(dn, fermion).amplitudes() + up.amplitudes()) < 1e-15);
}

TEST_CASE("project1 on the Bell-like state matches the labeled-space projection") {
  const double alpha = 0.6;
  const cplx beta = std::polar(0.8, 0.3);
  auto basis = testing::site_spin_basis();
  Ket lu = Ket::unit(basis, {"L", "up"}), ld = Ket::unit(basis, {"L", "dn"});
  Ket ru = Ket::unit(basis, {"R", "up"}), rd = Ket::unit(basis, {"R", "dn"});
  for (auto st : kBoth) {
    auto psi = testing::bell_state(st, alpha, beta);
    Ket got = project1(lu, psi);
    CHECK(max_abs(got.amplitudes() - (alpha * rd).amplitudes()) < 1e-15);

    // Oracle: (<L up| (x) I) on the unnormalized labeled vector.
    const double eta = st.eta();
    Eigen::VectorXcd v = alpha * (kron(lu.amplitudes(), rd.amplitudes()) + eta * kron(rd.amplitudes(), lu.amplitudes())) +
                         beta * (kron(ld.amplitudes(), ru.amplitudes()) + eta * kron(ru.amplitudes(), ld.amplitudes()));
    for (std::size_t k = 0; k < 4; ++k) {
      Eigen::VectorXcd expected = v.segment(static_cast<Eigen::Index>(k * 4), 4);
      CHECK(max_abs(project1(Ket::unit(basis, k), psi).amplitudes() - expected) < 1e-15);
    }
  }
}

TEST_CASE("project1 factorizes the two-particle scalar product") {
  std::mt19937_64 rng(21);
  for (auto st : kBoth) {
    for (int trial = 0; trial < 50; ++trial) {
      auto basis = testing::numbered_basis(2 + trial % 7);
      auto r = testing::random_state(st, basis, rng);
      Ket k = testing::random_ket(basis, rng), m = testing::random_ket(basis, rng);
      CHECK(std::abs(inner2(wedge(k, m, st), r.state) - braket(m, project1(k, r.state))) < 1e-12);
    }
  }
}

TEST_CASE("project1 is antilinear in the bra and linear in the state") {
  std::mt19937_64 rng(5);
  auto basis = testing::numbered_basis(4);
  auto r = testing::random_state(Statistics::fermion(), basis, rng);
  Ket k = testing::random_ket(basis, rng);
  cplx s(0.3, -1.2);
  CHECK(max_abs(project1(s * k, r.state).amplitudes() - std::conj(s) * project1(k, r.state).amplitudes()) < 1e-13);
  CHECK(max_abs(project1(k, s * r.state).amplitudes() - s * project1(k, r.state).amplitudes()) < 1e-13);
}

TEST_CASE("partial projection on a single spin token") {
  auto basis = testing::site_spin_basis();
  for (auto st : kBoth) {
    CAPTURE(st.name());
    auto psi = TwoParticleState::basis_pair(st, basis, {"L", "up"}, {"R", "dn"});
    SUBCASE("<dn| on |L up, R dn> leaves |L> x |R dn>") {
      auto pp = project1_partial(BasisLabel{"dn"}, psi);
      REQUIRE(pp.a_values == std::vector<std::string>{"L", "R"});
      Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(2, 4);
      expected(1, 0) = static_cast<double>(st.eta());  // |R> x |L up>: measured particle was R dn
      CHECK(max_abs(pp.amp - expected) < 1e-15);
    }
    SUBCASE("<up| on |L up, R dn> is a single unsigned term") {
      auto pp = project1_partial(BasisLabel{"up"}, psi);
      Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(2, 4);
      expected(0, 3) = 1.0;  // |L> x |R dn>
      CHECK(max_abs(pp.amp - expected) < 1e-15);
    }
  }
}

TEST_CASE("partial projection with both spins matching has two terms") {
  auto basis = testing::site_spin_basis();
  for (auto st : kBoth) {
    auto psi = TwoParticleState::basis_pair(st, basis, {"L", "up"}, {"R", "up"});
    auto pp = project1_partial(BasisLabel{"up"}, psi);
    Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(2, 4);
    expected(0, 2) = 1.0;                              // |L> x |R up>
    expected(1, 0) = static_cast<double>(st.eta());    // eta |L up> x |R>
    CHECK(max_abs(pp.amp - expected) < 1e-15);
    // <a| on the measured slot reproduces the full projection <a b|Psi>.
    CHECK(max_abs(pp.at("L").amplitudes() - project1(Ket::unit(basis, {"L", "up"}), psi).amplitudes()) < 1e-15);
    CHECK(max_abs(pp.at("R").amplitudes() - project1(Ket::unit(basis, {"R", "up"}), psi).amplitudes()) < 1e-15);
  }
}

TEST_CASE("partial projection needs composite labels") {
  auto b = testing::spin_basis();
  auto psi = wedge(Ket::unit(b, 0), Ket::unit(b, 1), Statistics::boson());
  try {
    project1_partial(BasisLabel{"up"}, psi);
    FAIL("expected unsupported basis");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::unsupported_basis);
  }
}

TEST_CASE("change of basis preserves the scalar product") {
  std::mt19937_64 rng(3);
  const double phi = 0.7;
  auto basis = testing::numbered_basis(3);
  // Qutrit state cos(phi)|e1,e2> + sin(phi)|e1,e3> is |e1, phi> in a rotated basis.
  auto e = [&](std::size_t i) { return Ket::unit(basis, i); };
  for (auto st : kBoth) {
    auto psi = std::cos(phi) * wedge(e(0), e(1), st) + std::sin(phi) * wedge(e(0), e(2), st);
    auto rotated_basis = Basis::simple({"f1", "f2", "f3"});
    // f1 = cos e2 + sin e3, f2 = e1, f3 = -sin e2 + cos e3; columns: old vectors in new components.
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(3, 3);
    u(1, 0) = 1.0;
    u(0, 1) = std::cos(phi);
    u(2, 1) = -std::sin(phi);
    u(0, 2) = std::sin(phi);
    u(2, 2) = std::cos(phi);
    auto moved = psi.in_basis(rotated_basis, u);
    auto expected = TwoParticleState::basis_pair(st, rotated_basis, {"f2"}, {"f1"});
    CHECK(max_abs(moved.coeffs() - expected.coeffs()) < 1e-15);
    CHECK(moved.norm2() == doctest::Approx(psi.norm2()).epsilon(1e-14));
  }
}

TEST_CASE("basis validation") {
  CHECK_THROWS_AS(Basis({{"a"}, {"a"}}), Error);
  CHECK_THROWS_AS(Basis({{"L", "up"}, {"up"}}), Error);
  CHECK_THROWS_AS(Basis(std::vector<BasisLabel>{}), Error);
  auto b = testing::site_spin_basis();
  CHECK(b->values_of(0) == std::vector<std::string>{"L", "R"});
  CHECK(b->values_of(1) == std::vector<std::string>{"up", "dn"});
  CHECK(parse_label("L:up") == BasisLabel{"L", "up"});
  CHECK(BasisLabel({"R", "dn"}).str() == "R:dn");
}
