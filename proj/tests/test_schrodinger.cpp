#include "geogap/schrodinger.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>
#include <vector>

#include "geogap/pchip.hpp"
#include "geogap/potential.hpp"
#include "testutil.hpp"

using geogap::Complex;
using geogap::Lattice;
using geogap::potential::Potential;
using geogap::schrodinger::BakerAkhiezerG1;
using geogap::schrodinger::BasisValues;
using geogap::schrodinger::SolutionBasis;
using geogap::schrodinger::WaveState;

namespace {

// The standard one-gap demonstration lattice used across the suite.
Lattice demo_lattice() { return Lattice::from_invariants(4.0, -1.0); }

}  // namespace

// --- interpolation ------------------------------------------------------------

TEST_CASE("pchip reproduces nodes, lines, and stays monotone") {
  std::vector<double> x{0.0, 0.5, 1.2, 2.0, 3.5, 4.0};
  std::vector<double> lin;
  for (double xi : x) lin.push_back(3.0 * xi - 1.0);
  geogap::interp::Pchip line(x, lin);
  testutil::Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    const double t = rng.uniform(0.0, 4.0);
    CHECK(std::abs(line.value(t) - (3.0 * t - 1.0)) < 1e-13);
    CHECK(std::abs(line.deriv(t) - 3.0) < 1e-12);
  }

  // Monotone data stays monotone between nodes.
  std::vector<double> mono{0.0, 0.1, 0.15, 2.0, 2.2, 5.0};
  geogap::interp::Pchip m(x, mono);
  double prev = m.value(0.0);
  for (int i = 1; i <= 400; ++i) {
    const double cur = m.value(4.0 * i / 400.0);
    CHECK(cur >= prev - 1e-14);
    prev = cur;
  }
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(m.value(x[i]) == Catch::Approx(mono[i]).margin(1e-15));

  CHECK_THROWS_AS(m.value(-0.1), geogap::OutOfDomain);
  CHECK_THROWS_AS(m.value(4.1), geogap::OutOfDomain);
}

TEST_CASE("pchip derivatives agree with finite differences of itself") {
  std::vector<double> x, y;
  for (int i = 0; i <= 20; ++i) {
    x.push_back(0.3 * i);
    y.push_back(std::sin(0.4 * x.back()) + 0.1 * x.back());
  }
  geogap::interp::Pchip p(x, y);
  testutil::Rng rng(12);
  for (int i = 0; i < 30; ++i) {
    const double t = rng.uniform(0.5, 5.5);
    const auto f = [&](double s) { return p.value(s); };
    const auto fd = [&](double s) { return p.deriv(s); };
    // Stay inside one cubic piece so the stencil sees a smooth function.
    const double h = 1e-4;
    CHECK(std::abs(testutil::d1(f, t, h) - p.deriv(t)) < 1e-8);
    CHECK(std::abs(testutil::d1(fd, t, h) - p.deriv2(t)) < 1e-6);
  }
}

// --- potentials ----------------------------------------------------------------

TEST_CASE("rational potential: closed form and pole handling") {
  const Potential u = Potential::rational_cusp(-1.0);  // pole at x = 1
  const auto v = u.values(3.0);
  CHECK(v.u == Catch::Approx(2.0 / 4.0));
  CHECK(v.du == Catch::Approx(-4.0 / 8.0));
  CHECK(v.ddu == Catch::Approx(12.0 / 16.0));
  CHECK_THROWS_AS(u.values(1.0), geogap::NearPole);
  CHECK_THROWS_AS(u.require_regular_span(0.5, 2.0), geogap::SingularityInSpan);
  CHECK_THROWS_AS(u.require_regular_span(1.0, 2.0), geogap::SingularityInSpan);
  CHECK_NOTHROW(u.require_regular_span(1.1, 9.0));
  CHECK(u.pole_distance(3.0) == Catch::Approx(2.0));
}

TEST_CASE("one-gap potential: derivatives against finite differences") {
  const Potential u = Potential::lame_g1(demo_lattice(), 0.4);
  testutil::Rng rng(13);
  for (int i = 0; i < 20; ++i) {
    const double x = rng.uniform(0.2, 1.8);
    const auto v = u.values(x);
    const auto f = [&](double s) { return u.values(s).u; };
    CHECK(std::abs(testutil::d1(f, x, 1e-4) - v.du) < 1e-6 * (1.0 + std::abs(v.du)));
    const auto g = [&](double s) { return u.values(s).du; };
    CHECK(std::abs(testutil::d1(g, x, 1e-4) - v.ddu) < 1e-5 * (1.0 + std::abs(v.ddu)));
  }
}

TEST_CASE("one-gap potential: pole pattern on the real axis") {
  const Lattice L = demo_lattice();
  const Potential u = Potential::lame_g1(L, 0.0);
  // Poles at multiples of the real period.
  CHECK_THROWS_AS(u.require_regular_span(-0.5, 0.5), geogap::SingularityInSpan);
  CHECK_THROWS_AS(u.require_regular_span(0.5, 2.0 * L.omega1 + 0.1),
                  geogap::SingularityInSpan);
  CHECK_NOTHROW(u.require_regular_span(0.1, 2.0 * L.omega1 - 0.1));
  CHECK(u.pole_distance(0.3) == Catch::Approx(0.3));
}

TEST_CASE("small-invariant one-gap potential approaches the rational one") {
  const double gamma = 0.3;
  const Potential lam = Potential::lame_g1(Lattice::from_invariants(1e-9, 0.0), gamma);
  const Potential rat = Potential::rational_cusp(gamma);
  for (double x : {0.5, 1.0, 2.0, 3.0}) {
    const auto a = lam.values(x);
    const auto b = rat.values(x);
    CHECK(std::abs(a.u - b.u) < 1e-6 * std::abs(b.u));
    CHECK(std::abs(a.du - b.du) < 1e-6 * std::abs(b.du));
    CHECK(std::abs(a.ddu - b.ddu) < 1e-6 * std::abs(b.ddu));
  }
}

TEST_CASE("tabulated potential goes through the same interface") {
  std::vector<double> x, y;
  for (int i = 0; i <= 40; ++i) {
    x.push_back(0.25 * i);
    y.push_back(std::exp(-x.back()));
  }
  const Potential u = Potential::tabulated(x, y);
  CHECK(std::abs(u(2.0) - std::exp(-2.0)) < 1e-3);
  CHECK_THROWS_AS(u.require_regular_span(-1.0, 2.0), geogap::OutOfDomain);
  CHECK_NOTHROW(u.require_regular_span(0.0, 10.0));
  CHECK(u.pole_distance(1.0) == std::numeric_limits<double>::infinity());
  CHECK(!u.has_closed_form_derivatives());
}

// --- numerical solve ------------------------------------------------------------

TEST_CASE("zero potential reduces to constant-coefficient theory") {
  std::vector<double> x{0.0, 5.0}, y{0.0, 0.0};
  const Potential u = Potential::tabulated(x, y);
  // z = 1: y'' = y, pick the decaying branch.
  const auto sol = geogap::schrodinger::solve(u, 1.0, 0.0, 5.0, {1.0, -1.0});
  const auto end = sol.at(5.0);
  CHECK(std::abs(end.y - std::exp(-5.0)) < 1e-10);
  CHECK(std::abs(end.dy + std::exp(-5.0)) < 1e-10);
  // z = -4: oscillatory, y = cos(2x).
  const auto osc = geogap::schrodinger::solve(u, -4.0, 0.0, 5.0, {1.0, 0.0});
  CHECK(std::abs(osc.at(5.0).y - std::cos(10.0)) < 1e-9);
}

TEST_CASE("frozen value: rational basis solution transported numerically") {
  // s1(x) = e^{-x}(1+x)/x solves y'' = (2/x^2 + 1) y; start from its exact
  // data at x = 0.5 and integrate to x = 1, where s1(1) = 2/e.
  const Potential u = Potential::rational_cusp(0.0);
  const double x0 = 0.5;
  const double y0 = std::exp(-x0) * (1.0 + x0) / x0;
  const double dy0 = -std::exp(-x0) * (1.0 + x0 + x0 * x0) / (x0 * x0);
  const auto sol = geogap::schrodinger::solve(u, 1.0, x0, 1.0, {y0, dy0});
  CHECK(std::abs(sol.at(1.0).y - 2.0 / M_E) < 1e-8);
  CHECK(std::abs(sol.at(1.0).dy + 3.0 / M_E) < 1e-8);
}

TEST_CASE("solve refuses spans crossing a pole") {
  const Potential u = Potential::rational_cusp(0.0);
  CHECK_THROWS_AS(geogap::schrodinger::solve(u, 1.0, -1.0, 1.0, {1.0, 0.0}),
                  geogap::SingularityInSpan);
}

TEST_CASE("wronskian of two numerical solutions is conserved") {
  const Potential u = Potential::lame_g1(demo_lattice(), 0.0);
  const double x0 = 0.4, x1 = 2.2;
  const auto a = geogap::schrodinger::solve(u, 0.7, x0, x1, {1.0, 0.0});
  const auto b = geogap::schrodinger::solve(u, 0.7, x0, x1, {0.0, 1.0});
  const auto w = [&](double x) {
    return a.at(x).y * b.at(x).dy - a.at(x).dy * b.at(x).y;
  };
  for (double x : {0.4, 0.9, 1.5, 2.2}) CHECK(std::abs(w(x) - 1.0) < 1e-9);
}

// --- rational basis --------------------------------------------------------------

TEST_CASE("rational basis: frozen values at gamma 0, z_unif 1") {
  const SolutionBasis basis = SolutionBasis::rational(0.0, 1.0);
  const auto v = basis.eval(1.0);
  CHECK(v.s1 == Catch::Approx(2.0 / M_E).epsilon(1e-14));
  CHECK(v.ds1 == Catch::Approx(-3.0 / M_E).epsilon(1e-14));
  CHECK(v.s2 == Catch::Approx(0.0).margin(1e-15));
  CHECK(v.ds2 == Catch::Approx(-M_E).epsilon(1e-14));
  CHECK(basis.wronskian() == Catch::Approx(-2.0).epsilon(1e-15));
  CHECK(basis.z_affine() == Catch::Approx(1.0));
  // Numerical Wronskian matches the closed form everywhere.
  for (double x : {0.3, 1.0, 2.5}) {
    const auto w = basis.eval(x);
    CHECK(std::abs(w.s1 * w.ds2 - w.ds1 * w.s2 + 2.0) < 1e-12);
  }
}

TEST_CASE("rational basis: generic parameters solve the equation") {
  const double gamma = 0.4, zu = 0.7;
  const SolutionBasis basis = SolutionBasis::rational(gamma, zu);
  const Potential u = basis.make_potential();
  const double z = basis.z_affine();
  CHECK(z == Catch::Approx(1.0 / (zu * zu)));
  testutil::Rng rng(14);
  for (int i = 0; i < 20; ++i) {
    const double x = rng.uniform(0.2, 3.0);
    const auto v = basis.eval(x);
    const auto s1 = [&](double t) { return basis.eval(t).s1; };
    const auto ds1 = [&](double t) { return basis.eval(t).ds1; };
    const auto s2 = [&](double t) { return basis.eval(t).s2; };
    const auto ds2 = [&](double t) { return basis.eval(t).ds2; };
    CHECK(std::abs(testutil::d1(s1, x, 1e-4) - v.ds1) < 1e-7 * (1.0 + std::abs(v.ds1)));
    CHECK(std::abs(testutil::d1(s2, x, 1e-4) - v.ds2) < 1e-7 * (1.0 + std::abs(v.ds2)));
    // The equation itself: (s_i)'' = (u + z) s_i.
    CHECK(std::abs(testutil::d1(ds1, x, 1e-4) - (u(x) + z) * v.s1) <
          1e-5 * (1.0 + std::abs((u(x) + z) * v.s1)));
    CHECK(std::abs(testutil::d1(ds2, x, 1e-4) - (u(x) + z) * v.s2) <
          1e-5 * (1.0 + std::abs((u(x) + z) * v.s2)));
    const double w_closed = 2.0 / (zu * (gamma * gamma - zu * zu));
    CHECK(std::abs(v.s1 * v.ds2 - v.ds1 * v.s2 - w_closed) <
          1e-11 * std::abs(w_closed));
  }
}

TEST_CASE("rational basis rejects degenerate parameters") {
  CHECK_THROWS_AS(SolutionBasis::rational(0.5, 0.0), geogap::DegenerateParameters);
  CHECK_THROWS_AS(SolutionBasis::rational(0.5, 0.5), geogap::DegenerateParameters);
  CHECK_THROWS_AS(SolutionBasis::rational(0.5, -0.5), geogap::DegenerateParameters);
}

// --- one-gap basis ----------------------------------------------------------------

TEST_CASE("one-gap basis: equation, wronskian, and stability at solution zeros") {
  const Lattice L = demo_lattice();
  const double gamma = 0.0, zu = 0.86;
  const SolutionBasis basis = SolutionBasis::lame_g1(L, gamma, zu);
  const Potential u = basis.make_potential();
  const double z = basis.z_affine();
  CHECK(z == Catch::Approx(geogap::wp(zu, L).value));

  // gamma = 0 collapses the closed-form Wronskian to wp'(z_unif).
  const double w_closed = geogap::wp_prime(zu, L).value;
  CHECK(basis.wronskian() == Catch::Approx(w_closed).epsilon(1e-12));

  testutil::Rng rng(15);
  for (int i = 0; i < 20; ++i) {
    const double x = rng.uniform(0.3, 2.0 * L.omega1 - 0.3);
    const auto v = basis.eval(x);
    const auto s1 = [&](double t) { return basis.eval(t).s1; };
    const auto ds1 = [&](double t) { return basis.eval(t).ds1; };
    CHECK(std::abs(testutil::d1(s1, x, 1e-5) - v.ds1) < 1e-6 * (1.0 + std::abs(v.ds1)));
    CHECK(std::abs(testutil::d1(ds1, x, 1e-5) - (u(x) + z) * v.s1) <
          1e-4 * (1.0 + std::abs((u(x) + z) * v.s1)));
    CHECK(std::abs(v.s1 * v.ds2 - v.ds1 * v.s2 - w_closed) <
          1e-10 * (1.0 + std::abs(w_closed)));
  }

  // s2 vanishes at x = z_unif (gamma = 0); the derivative there must stay
  // finite and match a finite difference across the zero.
  const auto vz = basis.eval(zu);
  CHECK(std::abs(vz.s2) < 1e-12);
  const auto s2 = [&](double t) { return basis.eval(t).s2; };
  CHECK(std::abs(testutil::d1(s2, zu, 1e-5) - vz.ds2) < 1e-7 * (1.0 + std::abs(vz.ds2)));

  // s1 s2 is proportional to wp(z_unif) - wp(x + gamma).
  const double c = basis.wronskian() / w_closed;  // 1 here, keeps the form general
  for (double x : {0.5, 1.1, 1.9}) {
    const auto v = basis.eval(x);
    const double lhs = v.s1 * v.s2;
    const double rhs = c * (geogap::wp(zu, L).value - geogap::wp(x + gamma, L).value) *
                       geogap::wsigma(zu, L).value * geogap::wsigma(zu, L).value /
                       (geogap::wsigma(zu + gamma, L).value *
                        geogap::wsigma(gamma - zu, L).value);
    CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(rhs)));
  }
}

TEST_CASE("one-gap basis agrees with direct numerical integration") {
  const Lattice L = demo_lattice();
  const SolutionBasis basis = SolutionBasis::lame_g1(L, 0.3, 0.9);
  const Potential u = basis.make_potential();
  const double x0 = 0.4, x1 = 2.0;
  const auto v0 = basis.eval(x0);
  const auto sol =
      geogap::schrodinger::solve(u, basis.z_affine(), x0, x1, {v0.s1, v0.ds1});
  const auto v1 = basis.eval(x1);
  CHECK(std::abs(sol.at(x1).y - v1.s1) < 1e-8 * (1.0 + std::abs(v1.s1)));
  CHECK(std::abs(sol.at(x1).dy - v1.ds1) < 1e-8 * (1.0 + std::abs(v1.ds1)));
}

TEST_CASE("one-gap basis rejects branch points and lattice hits") {
  const Lattice L = demo_lattice();
  CHECK_THROWS_AS(SolutionBasis::lame_g1(L, 0.0, L.omega1), geogap::BranchPoint);
  CHECK_THROWS_AS(SolutionBasis::lame_g1(L, 0.0, 2.0 * L.omega1),
                  geogap::DegenerateParameters);
  // gamma = z_unif puts sigma(gamma - z_unif) at its zero.
  CHECK_THROWS_AS(SolutionBasis::lame_g1(L, 0.9, 0.9), geogap::DegenerateParameters);
}

// --- quasi-periodic eigenfunction ---------------------------------------------------

TEST_CASE("eigenfunction: normalization, equation, and Floquet multiplier") {
  const Lattice L = demo_lattice();
  const double gamma = 0.35;
  const std::vector<Complex> zs{{0.6, 0.0}, {0.4, 0.5}, {0.2, L.omega2_im}};
  for (const Complex& z : zs) {
    const BakerAkhiezerG1 psi(L, gamma, z);
    const auto at0 = psi.eval(0.0);
    CHECK(std::abs(at0.psi - 1.0) < 1e-12);

    const Complex zp = psi.z_affine();
    testutil::Rng rng(16);
    for (int i = 0; i < 10; ++i) {
      const double x = rng.uniform(0.1, 1.6);
      const auto v = psi.eval(x);
      // The eigenvalue identity is an addition theorem, not a tautology of
      // the implementation: check psi'' = (2 wp(x + gamma) + wp(z)) psi.
      const Complex u = 2.0 * geogap::wp(Complex(x + gamma, 0.0), L).value;
      CHECK(std::abs(v.ddpsi - (u + zp) * v.psi) <
            1e-9 * (1.0 + std::abs(v.ddpsi)));
      // dpsi against finite differences.
      const auto re = [&](double t) { return psi.eval(t).psi.real(); };
      const auto im = [&](double t) { return psi.eval(t).psi.imag(); };
      const Complex fd(testutil::d1(re, x, 1e-5), testutil::d1(im, x, 1e-5));
      CHECK(std::abs(fd - v.dpsi) < 1e-6 * (1.0 + std::abs(v.dpsi)));
    }

    // Floquet property: psi(x + 2 omega1) / psi(x) is the x-independent
    // multiplier exp(2 eta1 z - 2 omega1 zeta(z)).
    const Complex rho =
        std::exp(2.0 * L.eta1 * z - 2.0 * L.omega1 * geogap::wzeta(z, L).value);
    for (double x : {0.2, 0.9, 1.4}) {
      const Complex ratio = psi.eval(x + 2.0 * L.omega1).psi / psi.eval(x).psi;
      CHECK(std::abs(ratio - rho) < 1e-9 * std::abs(rho));
    }
  }
}

TEST_CASE("eigenfunction rejects lattice-degenerate parameters") {
  const Lattice L = demo_lattice();
  CHECK_THROWS_AS(BakerAkhiezerG1(L, 0.0, Complex(0.5, 0.0)),
                  geogap::DegenerateParameters);
  CHECK_THROWS_AS(BakerAkhiezerG1(L, 0.3, Complex(-0.3, 0.0)),
                  geogap::DegenerateParameters);
  CHECK_THROWS_AS(BakerAkhiezerG1(L, 0.3, Complex(2.0 * L.omega1, 0.0)),
                  geogap::Error);
}

// --- combinations ------------------------------------------------------------------

TEST_CASE("quadratic combination: derivative ladder against finite differences") {
  const SolutionBasis basis = SolutionBasis::rational(0.0, 1.0);
  const Potential u = basis.make_potential();
  const double z = basis.z_affine();
  const std::array<double, 3> b{0.7, -0.4, 0.2};
  const auto combo = [&](double x) {
    return geogap::schrodinger::quadratic_combo(basis.eval(x), u.values(x), z, b);
  };
  testutil::Rng rng(17);
  for (int i = 0; i < 15; ++i) {
    const double x = rng.uniform(0.4, 2.5);
    const auto c = combo(x);
    const auto l = [&](double t) { return combo(t).l; };
    const auto dl = [&](double t) { return combo(t).dl; };
    const auto ddl = [&](double t) { return combo(t).ddl; };
    CHECK(std::abs(testutil::d1(l, x, 1e-4) - c.dl) < 1e-6 * (1.0 + std::abs(c.dl)));
    CHECK(std::abs(testutil::d1(dl, x, 1e-4) - c.ddl) < 1e-5 * (1.0 + std::abs(c.ddl)));
    CHECK(std::abs(testutil::d1(ddl, x, 1e-4) - c.dddl) <
          1e-4 * (1.0 + std::abs(c.dddl)));
  }
}

TEST_CASE("linear combination satisfies the equation by construction") {
  const SolutionBasis basis = SolutionBasis::rational(0.2, 0.8);
  const Potential u = basis.make_potential();
  const double z = basis.z_affine();
  const std::array<double, 2> a{1.3, -0.6};
  testutil::Rng rng(18);
  for (int i = 0; i < 10; ++i) {
    const double x = rng.uniform(0.4, 2.5);
    const auto lc =
        geogap::schrodinger::linear_combo(basis.eval(x), u(x), z, a);
    const auto s = [&](double t) {
      return geogap::schrodinger::linear_combo(basis.eval(t), u(t), z, a).s;
    };
    CHECK(std::abs(testutil::d1(s, x, 1e-4) - lc.ds) < 1e-6 * (1.0 + std::abs(lc.ds)));
    CHECK(std::abs(testutil::d2(s, x, 1e-4) - lc.dds) < 1e-4 * (1.0 + std::abs(lc.dds)));
  }
}
