#include "geogap/elliptic.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>

#include "testutil.hpp"

using geogap::Complex;
using geogap::Lattice;

namespace {

// Random invariants with positive discriminant (three real branch points).
Lattice random_rectangular(testutil::Rng& rng) {
  const double g2 = rng.uniform(0.5, 9.0);
  const double cap = std::sqrt(g2 * g2 * g2 / 27.0);
  const double g3 = rng.uniform(-0.9, 0.9) * cap;
  return Lattice::from_invariants(g2, g3);
}

Complex cell_point(testutil::Rng& rng, const Lattice& L) {
  for (int i = 0; i < 100; ++i) {
    const Complex x(rng.uniform(-0.95, 0.95) * 2.0 * L.omega1,
                    rng.uniform(-0.95, 0.95) * 2.0 * L.omega2_im);
    if (geogap::nearest_pole_distance(x, L) >
        0.08 * std::min(L.omega1, L.omega2_im))
      return x;
  }
  throw std::runtime_error("no admissible sample point found");
}

}  // namespace

TEST_CASE("half-periods against quadrature oracle (lemniscatic)") {
  const Lattice L = Lattice::from_invariants(4.0, 0.0);
  REQUIRE(L.e[0] == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(L.e[1] == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(L.e[2] == Catch::Approx(-1.0).margin(1e-12));

  const double om1 = testutil::half_period_quadrature(L.e[0] - L.e[1], L.e[0] - L.e[2]);
  REQUIRE(std::abs(L.omega1 - om1) < 1e-10);
  // Square lattice: both half-periods coincide.
  REQUIRE(std::abs(L.omega2_im - L.omega1) < 1e-12);
  // Quarter-turn symmetry pins eta1 * omega1 = pi/4 in this case.
  REQUIRE(std::abs(L.eta1 - M_PI / (4.0 * L.omega1)) < 1e-11);
}

TEST_CASE("half-periods against quadrature oracle (g2=4, g3=-1)") {
  const Lattice L = Lattice::from_invariants(4.0, -1.0);
  const double om1 = testutil::half_period_quadrature(L.e[0] - L.e[1], L.e[0] - L.e[2]);
  const double om2 = testutil::half_period_quadrature(L.e[0] - L.e[2], L.e[1] - L.e[2]);
  REQUIRE(std::abs(L.omega1 - om1) < 1e-10);
  REQUIRE(std::abs(L.omega2_im - om2) < 1e-10);
}

TEST_CASE("degenerate and non-rectangular invariants are rejected") {
  REQUIRE_THROWS_AS(Lattice::from_invariants(0.0, 0.0), geogap::DegenerateLattice);
  REQUIRE_THROWS_AS(Lattice::from_invariants(3.0, 1.0), geogap::DegenerateLattice);
  // 3^3 = 27 exactly
  REQUIRE_THROWS_AS(Lattice::from_invariants(1.0, 1.0), geogap::NonRectangular);
  REQUIRE_THROWS_AS(Lattice::from_invariants(-4.0, 0.0), geogap::NonRectangular);
}

TEST_CASE("wp at half-periods hits the branch points") {
  for (auto [g2, g3] : {std::pair{4.0, 0.0}, {4.0, -1.0}, {7.0, 2.0}}) {
    const Lattice L = Lattice::from_invariants(g2, g3);
    REQUIRE(geogap::wp(L.omega1, L).value == Catch::Approx(L.e[0]).margin(1e-10));
    REQUIRE(std::abs(geogap::wp_prime(L.omega1, L).value) < 1e-9);
    const Complex at_om2 = geogap::wp(Complex(0.0, L.omega2_im), L).value;
    REQUIRE(at_om2.real() == Catch::Approx(L.e[2]).margin(1e-10));
    REQUIRE(std::abs(at_om2.imag()) < 1e-10);
    const Complex at_corner = geogap::wp(Complex(L.omega1, L.omega2_im), L).value;
    REQUIRE(at_corner.real() == Catch::Approx(L.e[1]).margin(1e-10));
  }
}

TEST_CASE("differential equation residual, property over lattices") {
  testutil::Rng rng(20260815);
  for (int trial = 0; trial < 20; ++trial) {
    const Lattice L = random_rectangular(rng);
    const Complex x = cell_point(rng, L);
    const Complex p = geogap::wp(x, L).value;
    const Complex dp = geogap::wp_prime(x, L).value;
    const Complex lhs = dp * dp;
    const Complex rhs = 4.0 * p * p * p - L.g2 * p - L.g3;
    const double scale = std::abs(lhs) + std::abs(4.0 * p * p * p) +
                         std::abs(L.g2 * p) + std::abs(L.g3) + 1.0;
    REQUIRE(std::abs(lhs - rhs) / scale < 1e-10);
  }
}

TEST_CASE("parity and periodicity") {
  testutil::Rng rng(777);
  for (int trial = 0; trial < 10; ++trial) {
    const Lattice L = random_rectangular(rng);
    const Complex x = cell_point(rng, L);
    const Complex p = geogap::wp(x, L).value;
    REQUIRE(std::abs(geogap::wp(-x, L).value - p) < 1e-10 * (1.0 + std::abs(p)));
    REQUIRE(std::abs(geogap::wzeta(-x, L).value + geogap::wzeta(x, L).value) < 1e-10);
    REQUIRE(std::abs(geogap::wsigma(-x, L).value + geogap::wsigma(x, L).value) <
            1e-10);

    for (const Complex period : {Complex(2.0 * L.omega1, 0.0),
                                 Complex(0.0, 2.0 * L.omega2_im),
                                 Complex(4.0 * L.omega1, -2.0 * L.omega2_im)}) {
      const Complex ps = geogap::wp(x + period, L).value;
      REQUIRE(std::abs(ps - p) < 1e-10 * (1.0 + std::abs(p)));
      const Complex dps = geogap::wp_prime(x + period, L).value;
      REQUIRE(std::abs(dps - geogap::wp_prime(x, L).value) <
              1e-10 * (1.0 + std::abs(dps)));
    }
  }
}

TEST_CASE("zeta and sigma quasi-periodicity") {
  testutil::Rng rng(31337);
  for (int trial = 0; trial < 10; ++trial) {
    const Lattice L = random_rectangular(rng);
    const Complex x = cell_point(rng, L);

    const Complex z0 = geogap::wzeta(x, L).value;
    REQUIRE(std::abs(geogap::wzeta(x + 2.0 * L.omega1, L).value - z0 - 2.0 * L.eta1) <
            1e-10 * (1.0 + std::abs(z0)));
    REQUIRE(std::abs(geogap::wzeta(x + 2.0 * L.omega2(), L).value - z0 -
                     2.0 * L.eta2()) < 1e-10 * (1.0 + std::abs(z0)));

    const Complex s0 = geogap::wsigma(x, L).value;
    const Complex s1 = geogap::wsigma(x + 2.0 * L.omega1, L).value;
    const Complex expected = -std::exp(2.0 * L.eta1 * (x + L.omega1)) * s0;
    REQUIRE(std::abs(s1 - expected) < 1e-10 * (1.0 + std::abs(expected)));
    const Complex s2 = geogap::wsigma(x + 2.0 * L.omega2(), L).value;
    const Complex expected2 = -std::exp(2.0 * L.eta2() * (x + L.omega2())) * s0;
    REQUIRE(std::abs(s2 - expected2) < 1e-10 * (1.0 + std::abs(expected2)));
  }
}

TEST_CASE("derivative chains by finite differences") {
  testutil::Rng rng(99);
  const double h = 1e-4;
  for (int trial = 0; trial < 8; ++trial) {
    const Lattice L = random_rectangular(rng);
    // Real sample comfortably inside (0, 2*omega1) and away from the pole.
    const double x = (0.25 + 0.5 * rng.uniform(0.0, 1.0)) * 2.0 * L.omega1;

    // zeta' = -wp
    auto zeta_fn = [&](double t) { return geogap::wzeta(t, L).value; };
    const double dz = testutil::d1(zeta_fn, x, h);
    const double p = geogap::wp(x, L).value;
    REQUIRE(std::abs(dz + p) < 1e-9 * (1.0 + std::abs(p)));

    // (sigma'/sigma) = zeta
    auto sigma_fn = [&](double t) { return geogap::wsigma(t, L).value; };
    const double ds = testutil::d1(sigma_fn, x, h);
    const double ratio = ds / geogap::wsigma(x, L).value;
    REQUIRE(std::abs(ratio - geogap::wzeta(x, L).value) < 1e-9 * (1.0 + std::abs(ratio)));

    // wp' matches differenced wp
    auto wp_fn = [&](double t) { return geogap::wp(t, L).value; };
    const double dp_fd = testutil::d1(wp_fn, x, h);
    const double dp = geogap::wp_prime(x, L).value;
    REQUIRE(std::abs(dp_fd - dp) < 1e-8 * (1.0 + std::abs(dp)));
  }
}

TEST_CASE("Legendre relation") {
  testutil::Rng rng(555);
  for (int trial = 0; trial < 12; ++trial) {
    const Lattice L = random_rectangular(rng);
    const double residual =
        std::abs(L.eta1 * L.omega2_im - L.eta2_im * L.omega1 - M_PI / 2.0);
    REQUIRE(residual < 1e-12);
  }
}

TEST_CASE("near-pole rejection and cutoff configurability") {
  const Lattice L = Lattice::from_invariants(4.0, -1.0);
  REQUIRE_THROWS_AS(geogap::wp(1e-7, L), geogap::NearPole);
  REQUIRE_THROWS_AS(geogap::wzeta(2.0 * L.omega1 + 1e-8, L), geogap::NearPole);
  REQUIRE_THROWS_AS(geogap::wp_prime(Complex(1e-8, 1e-8), L), geogap::NearPole);
  // sigma is entire: no throw, exact zero on the lattice.
  REQUIRE(geogap::wsigma(0.0, L).value == 0.0);
  REQUIRE(geogap::wsigma(0.0, L).nearest_pole_distance == 0.0);

  const Lattice wide = Lattice::from_invariants(4.0, -1.0, 1e-2);
  REQUIRE_THROWS_AS(geogap::wp(0.02, wide), geogap::NearPole);
  REQUIRE_NOTHROW(geogap::wp(0.2, wide));

  // Reported distance measures to the nearest lattice point, not the origin.
  const auto v = geogap::wp(2.0 * L.omega1 + 0.125, L);
  REQUIRE(v.nearest_pole_distance == Catch::Approx(0.125).margin(1e-12));
}

TEST_CASE("pack agrees with the individual evaluations") {
  const Lattice L = Lattice::from_invariants(4.0, -1.0);
  const Complex x(0.8, 0.3);
  const auto pack = geogap::elliptic_pack(x, L);
  REQUIRE(pack.p == geogap::wp(x, L).value);
  REQUIRE(pack.dp == geogap::wp_prime(x, L).value);
  REQUIRE(pack.zeta == geogap::wzeta(x, L).value);
  REQUIRE(pack.sigma == geogap::wsigma(x, L).value);
}

TEST_CASE("rational degenerations") {
  REQUIRE(geogap::wp_hat(2.0) == 0.25);
  REQUIRE(geogap::wp_hat_prime(2.0) == -0.25);
  REQUIRE(geogap::wzeta_hat(4.0) == 0.25);
  REQUIRE(geogap::wsigma_hat(-3.0) == -3.0);
}

TEST_CASE("small-invariant limits approach the rational forms") {
  // (eps, eps) has negative discriminant, so this goes through the
  // series-only evaluation; x = 1 is deep inside its convergence disk.
  for (double eps : {1e-2, 1e-4}) {
    REQUIRE(std::abs(geogap::wp_from_invariants(1.0, eps, eps) - 1.0) < eps);
    REQUIRE(std::abs(geogap::wzeta_from_invariants(1.0, eps, eps) - 1.0) < eps);
    REQUIRE(std::abs(geogap::wsigma_from_invariants(1.0, eps, eps) - 1.0) < eps);
  }
  const double r_coarse = std::abs(geogap::wp_from_invariants(1.0, 1e-2, 1e-2) - 1.0);
  const double r_fine = std::abs(geogap::wp_from_invariants(1.0, 1e-4, 1e-4) - 1.0);
  REQUIRE(r_fine < r_coarse / 50.0);
}

TEST_CASE("series path matches the lattice path on a rectangular case") {
  const Lattice L = Lattice::from_invariants(1e-9, 0.0);
  const double via_lattice = geogap::wp(1.5, L).value;
  const double via_series = geogap::wp_from_invariants(1.5, 1e-9, 0.0);
  REQUIRE(std::abs(via_lattice - via_series) < 1e-14);
}

TEST_CASE("sigma prime: generic points, lattice points, and transport") {
  testutil::Rng rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const Lattice L = random_rectangular(rng);
    const Complex x = cell_point(rng, L);
    const double h = 1e-4 * std::min(L.omega1, L.omega2_im);

    // Agrees with sigma * zeta away from lattice points.
    const Complex direct = geogap::wsigma(x, L).value * geogap::wzeta(x, L).value;
    const Complex joint = geogap::wsigma_prime(x, L).value;
    REQUIRE(std::abs(joint - direct) < 1e-10 * (1.0 + std::abs(direct)));

    // Finite-difference derivative of sigma along the real direction.
    const auto re_sigma = [&](double t) {
      return geogap::wsigma(x + Complex(t, 0.0), L).value.real();
    };
    const auto im_sigma = [&](double t) {
      return geogap::wsigma(x + Complex(t, 0.0), L).value.imag();
    };
    const Complex fd(testutil::d1(re_sigma, 0.0, h), testutil::d1(im_sigma, 0.0, h));
    REQUIRE(std::abs(joint - fd) < 1e-6 * (1.0 + std::abs(joint)));
  }

  // Exact lattice points: sigma'(0) = 1 and the transported values at periods.
  const Lattice L = Lattice::from_invariants(4.0, -1.0);
  REQUIRE(geogap::wsigma_prime(0.0, L).value == 1.0);
  const double expected_period =
      -std::exp(2.0 * L.eta1 * L.omega1);  // sign flip times Bloch factor
  REQUIRE(std::abs(geogap::wsigma_prime(2.0 * L.omega1, L).value - expected_period) <
          1e-12 * std::abs(expected_period));
  // FD across the zero of sigma at 2 omega1.
  const auto s = [&](double t) { return geogap::wsigma(2.0 * L.omega1 + t, L).value; };
  const double fd0 = testutil::d1(s, 0.0, 1e-5);
  REQUIRE(std::abs(fd0 - expected_period) < 1e-7 * std::abs(expected_period));
  // Complex lattice point 2 omega2: sign also flips, factor exp(2 eta2 omega2).
  const Complex two_w2 = 2.0 * Complex(0.0, L.omega2_im);
  const Complex expect2 =
      -std::exp(2.0 * L.eta2() * L.omega2());
  REQUIRE(std::abs(geogap::wsigma_prime(two_w2, L).value - expect2) <
          1e-12 * std::abs(expect2));
}
