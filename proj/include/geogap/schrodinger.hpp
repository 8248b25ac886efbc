#pragma once

// The stationary equation y'' = (u(x) + z) y and its explicit solutions.
//
// Three layers:
//   solve()            numerical integration of the equation for any
//                      potential, with dense output;
//   BakerAkhiezerG1    the normalized quasi-periodic eigenfunction of the
//                      one-gap potential, psi(0) = 1, for a complex
//                      uniformizing spectral parameter;
//   SolutionBasis      a concrete real pair (s1, s2) of independent
//                      solutions for the one-gap and cuspidal-rational
//                      potentials, with closed-form derivatives and
//                      x-independent Wronskian. The metric layer builds its
//                      sections from exactly these pairs.
//
// Conventions: the uniformizing parameter z_unif lives on the spectral curve
// side; the scalar actually entering y'' = (u + z) y is z_affine (wp(z_unif)
// for the elliptic family, 1/z_unif^2 for the rational one).

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <variant>

#include "geogap/elliptic.hpp"
#include "geogap/errors.hpp"
#include "geogap/ode.hpp"
#include "geogap/potential.hpp"

namespace geogap::schrodinger {

using geogap::Complex;

struct WaveState {
  double y;
  double dy;
};

class WaveSolution {
 public:
  WaveSolution(ode::DenseSolution<2> sol) : sol_(std::move(sol)) {}

  WaveState at(double x) const {
    const auto s = sol_.at(x);
    return {s[0], s[1]};
  }

  double x_begin() const { return sol_.t_begin; }
  double x_end() const { return sol_.t_end; }
  const ode::Stats& stats() const { return sol_.stats; }

 private:
  ode::DenseSolution<2> sol_;
};

// Integrates y'' = (u + z) y over [x0, x1] (either direction). The span must
// not cross a pole of u; that is checked up front, not discovered mid-flight.
inline WaveSolution solve(const potential::Potential& u, double z, double x0,
                          double x1, WaveState init,
                          const ode::Options& opt = {}) {
  u.require_regular_span(x0, x1);
  auto rhs = [&u, z](double x, const ode::State<2>& y, ode::State<2>& dy) {
    dy[0] = y[1];
    dy[1] = (u(x) + z) * y[0];
  };
  return WaveSolution(
      ode::integrate<2>(rhs, x0, x1, ode::State<2>{init.y, init.dy}, opt));
}

// --- normalized quasi-periodic eigenfunction (one-gap potential) -------------
//
//   psi(x, z) = e^{-x zeta(z)} sigma(z + x + gamma) sigma(gamma)
//               / (sigma(z + gamma) sigma(x + gamma))
//
// satisfies psi'' = (2 wp(x + gamma) + wp(z)) psi and psi(0) = 1. Requires
// gamma and z + gamma off the lattice (else the normalization degenerates)
// and z off the lattice (else zeta(z) is undefined).

class BakerAkhiezerG1 {
 public:
  struct Values {
    Complex psi, dpsi, ddpsi;
  };

  BakerAkhiezerG1(Lattice lattice, double gamma, Complex z_unif)
      : lattice_(std::move(lattice)), gamma_(gamma), z_(z_unif) {
    if (nearest_pole_distance(Complex(gamma_, 0.0), lattice_) <
        lattice_.pole_cutoff)
      throw DegenerateParameters(
          "normalization point gamma sits on the lattice; psi(0) = 1 is "
          "impossible there");
    if (nearest_pole_distance(z_ + gamma_, lattice_) <
        lattice_.pole_cutoff)
      throw DegenerateParameters("z + gamma sits on the lattice");
    zeta_z_ = wzeta(z_, lattice_).value;  // throws NearPole on lattice
    z_affine_ = wp(z_, lattice_).value;
    norm_ = wsigma(Complex(gamma_, 0.0), lattice_).value /
            wsigma(z_ + gamma_, lattice_).value;
  }

  Complex z_affine() const { return z_affine_; }

  // Throws NearPole if x + gamma or x + z + gamma lands on the lattice.
  Values eval(double x) const {
    const Complex a = z_ + x + gamma_;
    const Complex b(x + gamma_, 0.0);
    const auto pa = elliptic_pack(a, lattice_);
    const auto pb = elliptic_pack(b, lattice_);
    if (pa.nearest_pole_distance < lattice_.pole_cutoff)
      throw NearPole("x + z + gamma within cutoff of a lattice point");
    if (pb.nearest_pole_distance < lattice_.pole_cutoff)
      throw NearPole("x + gamma within cutoff of a lattice point");
    const Complex psi = std::exp(-x * zeta_z_) * pa.sigma / pb.sigma * norm_;
    const Complex phi = -zeta_z_ + pa.zeta - pb.zeta;  // psi'/psi
    const Complex dphi = -pa.p + pb.p;
    return {psi, phi * psi, (dphi + phi * phi) * psi};
  }

  const Lattice& lattice() const { return lattice_; }
  double gamma() const { return gamma_; }
  Complex z_unif() const { return z_; }

 private:
  Lattice lattice_;
  double gamma_;
  Complex z_;
  Complex zeta_z_;
  Complex z_affine_;
  Complex norm_;
};

// --- real solution pairs ------------------------------------------------------

struct BasisValues {
  double s1, ds1, s2, ds2;
};

// Two independent real solutions of y'' = (u + z_affine) y:
//
//   one-gap:   s1 = e^{-x zeta(w)} sigma(x + w + gamma)
//                   / (sigma(x + gamma) sigma(w + gamma)),   w = z_unif,
//   rational:  the same with the degenerate sigma(x) -> x, zeta(x) -> 1/x,
//
// and s2 = s1 with w -> -w. Unlike the normalized eigenfunction this pair is
// well defined at gamma = 0. The Wronskian s1 s2' - s1' s2 is x-independent
// and returned in closed form.
class SolutionBasis {
 public:
  static SolutionBasis rational(double gamma, double z_unif) {
    const double scale = 1.0 + std::abs(gamma) + std::abs(z_unif);
    if (std::abs(z_unif) < 1e-12 * scale)
      throw DegenerateParameters("rational basis: z_unif = 0 is the cusp");
    if (std::abs(z_unif - gamma) < 1e-12 * scale ||
        std::abs(z_unif + gamma) < 1e-12 * scale)
      throw DegenerateParameters(
          "rational basis: z_unif = +-gamma makes one solution blow up");
    return SolutionBasis(Rational{gamma, z_unif});
  }

  static SolutionBasis lame_g1(Lattice lattice, double gamma,
                               double z_unif) {
    Elliptic k{std::move(lattice), gamma, z_unif, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    const auto& L = k.lattice;
    if (nearest_pole_distance(Complex(z_unif, 0.0), L) < L.pole_cutoff)
      throw DegenerateParameters("one-gap basis: z_unif on the lattice");
    const double p = wp(z_unif, L).value;
    const double dp = wp_prime(z_unif, L).value;
    if (std::abs(dp) < 1e-6 * (1.0 + std::pow(std::abs(p), 1.5)))
      throw BranchPoint(
          "z_unif at a branch point of the spectral curve; the two solutions "
          "coincide");
    const double sp = wsigma(z_unif + gamma, L).value;
    const double sm = wsigma(gamma - z_unif, L).value;
    const double cell = std::min(L.omega1, L.omega2_im);
    if (std::abs(sp) < 1e-9 * cell || std::abs(sm) < 1e-9 * cell)
      throw DegenerateParameters(
          "one-gap basis: gamma -+ z_unif on the lattice makes a solution "
          "blow up");
    k.zeta_w = wzeta(z_unif, L).value;
    k.z_affine = p;
    k.sigma_w = wsigma(z_unif, L).value;
    k.dp_w = dp;
    k.sigma_plus = sp;
    k.sigma_minus = sm;
    return SolutionBasis(std::move(k));
  }

  BasisValues eval(double x) const {
    return std::visit([&](const auto& k) { return eval_impl(k, x); }, kind_);
  }

  // s1 s2' - s1' s2, independent of x.
  double wronskian() const {
    return std::visit([](const auto& k) { return wronskian_impl(k); }, kind_);
  }

  // The scalar z entering y'' = (u + z) y.
  double z_affine() const {
    return std::visit([](const auto& k) { return z_affine_impl(k); }, kind_);
  }

  double z_unif() const {
    return std::visit([](const auto& k) { return k.z_unif; }, kind_);
  }

  double gamma() const {
    return std::visit([](const auto& k) { return k.gamma; }, kind_);
  }

  // The potential this pair solves.
  potential::Potential make_potential() const {
    if (const auto* e = std::get_if<Elliptic>(&kind_))
      return potential::Potential::lame_g1(e->lattice, e->gamma);
    return potential::Potential::rational_cusp(std::get<Rational>(kind_).gamma);
  }

  bool is_rational() const { return std::holds_alternative<Rational>(kind_); }

 private:
  struct Rational {
    double gamma, z_unif;
  };
  struct Elliptic {
    Lattice lattice;
    double gamma, z_unif;
    double zeta_w, z_affine, sigma_w, dp_w, sigma_plus, sigma_minus;
  };

  explicit SolutionBasis(Rational k) : kind_(k) {}
  explicit SolutionBasis(Elliptic k) : kind_(std::move(k)) {}

  static BasisValues eval_impl(const Rational& k, double x) {
    const double b = x + k.gamma;
    if (std::abs(b) < 1e-12 * (1.0 + std::abs(k.gamma)))
      throw NearPole("rational basis evaluated at the potential pole");
    const double w = k.z_unif;
    const double ap = b + w, am = b - w;
    const double ep = std::exp(-x / w), em = std::exp(x / w);
    const double s1 = ep * ap / (b * (w + k.gamma));
    const double s2 = em * am / (b * (k.gamma - w));
    // d/dx [e^{-x/w} (b + w)/b] = e^{-x/w} [1 - (b + w)(1/w + 1/b)] / 1 ...
    const double ds1 = ep * (1.0 - ap * (1.0 / w + 1.0 / b)) / (b * (w + k.gamma));
    const double ds2 = em * (1.0 + am * (1.0 / w - 1.0 / b)) / (b * (k.gamma - w));
    return {s1, ds1, s2, ds2};
  }

  static BasisValues eval_impl(const Elliptic& k, double x) {
    const auto& L = k.lattice;
    const auto rb = wzeta(x + k.gamma, L);  // throws at the pole
    const double zeta_b = rb.value;
    const double sigma_b = wsigma(x + k.gamma, L).value;
    const auto sig_p = wsigma(x + k.z_unif + k.gamma, L).value;
    const auto dsig_p = wsigma_prime(x + k.z_unif + k.gamma, L).value;
    const auto sig_m = wsigma(x - k.z_unif + k.gamma, L).value;
    const auto dsig_m = wsigma_prime(x - k.z_unif + k.gamma, L).value;
    const double ep = std::exp(-x * k.zeta_w), em = std::exp(x * k.zeta_w);
    const double den_p = sigma_b * k.sigma_plus;
    const double den_m = sigma_b * k.sigma_minus;
    const double s1 = ep * sig_p / den_p;
    const double s2 = em * sig_m / den_m;
    // Derivatives via sigma' so a zero of sig_{p,m} stays regular.
    const double ds1 = ep * (dsig_p - sig_p * (k.zeta_w + zeta_b)) / den_p;
    const double ds2 = em * (dsig_m + sig_m * (k.zeta_w - zeta_b)) / den_m;
    return {s1, ds1, s2, ds2};
  }

  static double wronskian_impl(const Rational& k) {
    return 2.0 / (k.z_unif * (k.gamma * k.gamma - k.z_unif * k.z_unif));
  }

  static double wronskian_impl(const Elliptic& k) {
    return -k.sigma_w * k.sigma_w * k.dp_w / (k.sigma_plus * k.sigma_minus);
  }

  static double z_affine_impl(const Rational& k) {
    return 1.0 / (k.z_unif * k.z_unif);
  }

  static double z_affine_impl(const Elliptic& k) { return k.z_affine; }

  std::variant<Rational, Elliptic> kind_;
};

// --- combinations feeding the metric ------------------------------------------

// s = a1 s1 + a2 s2 with derivatives; s'' comes from the equation itself.
struct LinearCombo {
  double s, ds, dds;
};

inline LinearCombo linear_combo(const BasisValues& v, double u, double z,
                                const std::array<double, 2>& a) {
  const double s = a[0] * v.s1 + a[1] * v.s2;
  const double ds = a[0] * v.ds1 + a[1] * v.ds2;
  return {s, ds, (u + z) * s};
}

// l = b1 s1^2 + b2 s1 s2 + b3 s2^2 with three derivatives. The third one uses
// l''' = 4 (u + z) l' + 2 u' l, the defining property of products of
// solutions, so no finite differences enter.
struct QuadraticCombo {
  double l, dl, ddl, dddl;
};

inline QuadraticCombo quadratic_combo(const BasisValues& v,
                                      const potential::PotentialValues& pv,
                                      double z, const std::array<double, 3>& b) {
  const double l = b[0] * v.s1 * v.s1 + b[1] * v.s1 * v.s2 + b[2] * v.s2 * v.s2;
  const double dl = 2.0 * b[0] * v.s1 * v.ds1 + b[1] * (v.ds1 * v.s2 + v.s1 * v.ds2) +
                    2.0 * b[2] * v.s2 * v.ds2;
  const double ddl =
      2.0 * (b[0] * v.ds1 * v.ds1 + b[1] * v.ds1 * v.ds2 + b[2] * v.ds2 * v.ds2) +
      2.0 * (pv.u + z) * l;
  const double dddl = 4.0 * (pv.u + z) * dl + 2.0 * pv.du * l;
  return {l, dl, ddl, dddl};
}

// Convenience wrapper when only the quadratic combination is needed.
class LFunction {
 public:
  LFunction(SolutionBasis basis, std::array<double, 3> b)
      : basis_(std::move(basis)),
        b_(b),
        potential_(basis_.make_potential()),
        z_(basis_.z_affine()) {}

  QuadraticCombo eval(double x) const {
    return quadratic_combo(basis_.eval(x), potential_.values(x), z_, b_);
  }

  const SolutionBasis& basis() const { return basis_; }
  const potential::Potential& potential() const { return potential_; }
  double z_affine() const { return z_; }

 private:
  SolutionBasis basis_;
  std::array<double, 3> b_;
  potential::Potential potential_;
  double z_;
};

}  // namespace geogap::schrodinger
