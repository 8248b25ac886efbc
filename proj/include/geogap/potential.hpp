#pragma once

// Potentials u(x) entering the stationary equation y'' = (u + z) y.
//
// Three families:
//   lame_g1        u(x) = 2 wp(x + gamma) on a real rectangular lattice,
//                  the one-gap potential;
//   rational_cusp  u(x) = 2 / (x + gamma)^2, its cuspidal degeneration
//                  (the g2 = g3 = 0 limit of the elliptic family);
//   tabulated      shape-preserving interpolation of sampled data, for
//                  feeding measured or ad hoc potentials through the
//                  same machinery.
//
// values() returns u together with its first two derivatives; the metric
// construction consumes du, and verification stencils consume ddu.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "geogap/elliptic.hpp"
#include "geogap/errors.hpp"
#include "geogap/pchip.hpp"

namespace geogap::potential {

struct PotentialValues {
  double u;
  double du;
  double ddu;
};

class Potential {
 public:
  static Potential lame_g1(Lattice lattice, double gamma) {
    return Potential(LameG1{std::move(lattice), gamma});
  }

  static Potential rational_cusp(double gamma) {
    return Potential(RationalCusp{gamma});
  }

  static Potential tabulated(std::vector<double> x, std::vector<double> u) {
    return Potential(Tabulated{interp::Pchip(std::move(x), std::move(u))});
  }

  PotentialValues values(double x) const {
    return std::visit([&](const auto& k) { return eval(k, x); }, kind_);
  }

  double operator()(double x) const { return values(x).u; }

  // Rejects spans that cross a pole of u (or leave the tabulated range).
  // Closed interval: a singularity exactly at an endpoint also rejects.
  void require_regular_span(double x0, double x1) const {
    const double lo = std::min(x0, x1), hi = std::max(x0, x1);
    std::visit([&](const auto& k) { check_span(k, lo, hi); }, kind_);
  }

  bool has_closed_form_derivatives() const {
    return !std::holds_alternative<Tabulated>(kind_);
  }

  // Distance from x to the nearest real pole of u; +inf for tabulated data.
  double pole_distance(double x) const {
    return std::visit([&](const auto& k) { return pole_dist(k, x); }, kind_);
  }

 private:
  struct LameG1 {
    Lattice lattice;
    double gamma;
  };
  struct RationalCusp {
    double gamma;
  };
  struct Tabulated {
    interp::Pchip table;
  };

  explicit Potential(LameG1 k) : kind_(std::move(k)) {}
  explicit Potential(RationalCusp k) : kind_(k) {}
  explicit Potential(Tabulated k) : kind_(std::move(k)) {}

  static PotentialValues eval(const LameG1& k, double x) {
    const double s = x + k.gamma;
    const auto p = wp(s, k.lattice);
    const auto dp = wp_prime(s, k.lattice);
    // wp'' = 6 wp^2 - g2 / 2.
    return {2.0 * p.value, 2.0 * dp.value,
            12.0 * p.value * p.value - k.lattice.g2};
  }

  static PotentialValues eval(const RationalCusp& k, double x) {
    const double s = x + k.gamma;
    if (std::abs(s) < 1e-12 * (1.0 + std::abs(k.gamma)))
      throw NearPole("rational potential evaluated at its pole");
    const double s2 = s * s;
    return {2.0 / s2, -4.0 / (s2 * s), 12.0 / (s2 * s2)};
  }

  static PotentialValues eval(const Tabulated& k, double x) {
    return {k.table.value(x), k.table.deriv(x), k.table.deriv2(x)};
  }

  static void check_span(const LameG1& k, double lo, double hi) {
    // Real poles sit at x + gamma = 2 m omega1.
    const double period = 2.0 * k.lattice.omega1;
    const double m_lo = std::ceil((lo + k.gamma) / period - 1e-12);
    const double m_hi = std::floor((hi + k.gamma) / period + 1e-12);
    if (m_lo <= m_hi)
      throw SingularityInSpan("potential pole at x = " +
                              std::to_string(m_lo * period - k.gamma) +
                              " inside the requested span");
  }

  static void check_span(const RationalCusp& k, double lo, double hi) {
    const double pole = -k.gamma;
    if (pole >= lo - 1e-12 * (1.0 + std::abs(pole)) &&
        pole <= hi + 1e-12 * (1.0 + std::abs(pole)))
      throw SingularityInSpan("potential pole at x = " + std::to_string(pole) +
                              " inside the requested span");
  }

  static void check_span(const Tabulated& k, double lo, double hi) {
    if (lo < k.table.x_min() || hi > k.table.x_max())
      throw OutOfDomain("span leaves the tabulated range [" +
                        std::to_string(k.table.x_min()) + ", " +
                        std::to_string(k.table.x_max()) + "]");
  }

  static double pole_dist(const LameG1& k, double x) {
    const double period = 2.0 * k.lattice.omega1;
    const double s = x + k.gamma;
    return std::abs(s - period * std::nearbyint(s / period));
  }

  static double pole_dist(const RationalCusp& k, double x) {
    return std::abs(x + k.gamma);
  }

  static double pole_dist(const Tabulated&, double) {
    return std::numeric_limits<double>::infinity();
  }

  std::variant<LameG1, RationalCusp, Tabulated> kind_;
};

}  // namespace geogap::potential
