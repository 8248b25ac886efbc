#pragma once

// Weierstrass elliptic layer for real rectangular lattices given by invariants
// (g2, g3) with positive cubic discriminant. Evaluation strategy: reduce the
// argument to the fundamental cell, sum the Laurent/Taylor series about the
// origin (coefficient recursion c2 = g2/20, c3 = g3/28, quadratic recursion
// above), apply argument-halving duplication steps when the reduced argument
// is not small, and transport zeta/sigma back with the quasi-period data.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "geogap/errors.hpp"

namespace geogap {

using Complex = std::complex<double>;

inline constexpr int kWpSeriesTerms = 32;       // coefficients c_2 .. c_33
inline constexpr double kDefaultPoleCutoffRel = 1e-6;  // of the cell diameter

namespace detail {

// c_k of wp(x) = x^-2 + sum_{k>=2} c_k x^{2k-2}; c[i] holds c_{i+2}.
inline std::array<double, kWpSeriesTerms> wp_series_coeffs(double g2, double g3) {
  std::array<double, kWpSeriesTerms> c{};
  c[0] = g2 / 20.0;
  c[1] = g3 / 28.0;
  for (int k = 4; k < kWpSeriesTerms + 2; ++k) {
    double acc = 0.0;
    for (int m = 2; m <= k - 2; ++m) acc += c[m - 2] * c[k - m - 2];
    c[k - 2] = 3.0 * acc / ((2 * k + 1) * (k - 3));
  }
  return c;
}

template <typename U>
struct WpPack {
  U p, dp, zeta, sigma;
};

// Series sums about 0. Caller guarantees |x| <= ~0.55 of the distance to the
// nearest nonzero lattice point; 32 terms then reach full double precision.
template <typename U>
WpPack<U> series_pack(U x, const std::array<double, kWpSeriesTerms>& c) {
  const U x2 = x * x;
  U p = U(1.0) / x2;
  U dp = U(-2.0) / (x2 * x);
  U zc = U(0.0);
  U sc = U(0.0);
  U q = x;  // x^{2k-3}
  for (int i = 0; i < kWpSeriesTerms; ++i) {
    const int k = i + 2;
    const U t = c[i] * q;
    p += t * x;
    dp += double(2 * k - 2) * t;
    zc += t * x2 / double(2 * k - 1);
    sc += t * x2 * x / double((2 * k - 1) * (2 * k));
    q *= x2;
  }
  using std::exp;
  return {p, dp, U(1.0) / x - zc, x * exp(-sc)};
}

// One argument doubling. Valid away from lattice points and half-periods;
// the halving policy keeps every input strictly inside the quarter cell.
template <typename U>
WpPack<U> duplicate(const WpPack<U>& w, double g2) {
  const U ppp = 6.0 * w.p * w.p - 0.5 * g2;  // wp''
  const U A = ppp / (2.0 * w.dp);
  const U p2 = A * A - 2.0 * w.p;
  const U dp2 = A * (6.0 * w.p - 2.0 * A * A) - w.dp;
  const U z2 = 2.0 * w.zeta + A;
  U s4 = w.sigma * w.sigma;
  s4 *= s4;
  return {p2, dp2, z2, -s4 * w.dp};
}

inline double agm(double a, double b) {
  for (int i = 0; i < 64; ++i) {
    const double an = 0.5 * (a + b);
    const double bn = std::sqrt(a * b);
    a = an;
    b = bn;
    if (std::abs(a - b) <= 4.0 * std::numeric_limits<double>::epsilon() * a) break;
  }
  return 0.5 * (a + b);
}

}  // namespace detail

struct EllipticValue {
  Complex value;
  double nearest_pole_distance;
};

struct RealEllipticValue {
  double value;
  double nearest_pole_distance;
};

/** Real rectangular period lattice recovered from invariants (g2, g3).
 *
 * omega1 is the real half-period, i*omega2_im the imaginary one; eta1 and
 * i*eta2_im are the matching quasi-periods zeta(omega1), zeta(i*omega2_im).
 * e holds the branch points of 4t^3 - g2 t - g3 in decreasing order, so
 * wp(omega1) = e[0] and wp(i*omega2_im) = e[2]. The Legendre combination
 * eta1*omega2 - eta2*omega1 = i*pi/2 holds to evaluation accuracy.
 */
struct Lattice {
  double g2 = 0.0, g3 = 0.0;
  double omega1 = 0.0, omega2_im = 0.0;
  double eta1 = 0.0, eta2_im = 0.0;
  std::array<double, 3> e{};
  double discriminant = 0.0;
  double pole_cutoff = 0.0;  // absolute length below which wp/wzeta refuse
  std::array<double, kWpSeriesTerms> c{};

  Complex omega2() const { return Complex(0.0, omega2_im); }
  Complex eta2() const { return Complex(0.0, eta2_im); }
  double cell_diameter() const { return std::hypot(2.0 * omega1, 2.0 * omega2_im); }

  static Lattice from_invariants(double g2, double g3,
                                 double pole_cutoff_rel = kDefaultPoleCutoffRel);
};

namespace detail {

// Halve until the argument sits inside half the convergence radius, sum the
// series there, then double back. No reduction, no quasi-period transport.
template <typename U>
WpPack<U> eval_reduced(U xr, const Lattice& L) {
  using std::abs;
  const double ax = std::abs(xr);
  const double rconv = 2.0 * std::min(L.omega1, L.omega2_im);
  int j = 0;
  if (ax > 0.5 * rconv) {
    j = static_cast<int>(std::ceil(std::log2(ax / (0.5 * rconv))));
    j = std::min(j, 48);
  }
  WpPack<U> w = series_pack(xr / std::ldexp(1.0, j), L.c);
  for (int i = 0; i < j; ++i) w = duplicate(w, L.g2);
  return w;
}

// sigma and sigma' = sigma * zeta evaluated jointly, so the product stays
// finite at lattice points where sigma vanishes and zeta blows up.
template <typename U>
struct SigmaPair {
  U sigma, sigma_prime;
};

template <typename U>
SigmaPair<U> sigma_pair_reduced(U xr, const Lattice& L) {
  const double ax = std::abs(xr);
  const double rconv = 2.0 * std::min(L.omega1, L.omega2_im);
  if (ax <= 0.5 * rconv) {
    // Direct series: sigma = x e^{-S}, sigma' = e^{-S} (1 - x Z) with
    // Z = sum c_k x^{2k-1}/(2k-1), S = sum c_k x^{2k}/((2k-1) 2k).
    const U x2 = xr * xr;
    U zc = U(0.0), sc = U(0.0), q = xr;
    for (int i = 0; i < kWpSeriesTerms; ++i) {
      const int k = i + 2;
      const U t = L.c[i] * q;
      zc += t * x2 / double(2 * k - 1);
      sc += t * x2 * xr / double((2 * k - 1) * (2 * k));
      q *= x2;
    }
    using std::exp;
    const U es = exp(-sc);
    return {xr * es, es * (U(1.0) - xr * zc)};
  }
  const auto w = eval_reduced(xr, L);
  return {w.sigma, w.sigma * w.zeta};
}

struct Reduced {
  Complex xr;
  long m = 0, n = 0;
  double pole_distance = 0.0;
};

inline Reduced reduce(Complex x, const Lattice& L) {
  Reduced r;
  r.m = std::lround(std::nearbyint(x.real() / (2.0 * L.omega1)));
  r.n = std::lround(std::nearbyint(x.imag() / (2.0 * L.omega2_im)));
  r.xr = Complex(x.real() - 2.0 * r.m * L.omega1, x.imag() - 2.0 * r.n * L.omega2_im);
  r.pole_distance = std::abs(r.xr);
  return r;
}

inline void check_pole(const Reduced& r, const Lattice& L, const char* what) {
  if (r.pole_distance < L.pole_cutoff)
    throw NearPole(std::string(what) + ": argument within " +
                   std::to_string(r.pole_distance) + " of a lattice point");
}

}  // namespace detail

inline Lattice Lattice::from_invariants(double g2, double g3, double pole_cutoff_rel) {
  if (!std::isfinite(g2) || !std::isfinite(g3))
    throw std::invalid_argument("lattice invariants must be finite");
  Lattice L;
  L.g2 = g2;
  L.g3 = g3;
  L.discriminant = g2 * g2 * g2 - 27.0 * g3 * g3;
  const double scale = std::max(std::abs(g2 * g2 * g2), 27.0 * g3 * g3);
  if (scale == 0.0 || std::abs(L.discriminant) <= 1e-12 * scale)
    throw DegenerateLattice("g2^3 - 27 g3^2 vanishes: no bounded fundamental cell");
  if (L.discriminant < 0.0)
    throw NonRectangular("negative discriminant: branch points are not all real");

  // 4t^3 - g2 t - g3 with three distinct real roots (trigonometric form).
  const double mh = std::sqrt(g2 / 12.0);  // sqrt(-p/3), p = -g2/4
  const double cos3t = std::clamp(g3 / (8.0 * mh * mh * mh), -1.0, 1.0);
  const double th = std::acos(cos3t) / 3.0;
  std::array<double, 3> e = {2.0 * mh * std::cos(th),
                             2.0 * mh * std::cos(th - 2.0 * M_PI / 3.0),
                             2.0 * mh * std::cos(th + 2.0 * M_PI / 3.0)};
  std::sort(e.begin(), e.end(), std::greater<double>());
  L.e = e;

  const double s13 = std::sqrt(e[0] - e[2]);
  const double s12 = std::sqrt(e[0] - e[1]);
  const double s23 = std::sqrt(e[1] - e[2]);
  L.omega1 = M_PI / (2.0 * detail::agm(s13, s12));
  L.omega2_im = M_PI / (2.0 * detail::agm(s13, s23));
  L.c = detail::wp_series_coeffs(g2, g3);
  L.pole_cutoff = pole_cutoff_rel * L.cell_diameter();

  L.eta1 = detail::eval_reduced(L.omega1, L).zeta;
  L.eta2_im = detail::eval_reduced(Complex(0.0, L.omega2_im), L).zeta.imag();
  return L;
}

// --- lattice-based evaluations ----------------------------------------------

inline EllipticValue wp(Complex x, const Lattice& L) {
  const auto r = detail::reduce(x, L);
  detail::check_pole(r, L, "wp");
  return {detail::eval_reduced(r.xr, L).p, r.pole_distance};
}

inline RealEllipticValue wp(double x, const Lattice& L) {
  const auto r = detail::reduce(Complex(x, 0.0), L);
  detail::check_pole(r, L, "wp");
  return {detail::eval_reduced(r.xr.real(), L).p, r.pole_distance};
}

inline EllipticValue wp_prime(Complex x, const Lattice& L) {
  const auto r = detail::reduce(x, L);
  detail::check_pole(r, L, "wp_prime");
  return {detail::eval_reduced(r.xr, L).dp, r.pole_distance};
}

inline RealEllipticValue wp_prime(double x, const Lattice& L) {
  const auto r = detail::reduce(Complex(x, 0.0), L);
  detail::check_pole(r, L, "wp_prime");
  return {detail::eval_reduced(r.xr.real(), L).dp, r.pole_distance};
}

inline EllipticValue wzeta(Complex x, const Lattice& L) {
  const auto r = detail::reduce(x, L);
  detail::check_pole(r, L, "wzeta");
  const Complex shift = 2.0 * double(r.m) * L.eta1 + 2.0 * double(r.n) * L.eta2();
  return {detail::eval_reduced(r.xr, L).zeta + shift, r.pole_distance};
}

inline RealEllipticValue wzeta(double x, const Lattice& L) {
  const auto r = detail::reduce(Complex(x, 0.0), L);
  detail::check_pole(r, L, "wzeta");
  return {detail::eval_reduced(r.xr.real(), L).zeta + 2.0 * double(r.m) * L.eta1,
          r.pole_distance};
}

// sigma is entire: never throws; value is exactly 0 on lattice points.
inline EllipticValue wsigma(Complex x, const Lattice& L) {
  const auto r = detail::reduce(x, L);
  if (r.pole_distance == 0.0) return {Complex(0.0, 0.0), 0.0};
  const double sign = ((r.m + r.n + r.m * r.n) % 2 == 0) ? 1.0 : -1.0;
  const Complex lam = 2.0 * double(r.m) * L.eta1 + 2.0 * double(r.n) * L.eta2();
  const Complex mid = r.xr + Complex(double(r.m) * L.omega1, double(r.n) * L.omega2_im);
  const Complex base = detail::eval_reduced(r.xr, L).sigma;
  return {sign * std::exp(lam * mid) * base, r.pole_distance};
}

inline RealEllipticValue wsigma(double x, const Lattice& L) {
  const auto r = detail::reduce(Complex(x, 0.0), L);
  if (r.pole_distance == 0.0) return {0.0, 0.0};
  const double sign = (r.m % 2 == 0) ? 1.0 : -1.0;
  const double lam = 2.0 * double(r.m) * L.eta1;
  const double mid = r.xr.real() + double(r.m) * L.omega1;
  return {sign * std::exp(lam * mid) * detail::eval_reduced(r.xr.real(), L).sigma,
          r.pole_distance};
}

// sigma'(x). Entire like sigma, so never throws; at lattice points the value
// is the nonzero transported derivative (sigma has simple zeros there).
inline EllipticValue wsigma_prime(Complex x, const Lattice& L) {
  const auto r = detail::reduce(x, L);
  const double sign = ((r.m + r.n + r.m * r.n) % 2 == 0) ? 1.0 : -1.0;
  const Complex lam = 2.0 * double(r.m) * L.eta1 + 2.0 * double(r.n) * L.eta2();
  const Complex mid = r.xr + Complex(double(r.m) * L.omega1, double(r.n) * L.omega2_im);
  const auto sp = detail::sigma_pair_reduced(r.xr, L);
  return {sign * std::exp(lam * mid) * (sp.sigma_prime + lam * sp.sigma),
          r.pole_distance};
}

inline RealEllipticValue wsigma_prime(double x, const Lattice& L) {
  const auto r = detail::reduce(Complex(x, 0.0), L);
  const double sign = (r.m % 2 == 0) ? 1.0 : -1.0;
  const double lam = 2.0 * double(r.m) * L.eta1;
  const double mid = r.xr.real() + double(r.m) * L.omega1;
  const auto sp = detail::sigma_pair_reduced(r.xr.real(), L);
  return {sign * std::exp(lam * mid) * (sp.sigma_prime + lam * sp.sigma),
          r.pole_distance};
}

// All four values at once with one reduction; used by the layers above.
struct EllipticPack {
  Complex p, dp, zeta, sigma;
  double nearest_pole_distance;
};

inline EllipticPack elliptic_pack(Complex x, const Lattice& L) {
  const auto r = detail::reduce(x, L);
  const auto w = detail::eval_reduced(r.xr, L);
  const double sign = ((r.m + r.n + r.m * r.n) % 2 == 0) ? 1.0 : -1.0;
  const Complex lam = 2.0 * double(r.m) * L.eta1 + 2.0 * double(r.n) * L.eta2();
  const Complex mid = r.xr + Complex(double(r.m) * L.omega1, double(r.n) * L.omega2_im);
  return {w.p, w.dp, w.zeta + lam, sign * std::exp(lam * mid) * w.sigma,
          r.pole_distance};
}

inline double nearest_pole_distance(Complex x, const Lattice& L) {
  return detail::reduce(x, L).pole_distance;
}

// --- series-only evaluations from raw invariants -----------------------------
//
// Direct Laurent/Taylor sums about the origin for arbitrary (g2, g3),
// including invariant pairs whose lattice is not rectangular. Only valid for
// |x| well inside the convergence disk (the implied lattice scale grows as
// the invariants shrink, so small-invariant limits are the intended use).

inline double wp_from_invariants(double x, double g2, double g3) {
  return detail::series_pack(x, detail::wp_series_coeffs(g2, g3)).p;
}

inline double wzeta_from_invariants(double x, double g2, double g3) {
  return detail::series_pack(x, detail::wp_series_coeffs(g2, g3)).zeta;
}

inline double wsigma_from_invariants(double x, double g2, double g3) {
  return detail::series_pack(x, detail::wp_series_coeffs(g2, g3)).sigma;
}

// --- rational degenerations (g2 = g3 = 0) ------------------------------------

template <typename U>
U wp_hat(U x) {
  return U(1.0) / (x * x);
}
template <typename U>
U wp_hat_prime(U x) {
  return U(-2.0) / (x * x * x);
}
template <typename U>
U wzeta_hat(U x) {
  return U(1.0) / x;
}
template <typename U>
U wsigma_hat(U x) {
  return x;
}

}  // namespace geogap
