#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "geogap/elliptic.hpp"
#include "geogap/errors.hpp"

namespace geogap::lame {

using Rational = boost::multiprecision::cpp_rational;

/** Polynomial in the spectral parameter z with exact rational coefficients.
 *
 * The recurrence below divides by exact integers only, so keeping the table
 * rational makes it bit-stable; doubles convert in exactly (they are binary
 * rationals). Coefficients are stored in ascending powers of z.
 */
struct ZPoly {
  std::vector<Rational> c;

  int degree() const { return static_cast<int>(c.size()) - 1; }  // -1 if zero
  Rational coeff(int k) const {
    return (k >= 0 && k < static_cast<int>(c.size())) ? c[k] : Rational(0);
  }
  double eval(double z) const {
    double v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * z + it->convert_to<double>();
    return v;
  }
  void trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
  }
  friend bool operator==(const ZPoly& a, const ZPoly& b) {
    ZPoly x = a, y = b;
    x.trim();
    y.trim();
    return x.c == y.c;
  }
};

namespace detail {

inline ZPoly zp_axpy(const ZPoly& a, const Rational& w, const ZPoly& b) {
  ZPoly r = a;
  if (r.c.size() < b.c.size()) r.c.resize(b.c.size(), Rational(0));
  for (std::size_t k = 0; k < b.c.size(); ++k) r.c[k] += w * b.c[k];
  r.trim();
  return r;
}

inline ZPoly zp_scale(const ZPoly& a, const Rational& w) {
  ZPoly r = a;
  for (auto& v : r.c) v *= w;
  r.trim();
  return r;
}

inline ZPoly zp_shift(const ZPoly& a) {  // multiply by z
  ZPoly r;
  r.c.assign(a.c.size() + 1, Rational(0));
  for (std::size_t k = 0; k < a.c.size(); ++k) r.c[k + 1] = a.c[k];
  r.trim();
  return r;
}

inline ZPoly zp_mul(const ZPoly& a, const ZPoly& b) {
  ZPoly r;
  if (a.c.empty() || b.c.empty()) return r;
  r.c.assign(a.c.size() + b.c.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.c.size(); ++i)
    for (std::size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
  r.trim();
  return r;
}

inline ZPoly zp_reflect(const ZPoly& a) {  // z -> -z
  ZPoly r = a;
  for (std::size_t k = 1; k < r.c.size(); k += 2) r.c[k] = -r.c[k];
  return r;
}

}  // namespace detail

/** Finite-gap polynomial Q(x, z) of the Lame operator u = g(g+1) wp(x + shift).
 *
 * B holds the raw recurrence table B_g..B_0 (polynomials in z). The recurrence
 * couples z to the x-dependence with the opposite sign relative to the product
 * equation Q_xxx = 4(z+u)Q_x + 2u_x Q, so evaluation goes through the bridged
 * table Bm with z -> -z and an overall (-1)^g; the bridged polynomial solves
 * the product equation as written and its z-leading coefficient is `lead`
 * (equal to B_g / ((2g-1)!!)^2, so dividing by it makes Q monic in z).
 *
 * `shift` defaults to the imaginary half-period, which keeps the potential
 * real, smooth and periodic on the whole real axis. A real shift selects the
 * singular real branch instead; evaluation then only works between poles.
 * When the invariants admit no rectangular lattice the table is still valid;
 * evaluation is possible only in the cuspidal limit g2 = g3 = 0, where wp
 * degenerates to 1/x^2.
 */
struct QPolynomial {
  int g = 0;
  double g2 = 0.0, g3 = 0.0;
  std::vector<ZPoly> B;   // raw table, index s = 0..g
  std::vector<ZPoly> Bm;  // bridged table, same indexing
  Rational lead = 1;      // z^g coefficient of the bridged polynomial
  std::optional<Lattice> lattice;
  Complex shift{};

  struct Values {
    double q, qx, qxx, qxxx;  // bridged polynomial and x-derivatives
    double u, ux;             // potential g(g+1) wp and its derivative
    double scale;             // sum of |term| magnitudes of q, for zero tests
  };

  Values eval(double x, double z) const;
  // Same values divided by `lead`: monic in z, matching the curve and chi0.
  Values monic_values(double x, double z) const {
    Values v = eval(x, z);
    const double d = lead.convert_to<double>();
    v.q /= d;
    v.qx /= d;
    v.qxx /= d;
    v.qxxx /= d;
    v.scale /= std::abs(d);
    return v;
  }

  // Coefficients of the monic z-polynomial Q(x, .), ascending, degree g.
  std::vector<double> z_poly(double x) const;
  // Its zeros z_1(x) .. z_g(x), the projections of the eigenfunction divisor.
  std::vector<std::complex<double>> z_zeros(double x) const;

  QPolynomial with_shift(Complex s) const {
    QPolynomial q = *this;
    q.shift = s;
    return q;
  }

 private:
  struct WpChain {
    double p, dp, ddp, dddp;
  };
  WpChain wp_chain(double x) const;
};

/** Runs the top-down recurrence
 *
 *   B_s = (s+1) (8 B_{s+1} z - B_{s+2} g2 (s+2)(2s+3) - 2 B_{s+3} g3 (s+2)(s+3))
 *         / (4 (2s+1) (g(g+1) - s(s+1)))
 *
 * with B_g = Bg constant and B_m = 0 for m > g. The denominator never
 * vanishes for s < g. All arithmetic is exact.
 */
inline QPolynomial q_coefficients(int g, double g2, double g3, double Bg = 1.0) {
  if (g < 1) throw std::invalid_argument("q_coefficients: g must be >= 1");
  if (Bg == 0.0) throw DegenerateParameters("q_coefficients: B_g must not vanish");
  QPolynomial Q;
  Q.g = g;
  Q.g2 = g2;
  Q.g3 = g3;

  const Rational rg2(g2), rg3(g3);
  Q.B.assign(g + 1, ZPoly{});
  Q.B[g].c = {Rational(Bg)};
  const auto at = [&](int s) -> const ZPoly& {
    static const ZPoly zero{};
    return s <= g ? Q.B[s] : zero;
  };
  for (int s = g - 1; s >= 0; --s) {
    ZPoly num = detail::zp_scale(detail::zp_shift(at(s + 1)), Rational(8));
    num = detail::zp_axpy(num, -rg2 * (s + 2) * (2 * s + 3), at(s + 2));
    num = detail::zp_axpy(num, -2 * rg3 * (s + 2) * (s + 3), at(s + 3));
    const Rational den = Rational(4) * (2 * s + 1) * (g * (g + 1) - s * (s + 1));
    Q.B[s] = detail::zp_scale(num, Rational(s + 1) / den);
  }

  Q.Bm.resize(g + 1);
  const Rational sgn = (g % 2 == 0) ? Rational(1) : Rational(-1);
  for (int s = 0; s <= g; ++s) Q.Bm[s] = detail::zp_scale(detail::zp_reflect(Q.B[s]), sgn);
  Q.lead = Q.Bm[0].coeff(g);

  try {
    Q.lattice = Lattice::from_invariants(g2, g3);
  } catch (const DegenerateLattice&) {
  } catch (const NonRectangular&) {
  }
  if (Q.lattice) Q.shift = Q.lattice->omega2();
  return Q;
}

inline QPolynomial::WpChain QPolynomial::wp_chain(double x) const {
  double p, dp;
  if (lattice) {
    const Complex X = Complex(x, 0.0) + shift;
    const Complex pc = wp(X, *lattice).value;
    const Complex dpc = wp_prime(X, *lattice).value;
    // Real or half-period shifts keep the potential real; anything else is
    // outside the intended parameterization.
    const double scale = 1.0 + std::abs(pc.real()) + std::abs(dpc.real());
    if (std::abs(pc.imag()) > 1e-8 * scale || std::abs(dpc.imag()) > 1e-8 * scale)
      throw OutOfDomain("lame: shift does not keep the potential real");
    p = pc.real();
    dp = dpc.real();
  } else if (g2 == 0.0 && g3 == 0.0) {
    const double s = x + shift.real();
    if (std::abs(s) < 1e-12 * (1.0 + std::abs(shift.real())))
      throw NearPole("lame: cuspidal potential pole");
    p = 1.0 / (s * s);
    dp = -2.0 / (s * s * s);
  } else {
    throw DegenerateLattice("lame: invariants admit no rectangular lattice");
  }
  return {p, dp, 6.0 * p * p - 0.5 * g2, 12.0 * p * dp};
}

inline QPolynomial::Values QPolynomial::eval(double x, double z) const {
  const WpChain w = wp_chain(x);
  std::vector<double> pw(g + 1);
  pw[0] = 1.0;
  for (int s = 1; s <= g; ++s) pw[s] = pw[s - 1] * w.p;

  Values v{};
  for (int s = 0; s <= g; ++s) {
    const double b = Bm[s].eval(z);
    v.q += b * pw[s];
    v.scale += std::abs(b * pw[s]);
    if (s >= 1) {
      v.qx += b * s * pw[s - 1] * w.dp;
      v.qxx += b * s * pw[s - 1] * w.ddp;
      v.qxxx += b * s * pw[s - 1] * w.dddp;
    }
    if (s >= 2) {
      v.qxx += b * s * (s - 1) * pw[s - 2] * w.dp * w.dp;
      v.qxxx += b * 3.0 * s * (s - 1) * pw[s - 2] * w.dp * w.ddp;
    }
    if (s >= 3) v.qxxx += b * s * (s - 1) * (s - 2) * pw[s - 3] * w.dp * w.dp * w.dp;
  }
  const double uf = static_cast<double>(g) * (g + 1);
  v.u = uf * w.p;
  v.ux = uf * w.dp;
  return v;
}

inline std::vector<double> QPolynomial::z_poly(double x) const {
  const WpChain w = wp_chain(x);
  const double d = lead.convert_to<double>();
  std::vector<double> out(g + 1, 0.0);
  double ps = 1.0;
  for (int s = 0; s <= g; ++s) {
    for (int k = 0; k <= Bm[s].degree(); ++k)
      out[k] += Bm[s].c[k].convert_to<double>() * ps / d;
    ps *= w.p;
  }
  return out;
}

/** Residual of the product equation Q_xxx - 4(z+u)Q_x - 2 u_x Q at one point.
 * Linear in the table scale B_g. The derivatives of wp are all analytic
 * (wp'' = 6 wp^2 - g2/2, wp''' = 12 wp wp'), so the residual carries no
 * differencing noise.
 */
inline double q_ode_residual(const QPolynomial& Q, double x, double z) {
  const auto v = Q.eval(x, z);
  return std::abs(v.qxxx - 4.0 * (z + v.u) * v.qx - 2.0 * v.ux * v.q);
}

/** Hyperelliptic curve w^2 = z^{2g+1} + c_{2g} z^{2g} + ... + c_0, monic. */
struct SpectralCurveG {
  int g = 0;
  std::vector<double> coeffs;  // ascending, size 2g+2, coeffs[2g+1] = 1
  double spread = 0.0;         // worst relative x-variation seen in the fit

  double eval(double z) const {
    double v = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * z + *it;
    return v;
  }
  std::vector<std::complex<double>> branch_points() const;
};

namespace detail {

// Durand-Kerner on a monic polynomial with the given ascending coefficients.
inline std::vector<std::complex<double>> poly_roots(const std::vector<double>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  std::vector<std::complex<double>> r(n);
  const std::complex<double> seed(0.4, 0.9);
  r[0] = seed;
  for (int k = 1; k < n; ++k) r[k] = r[k - 1] * seed;
  const auto value = [&](std::complex<double> z) {
    std::complex<double> v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * z + *it;
    return v;
  };
  for (int it = 0; it < 500; ++it) {
    double moved = 0.0;
    for (int k = 0; k < n; ++k) {
      std::complex<double> den = 1.0;
      for (int j = 0; j < n; ++j)
        if (j != k) den *= r[k] - r[j];
      const std::complex<double> step = value(r[k]) / den;
      r[k] -= step;
      moved = std::max(moved, std::abs(step) / (1.0 + std::abs(r[k])));
    }
    if (moved < 1e-14) break;
  }
  std::sort(r.begin(), r.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return r;
}

inline std::vector<double> dp_mul(const std::vector<double>& a,
                                  const std::vector<double>& b) {
  std::vector<double> r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

// Example-2 closed form for g = 1, bridged to the monic convention. The
// printed formula lives on the reflected z axis and with the opposite sign of
// w^2; both flips are undone here, together with the lead^2 normalization.
inline std::vector<double> g1_closed_curve(const QPolynomial& Q) {
  const ZPoly& B0 = Q.B[0];
  const ZPoly& B1 = Q.B[1];
  const Rational rg2(Q.g2), rg3(Q.g3);
  ZPoly raw = zp_shift(zp_mul(B0, B0));         // B0^2 z
  raw = zp_scale(raw, Rational(4));             // 4 B0^2 z
  raw = zp_axpy(raw, -rg2, zp_mul(B0, B1));     // - B0 B1 g2   (B2 = 0 at g = 1)
  raw = zp_axpy(raw, rg3, zp_mul(B1, B1));      // + B1^2 g3
  raw = zp_scale(zp_reflect(raw), Rational(-1, 4) / (Q.lead * Q.lead));
  std::vector<double> out(4, 0.0);
  for (int k = 0; k <= raw.degree(); ++k) out[k] = raw.c[k].convert_to<double>();
  return out;
}

}  // namespace detail

inline std::vector<std::complex<double>> SpectralCurveG::branch_points() const {
  return detail::poly_roots(coeffs);
}

inline std::vector<std::complex<double>> QPolynomial::z_zeros(double x) const {
  return detail::poly_roots(z_poly(x));
}

/** Extracts the curve from the x-independence of 4(z+u)Q^2 + Q_x^2 - 2QQ_xx.
 *
 * The combination is computed as an exact polynomial in z at each of nx
 * sample abscissas (no z-sampling, no fitting conditioning), averaged, and
 * normalized to a monic right-hand side. A relative coefficient spread above
 * 1e-8 across the samples signals a broken identity, not a data problem, so
 * it throws. For g = 1 the result is cross-checked against the closed form
 * (4 B0^2 z - B0 (4 B2 g3 + B1 g2) + B1^2 g3)/4 from the recurrence table.
 */
inline SpectralCurveG spectral_curve(const QPolynomial& Q, int nx = 8) {
  const int deg = 2 * Q.g + 1;
  // Sample window: one real period when the shift is the imaginary
  // half-period (no real poles), otherwise the open cell between poles.
  double x0 = 0.0, span;
  if (Q.lattice) {
    span = 2.0 * Q.lattice->omega1;
    if (Q.shift.imag() == 0.0) x0 = -Q.shift.real();
  } else {
    span = 2.0;
    x0 = -Q.shift.real();
  }

  std::vector<std::vector<double>> fits;
  fits.reserve(nx);
  for (int i = 0; i < nx; ++i) {
    const double x = x0 + (i + 0.5) * span / nx;
    const auto w = Q.eval(x, 0.0);  // potential values; z enters symbolically
    const double uf = static_cast<double>(Q.g) * (Q.g + 1);
    const double p = w.u / uf, dp = w.ux / uf;
    const double ddp = 6.0 * p * p - 0.5 * Q.g2;
    std::vector<double> pw(Q.g + 1, 1.0);
    for (int s = 1; s <= Q.g; ++s) pw[s] = pw[s - 1] * p;
    // Build the z-polynomials q, q_x, q_xx at this x from the bridged table,
    // using d/dx p^s = s p^{s-1} p' and its derivative.
    std::vector<double> q(deg + 1, 0.0), qx(deg + 1, 0.0), qxx(deg + 1, 0.0);
    for (int s = 0; s <= Q.g; ++s) {
      const double ps1 = s >= 1 ? s * pw[s - 1] : 0.0;
      const double ps2 = s >= 2 ? s * (s - 1) * pw[s - 2] : 0.0;
      for (int k = 0; k <= Q.Bm[s].degree(); ++k) {
        const double b = Q.Bm[s].c[k].convert_to<double>();
        q[k] += b * pw[s];
        qx[k] += b * ps1 * dp;
        qxx[k] += b * (ps2 * dp * dp + ps1 * ddp);
      }
    }
    std::vector<double> r = detail::dp_mul(q, q);  // q^2, degree 2g
    r.resize(deg + 1, 0.0);
    std::vector<double> acc(deg + 1, 0.0);
    for (int k = deg; k >= 1; --k) acc[k] = r[k - 1];       // z q^2
    for (int k = 0; k <= deg; ++k) acc[k] += w.u * r[k];    // + u q^2
    const auto qx2 = detail::dp_mul(qx, qx);
    const auto qqxx = detail::dp_mul(q, qxx);
    for (std::size_t k = 0; k < qx2.size(); ++k) acc[k] += 0.25 * qx2[k];
    for (std::size_t k = 0; k < qqxx.size(); ++k) acc[k] -= 0.5 * qqxx[k];
    fits.push_back(std::move(acc));
  }

  SpectralCurveG curve;
  curve.g = Q.g;
  curve.coeffs.assign(deg + 1, 0.0);
  for (const auto& f : fits)
    for (int k = 0; k <= deg; ++k) curve.coeffs[k] += f[k] / nx;
  const double top = curve.coeffs[deg];
  for (auto& c : curve.coeffs) c /= top;

  double scale = 1.0;
  for (double c : curve.coeffs) scale = std::max(scale, std::abs(c));
  double spread = 0.0;
  for (const auto& f : fits)
    for (int k = 0; k <= deg; ++k)
      spread = std::max(spread, std::abs(f[k] / top - curve.coeffs[k]));
  curve.spread = spread / scale;
  if (curve.spread >= 1e-8)
    throw NotXIndependent("spectral_curve: conserved combination varies with x");

  if (Q.g == 1) {
    const auto closed = detail::g1_closed_curve(Q);
    for (int k = 0; k <= deg; ++k)
      if (std::abs(closed[k] - curve.coeffs[k]) > 1e-9 * scale)
        throw NotXIndependent("spectral_curve: g=1 closed form mismatch");
  }
  return curve;
}

struct Chi0Values {
  double value, derivative;
};

/** chi0 = Q_x/(2Q) + w/Q on the curve point (z, w); equals psi_x/psi for the
 * matching branch of the eigenfunction. Uses the monic normalization so that
 * w is measured on the curve returned by spectral_curve.
 */
inline Chi0Values chi0_values(double x, double z, double w, const QPolynomial& Q) {
  const auto v = Q.monic_values(x, z);
  // On-curve test against the same combination that defines the curve, at
  // this very x; no fit is involved.
  const double rhs =
      (4.0 * (z + v.u) * v.q * v.q + v.qx * v.qx - 2.0 * v.q * v.qxx) / 4.0;
  const double cs = std::max({1.0, std::abs(w * w), std::abs(rhs)});
  if (std::abs(w * w - rhs) > 1e-8 * cs)
    throw OffCurve("chi0: (z, w) does not satisfy the curve equation");
  if (std::abs(v.q) <= 1e-10 * v.scale) throw ZeroOfQ("chi0: Q(x, z) vanishes");
  return {v.qx / (2.0 * v.q) + w / v.q,
          v.qxx / (2.0 * v.q) - v.qx * v.qx / (2.0 * v.q * v.q) -
              w * v.qx / (v.q * v.q)};
}

inline double chi0(double x, double z, double w, const QPolynomial& Q) {
  return chi0_values(x, z, w, Q).value;
}

}  // namespace geogap::lame
