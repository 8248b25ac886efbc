#pragma once

// Shared explicit integrator core: embedded adaptive Runge-Kutta 5(4)
// (Dormand-Prince pair, FSAL) with quartic dense output. Every initial value
// problem in the library runs through this one stepper so tolerance semantics
// stay uniform. Supports forward and backward spans and an optional guard
// predicate that stops the trajectory at a bisected crossing.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "geogap/errors.hpp"

namespace geogap::ode {

struct Options {
  double rtol = 1e-10;
  double atol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  double first_step = 0.0;  // 0 means choose automatically
  std::size_t max_steps = 2'000'000;
};

struct Stats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
};

enum class Termination { reached_end, guard_stop };

template <std::size_t N>
using State = std::array<double, N>;

namespace dp {
// Dormand-Prince 5(4) tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// b - bhat (error weights).
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output weights for the quartic interpolant.
inline constexpr double d1 = -12715105075.0 / 11282082432.0;
inline constexpr double d3 = 87487479700.0 / 32700410799.0;
inline constexpr double d4 = -10690763975.0 / 1880347072.0;
inline constexpr double d5 = 701980252875.0 / 199316789632.0;
inline constexpr double d6 = -1453857185.0 / 822651844.0;
inline constexpr double d7 = 69997945.0 / 29380423.0;
}  // namespace dp

template <std::size_t N>
struct DenseStep {
  double t0 = 0.0, h = 0.0;  // signed step
  State<N> r1{}, r2{}, r3{}, r4{}, r5{};

  State<N> eval(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    State<N> y;
    for (std::size_t i = 0; i < N; ++i)
      y[i] = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
    return y;
  }
};

template <std::size_t N>
class DenseSolution {
 public:
  double t_begin = 0.0, t_end = 0.0;
  std::vector<DenseStep<N>> steps;
  Stats stats;
  Termination termination = Termination::reached_end;

  const State<N>& initial_state() const { return y0_; }
  State<N> final_state() const { return at(t_end); }

  State<N> at(double t) const {
    if (steps.empty()) return y0_;
    const double dir = steps.front().h > 0 ? 1.0 : -1.0;
    const double slack = 1e-9 * (std::abs(t_begin) + std::abs(t_end) + 1.0);
    if ((t - t_begin) * dir < -slack || (t - t_end) * dir > slack)
      throw OutOfDomain("dense solution queried outside its span");
    // Binary search for the step whose [t0, t0+h] contains t.
    std::size_t lo = 0, hi = steps.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi + 1) / 2;
      if ((t - steps[mid].t0) * dir >= 0.0)
        lo = mid;
      else
        hi = mid - 1;
    }
    return steps[lo].eval(t);
  }

  void set_initial(const State<N>& y0) { y0_ = y0; }

 private:
  State<N> y0_{};
};

namespace detail {

template <std::size_t N>
double error_norm(const State<N>& err, const State<N>& y0, const State<N>& y1,
                  double atol, double rtol) {
  double acc = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double q = err[i] / sc;
    acc += q * q;
  }
  return std::sqrt(acc / double(N));
}

template <std::size_t N, typename F>
double initial_step(F& f, double t0, const State<N>& y0, const State<N>& f0,
                    double dir, const Options& opt) {
  double dn0 = 0.0, dn1 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = opt.atol + opt.rtol * std::abs(y0[i]);
    dn0 += (y0[i] / sc) * (y0[i] / sc);
    dn1 += (f0[i] / sc) * (f0[i] / sc);
  }
  dn0 = std::sqrt(dn0 / double(N));
  dn1 = std::sqrt(dn1 / double(N));
  double h0 = (dn0 < 1e-5 || dn1 < 1e-5) ? 1e-6 : 0.01 * dn0 / dn1;
  State<N> y1, f1;
  for (std::size_t i = 0; i < N; ++i) y1[i] = y0[i] + dir * h0 * f0[i];
  f(t0 + dir * h0, y1, f1);
  double d2 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = opt.atol + opt.rtol * std::abs(y0[i]);
    const double q = (f1[i] - f0[i]) / sc;
    d2 += q * q;
  }
  d2 = std::sqrt(d2 / double(N)) / h0;
  const double dmax = std::max(dn1, d2);
  const double h1 = (dmax <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                    : std::pow(0.01 / dmax, 0.2);
  return std::min({100.0 * h0, h1, opt.max_step});
}

}  // namespace detail

// f(t, y, dydt); guard(t, y) -> true requests a stop at that crossing.
template <std::size_t N, typename F, typename Guard>
DenseSolution<N> integrate(F&& f, double t0, double t1, State<N> y0,
                           const Options& opt, Guard&& guard) {
  DenseSolution<N> sol;
  sol.t_begin = t0;
  sol.t_end = t0;
  sol.set_initial(y0);
  if (t1 == t0) return sol;
  const double dir = (t1 > t0) ? 1.0 : -1.0;

  State<N> k1, k2, k3, k4, k5, k6, k7, ytmp, y1, err;
  f(t0, y0, k1);
  sol.stats.rhs_evals = 1;
  double h = (opt.first_step > 0.0)
                 ? opt.first_step
                 : detail::initial_step<N>(f, t0, y0, k1, dir, opt);
  if (opt.first_step == 0.0) ++sol.stats.rhs_evals;
  h = std::min(h, std::abs(t1 - t0));

  double t = t0;
  bool fsal_valid = true;  // k1 holds f(t, y0)
  while ((t1 - t) * dir > 0.0) {
    if (sol.stats.accepted + sol.stats.rejected >= opt.max_steps)
      throw Error("integrate: step budget exhausted");
    const double eps = std::numeric_limits<double>::epsilon();
    if (h <= 16.0 * eps * std::max(std::abs(t), 1.0))
      throw StepSizeUnderflow("integrate: step size underflow at t=" +
                              std::to_string(t));
    bool last = false;
    if (h >= std::abs(t1 - t)) {
      h = std::abs(t1 - t);
      last = true;
    }
    const double hs = dir * h;  // signed

    if (!fsal_valid) {
      f(t, y0, k1);
      ++sol.stats.rhs_evals;
      fsal_valid = true;
    }
    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y0[i] + hs * dp::a21 * k1[i];
    f(t + dp::c2 * hs, ytmp, k2);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y0[i] + hs * (dp::a31 * k1[i] + dp::a32 * k2[i]);
    f(t + dp::c3 * hs, ytmp, k3);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y0[i] + hs * (dp::a41 * k1[i] + dp::a42 * k2[i] + dp::a43 * k3[i]);
    f(t + dp::c4 * hs, ytmp, k4);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y0[i] + hs * (dp::a51 * k1[i] + dp::a52 * k2[i] + dp::a53 * k3[i] +
                              dp::a54 * k4[i]);
    f(t + dp::c5 * hs, ytmp, k5);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y0[i] + hs * (dp::a61 * k1[i] + dp::a62 * k2[i] + dp::a63 * k3[i] +
                              dp::a64 * k4[i] + dp::a65 * k5[i]);
    f(t + hs, ytmp, k6);
    for (std::size_t i = 0; i < N; ++i)
      y1[i] = y0[i] + hs * (dp::a71 * k1[i] + dp::a73 * k3[i] + dp::a74 * k4[i] +
                            dp::a75 * k5[i] + dp::a76 * k6[i]);
    f(t + hs, y1, k7);
    sol.stats.rhs_evals += 6;

    for (std::size_t i = 0; i < N; ++i)
      err[i] = hs * (dp::e1 * k1[i] + dp::e3 * k3[i] + dp::e4 * k4[i] +
                     dp::e5 * k5[i] + dp::e6 * k6[i] + dp::e7 * k7[i]);
    const double en = detail::error_norm(err, y0, y1, opt.atol, opt.rtol);

    if (en <= 1.0) {
      DenseStep<N> step;
      step.t0 = t;
      step.h = hs;
      for (std::size_t i = 0; i < N; ++i) {
        const double ydiff = y1[i] - y0[i];
        const double bspl = hs * k1[i] - ydiff;
        step.r1[i] = y0[i];
        step.r2[i] = ydiff;
        step.r3[i] = bspl;
        step.r4[i] = ydiff - hs * k7[i] - bspl;
        step.r5[i] = hs * (dp::d1 * k1[i] + dp::d3 * k3[i] + dp::d4 * k4[i] +
                           dp::d5 * k5[i] + dp::d6 * k6[i] + dp::d7 * k7[i]);
      }
      sol.steps.push_back(step);
      ++sol.stats.accepted;

      const double t_new = last ? t1 : t + hs;
      if (guard(t_new, y1)) {
        // Bisect the first guard crossing inside this step.
        double lo = 0.0, hi = (t_new - t) / hs;
        for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
          const double mid = 0.5 * (lo + hi);
          const State<N> ym = step.eval(t + mid * hs);
          if (guard(t + mid * hs, ym))
            hi = mid;
          else
            lo = mid;
        }
        sol.t_end = t + hi * hs;
        sol.termination = Termination::guard_stop;
        return sol;
      }

      t = t_new;
      y0 = y1;
      k1 = k7;  // FSAL
      sol.t_end = t;
      const double fac = std::clamp(0.9 * std::pow(en > 0 ? en : 1e-10, -0.2), 0.2, 5.0);
      h = std::min(h * fac, opt.max_step);
    } else {
      ++sol.stats.rejected;
      const double fac = std::max(0.2, 0.9 * std::pow(en, -0.2));
      h *= fac;
      fsal_valid = true;  // k1 still matches (t, y0)
    }
  }
  sol.termination = Termination::reached_end;
  return sol;
}

template <std::size_t N, typename F>
DenseSolution<N> integrate(F&& f, double t0, double t1, const State<N>& y0,
                           const Options& opt = {}) {
  return integrate<N>(std::forward<F>(f), t0, t1, y0, opt,
                      [](double, const State<N>&) { return false; });
}

}  // namespace geogap::ode
