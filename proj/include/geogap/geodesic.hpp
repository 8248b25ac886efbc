#pragma once

// Geodesics of the constructed surfaces, three ways:
//
//   integrate_graph    geodesics as graphs y(x): by construction these are
//                      exactly the solutions of y'' = (u + z) y, so this
//                      delegates to the stationary-equation solver;
//   integrate_affine   the affine-parameter geodesic equation in the chart,
//                      second order in (x, y);
//   hamiltonian_flow   the cogeodesic flow in (x, y, p1, p2), whose
//                      Hamiltonian H = g^{ij} p_i p_j / 2 is a conserved
//                      quantity and a sharp integration diagnostic.
//
// All routes stop gracefully at the degenerate locus of the metric (guard on
// the scale-relative size of Delta) instead of integrating into the blowup.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "geogap/errors.hpp"
#include "geogap/metrize.hpp"
#include "geogap/ode.hpp"
#include "geogap/schrodinger.hpp"

namespace geogap::geodesic {

enum class Stop { reached_time, chart_boundary };

struct Sample {
  double t;
  double x, y;
  double dx, dy;   // velocities, also for the Hamiltonian route
  double speed;    // sqrt(|g(v, v)|)
  double energy;   // g(v, v) / 2, conserved along the flow
};

struct Trace {
  std::vector<Sample> samples;
  Stop termination = Stop::reached_time;
  double t_end = 0.0;
  bool hamiltonian = false;
  ode::DenseSolution<4> path;  // (x, y, dx, dy) or (x, y, p1, p2)
  ode::Stats stats;
};

struct FlowOptions {
  ode::Options ode{};
  // Scale the initial velocity to unit speed (|g(v,v)| = 1). Null initial
  // velocities (possible in the indefinite-signature range) cannot be
  // normalized and are rejected when this is on.
  bool normalize_velocity = true;
  // Stop when |Delta| falls under this fraction of its own terms.
  double delta_margin = 1e-6;
  // Hard floor passed to the metric evaluation inside the right-hand side;
  // kept tiny so the step controller, not an exception, handles approaches
  // to the degenerate locus.
  double hard_delta_min = 1e-300;
  std::size_t sample_count = 201;
};

namespace detail {

inline Sample make_sample(const metrize::MetricSurface& surf, double t,
                          const ode::State<4>& s, bool hamiltonian) {
  const auto m = surf.metric(s[0], s[1], 1e-300);
  double vx, vy;
  if (hamiltonian) {
    vx = m.inv11 * s[2] + m.inv12 * s[3];
    vy = m.inv12 * s[2] + m.inv22 * s[3];
  } else {
    vx = s[2];
    vy = s[3];
  }
  const double q = m.g11 * vx * vx + 2.0 * m.g12 * vx * vy + m.g22 * vy * vy;
  return {t, s[0], s[1], vx, vy, std::sqrt(std::abs(q)), 0.5 * q};
}

inline void fill_samples(const metrize::MetricSurface& surf, Trace& tr,
                         std::size_t count) {
  tr.samples.clear();
  if (count < 2) count = 2;
  for (std::size_t i = 0; i < count; ++i) {
    const double t =
        tr.path.t_begin +
        (tr.t_end - tr.path.t_begin) * double(i) / double(count - 1);
    tr.samples.push_back(
        make_sample(surf, t, tr.path.at(t), tr.hamiltonian));
  }
}

}  // namespace detail

// Geodesics as graphs: y'' = (u + z) y, the defining property of the surface.
inline schrodinger::WaveSolution integrate_graph(
    const metrize::MetricSurface& surf, double x0, double x1,
    schrodinger::WaveState init, const ode::Options& opt = {}) {
  return schrodinger::solve(surf.potential(), surf.z_affine(), x0, x1, init, opt);
}

inline Trace integrate_affine(const metrize::MetricSurface& surf, double x0,
                              double y0, double dx0, double dy0, double t1,
                              const FlowOptions& opt = {}) {
  {
    const auto m0 = surf.metric(x0, y0);  // default floor: bad starts throw
    const double q =
        m0.g11 * dx0 * dx0 + 2.0 * m0.g12 * dx0 * dy0 + m0.g22 * dy0 * dy0;
    if (opt.normalize_velocity) {
      if (std::abs(q) < 1e-14 * (dx0 * dx0 + dy0 * dy0))
        throw DegenerateParameters(
            "initial velocity is null; unit-speed normalization impossible");
      const double c = 1.0 / std::sqrt(std::abs(q));
      dx0 *= c;
      dy0 *= c;
    }
  }
  auto rhs = [&surf, &opt](double, const ode::State<4>& s, ode::State<4>& ds) {
    const auto m = surf.metric(s[0], s[1], opt.hard_delta_min);
    const double vx = s[2], vy = s[3];
    ds[0] = vx;
    ds[1] = vy;
    ds[2] = -(m.gamma.g111 * vx * vx + 2.0 * m.gamma.g112 * vx * vy +
              m.gamma.g122 * vy * vy);
    ds[3] = -(m.gamma.g211 * vx * vx + 2.0 * m.gamma.g212 * vx * vy +
              m.gamma.g222 * vy * vy);
  };
  auto guard = [&surf, &opt](double, const ode::State<4>& s) {
    return surf.relative_delta(s[0], s[1]) <= opt.delta_margin;
  };
  Trace tr;
  tr.path = ode::integrate<4>(rhs, 0.0, t1, ode::State<4>{x0, y0, dx0, dy0},
                              opt.ode, guard);
  tr.t_end = tr.path.t_end;
  tr.stats = tr.path.stats;
  tr.termination = tr.path.termination == ode::Termination::guard_stop
                       ? Stop::chart_boundary
                       : Stop::reached_time;
  detail::fill_samples(surf, tr, opt.sample_count);
  return tr;
}

inline Trace hamiltonian_flow(const metrize::MetricSurface& surf, double x0,
                              double y0, double p1, double p2, double t1,
                              const FlowOptions& opt = {}) {
  {
    const auto m0 = surf.metric(x0, y0);
    const double q = m0.inv11 * p1 * p1 + 2.0 * m0.inv12 * p1 * p2 +
                     m0.inv22 * p2 * p2;
    if (opt.normalize_velocity) {
      if (std::abs(q) < 1e-14 * (p1 * p1 + p2 * p2))
        throw DegenerateParameters(
            "initial momentum is null; unit-energy normalization impossible");
      const double c = 1.0 / std::sqrt(std::abs(q));
      p1 *= c;
      p2 *= c;
    }
  }
  auto rhs = [&surf, &opt](double, const ode::State<4>& s, ode::State<4>& ds) {
    const auto m = surf.metric(s[0], s[1], opt.hard_delta_min);
    const double w1 = m.inv11 * s[2] + m.inv12 * s[3];
    const double w2 = m.inv12 * s[2] + m.inv22 * s[3];
    ds[0] = w1;
    ds[1] = w2;
    // dp_k = (w^T dg/dx^k w) / 2, from d(g^{-1}) = -g^{-1} dg g^{-1}.
    ds[2] = 0.5 * (m.g11_x * w1 * w1 + 2.0 * m.g12_x * w1 * w2 +
                   m.g22_x * w2 * w2);
    ds[3] = 0.5 * (m.g11_y * w1 * w1 + 2.0 * m.g12_y * w1 * w2 +
                   m.g22_y * w2 * w2);
  };
  auto guard = [&surf, &opt](double, const ode::State<4>& s) {
    return surf.relative_delta(s[0], s[1]) <= opt.delta_margin;
  };
  Trace tr;
  tr.hamiltonian = true;
  tr.path = ode::integrate<4>(rhs, 0.0, t1, ode::State<4>{x0, y0, p1, p2},
                              opt.ode, guard);
  tr.t_end = tr.path.t_end;
  tr.stats = tr.path.stats;
  tr.termination = tr.path.termination == ode::Termination::guard_stop
                       ? Stop::chart_boundary
                       : Stop::reached_time;
  detail::fill_samples(surf, tr, opt.sample_count);
  return tr;
}

// Trace state at any parameter value, velocities included.
inline Sample state_at(const metrize::MetricSurface& surf, const Trace& tr,
                       double t) {
  return detail::make_sample(surf, t, tr.path.at(t), tr.hamiltonian);
}

// Parameter value where the trace crosses x = xq. Requires x(t) to move
// monotonically across xq; turning points make the graph picture break down
// (the geodesic is locally vertical there).
inline double t_at_x(const Trace& tr, double xq) {
  double lo = tr.path.t_begin, hi = tr.t_end;
  double xlo = tr.path.at(lo)[0], xhi = tr.path.at(hi)[0];
  if ((xq - xlo) * (xq - xhi) > 0.0)
    throw OutOfDomain("trace does not cross the requested x");
  for (int it = 0; it < 200 && lo != hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double xm = tr.path.at(mid)[0];
    if ((xq - xlo) * (xq - xm) <= 0.0) {
      hi = mid;
      xhi = xm;
    } else {
      lo = mid;
      xlo = xm;
    }
  }
  return 0.5 * (lo + hi);
}

inline double y_at_x(const Trace& tr, double xq) {
  return tr.path.at(t_at_x(tr, xq))[1];
}

// Residual of the graph equation y'' = (u + z) y along an affine trace,
// via the chain rule: y''(x) = (ydd xd - yd xdd) / xd^3.
inline double graph_residual(const metrize::MetricSurface& surf, const Trace& tr,
                             double t) {
  const auto s = tr.path.at(t);
  const auto m = surf.metric(s[0], s[1]);
  double vx, vy;
  if (tr.hamiltonian) {
    vx = m.inv11 * s[2] + m.inv12 * s[3];
    vy = m.inv12 * s[2] + m.inv22 * s[3];
  } else {
    vx = s[2];
    vy = s[3];
  }
  const double speed = std::hypot(vx, vy);
  if (std::abs(vx) < 1e-8 * speed)
    throw VerticalSegment("graph picture breaks down: dx/dt ~ 0 at t = " +
                          std::to_string(t));
  const double ax = -(m.gamma.g111 * vx * vx + 2.0 * m.gamma.g112 * vx * vy +
                      m.gamma.g122 * vy * vy);
  const double ay = -(m.gamma.g211 * vx * vx + 2.0 * m.gamma.g212 * vx * vy +
                      m.gamma.g222 * vy * vy);
  const double ypp = (ay * vx - vy * ax) / (vx * vx * vx);
  const double uz = surf.potential()(s[0]) + surf.z_affine();
  return ypp - uz * s[1];
}

}  // namespace geogap::geodesic
