#pragma once

// Scenario: the single configuration object the command-line tools consume.
//
// A scenario pins the potential, the spectral value, the metric parameters,
// and the numerical windows/tolerances, so that every output artifact can be
// reproduced from its manifest alone. Parsing is strict: unknown keys are
// configuration errors, not warnings, and every field that was defaulted is
// still written back out by to_json().
//
// Spectral value convention: the affine value z and the uniformizing value
// are carried as alternatives with the explicit maps z = 1/w^2 (rational,
// uniformizer w) and z = wp(z_unif) (one-gap). The rational scenario accepts
// either form; the one-gap scenario accepts only the uniformizing value,
// since inverting wp is not this module's business.

#include <array>
#include <cmath>
#include <string>

#include "geogap/elliptic.hpp"
#include "geogap/errors.hpp"
#include "geogap/metrize.hpp"
#include "geogap/schrodinger.hpp"
#include "json.hpp"

namespace geogap::scenario {

using nlohmann::json;

struct PotentialSpec {
  std::string kind = "rational";  // "rational" | "lame-g1"
  double gamma = 0.0;
  double g2 = 4.0;  // one-gap lattice invariants; ignored for rational
  double g3 = -1.0;
};

struct SpectralSpec {
  bool affine = true;  // which of the two fields is authoritative
  double z_affine = 1.0;
  double z_unif = 0.0;
};

struct MetricSpec {
  double r0 = 1.0;
  std::array<double, 2> a{0.0, 0.0};
  std::array<double, 3> b{0.0, -1.0, 0.0};
};

struct GridSpec {
  double x0 = 1.2, x1 = 3.0;
  double y0 = -1.0, y1 = 1.0;
  int nx = 50, ny = 50;
};

struct SpanSpec {
  double x0 = 0.5, x1 = 3.0;
  int samples = 201;
};

struct GeodesicSpec {
  std::string mode = "affine";  // "affine" | "hamiltonian" | "graph"
  double x0 = 1.6, y0 = -0.3;
  double dx0 = 1.0, dy0 = 0.0;        // affine initial velocity
  std::array<double, 2> p{0.4, 0.1};  // hamiltonian initial momenta
  std::array<double, 2> beta{1.0, 0.0};  // graph-mode basis coefficients
  double t_end = 10.0;
};

struct Tolerances {
  double rtol = 1e-10;
  double atol = 1e-12;
  double delta_margin = 1e-6;  // relative-Delta guard for geodesic flows
  double delta_min = 1e-8;     // absolute |Delta| admissibility for grids
  double stencil_h = 1e-3;     // curvature stencil step
  double stencil_tol = 1e-4;   // step-disagreement bound for trusting it
};

namespace detail {

inline void require_keys(const json& j, const char* where,
                         std::initializer_list<const char*> allowed) {
  if (!j.is_object())
    throw ConfigError(std::string(where) + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

inline double get_num(const json& j, const char* where, const char* key,
                      double fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number())
    throw ConfigError(std::string(key) + " in " + where + " must be a number");
  return v.get<double>();
}

inline int get_int(const json& j, const char* where, const char* key,
                   int fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer())
    throw ConfigError(std::string(key) + " in " + where + " must be an integer");
  return v.get<int>();
}

inline std::string get_str(const json& j, const char* where, const char* key,
                           const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_string())
    throw ConfigError(std::string(key) + " in " + where + " must be a string");
  return v.get<std::string>();
}

template <std::size_t N>
std::array<double, N> get_vec(const json& j, const char* where, const char* key,
                              std::array<double, N> fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != N)
    throw ConfigError(std::string(key) + " in " + where + " must be an array of " +
                      std::to_string(N) + " numbers");
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    if (!v[i].is_number())
      throw ConfigError(std::string(key) + " in " + where +
                        " must contain numbers only");
    out[i] = v[i].get<double>();
  }
  return out;
}

}  // namespace detail

struct Scenario {
  std::string name = "rational";
  PotentialSpec potential;
  SpectralSpec spectral;
  MetricSpec metric;
  GridSpec grid;
  SpanSpec span;
  GeodesicSpec geodesic;
  Tolerances tol;

  static Scenario builtin(const std::string& id) {
    Scenario s;  // defaults are the rational scenario
    s.name = id;
    if (id == "rational") return s;
    if (id == "flat") {
      // Degenerate tier of the same family: r0 = a1 = a2 = 0 forces zero
      // curvature. Delta is proportional to y^2 there, so the chart must
      // keep off the y = 0 line. The chart is indefinite and affine
      // geodesics can leave it in finite time; the default trace is the
      // vertical descent, which sits at infinite distance from y = 0 and
      // integrates for as long as asked.
      s.metric.r0 = 0.0;
      s.grid.y0 = 0.3;
      s.grid.y1 = 1.5;
      s.geodesic.x0 = 2.0;
      s.geodesic.y0 = 0.8;
      s.geodesic.dx0 = 0.0;
      s.geodesic.dy0 = -1.0;
      s.geodesic.p = {-0.05, -0.05};
      s.geodesic.t_end = 4.0;
      return s;
    }
    if (id == "lame-g1") {
      s.potential.kind = "lame-g1";
      s.potential.g2 = 4.0;
      s.potential.g3 = -1.0;
      s.spectral.affine = false;
      s.spectral.z_unif = 0.86;
      s.metric.r0 = 0.7;
      s.metric.a = {0.1, -0.2};
      s.metric.b = {0.3, -0.5, 0.2};
      s.grid = {0.5, 2.0, -0.8, 0.8, 40, 40};
      s.span = {0.4, 1.7, 201};
      s.geodesic.x0 = 1.0;
      s.geodesic.y0 = 0.2;
      s.geodesic.dx0 = -1.0;
      s.geodesic.dy0 = 0.1;
      s.geodesic.p = {-0.4, 0.1};
      s.geodesic.t_end = 8.0;
      return s;
    }
    throw ConfigError("unknown builtin scenario '" + id +
                      "' (have: rational, flat, lame-g1)");
  }

  static Scenario from_json(const json& j) {
    using namespace detail;
    require_keys(j, "scenario",
                 {"name", "potential", "spectral", "metric", "grid", "span",
                  "geodesic", "tolerances"});
    Scenario s;
    s.name = get_str(j, "scenario", "name", "custom");

    if (j.contains("potential")) {
      const auto& p = j.at("potential");
      require_keys(p, "potential", {"kind", "gamma", "g2", "g3"});
      s.potential.kind = get_str(p, "potential", "kind", s.potential.kind);
      if (s.potential.kind != "rational" && s.potential.kind != "lame-g1")
        throw ConfigError("potential.kind must be 'rational' or 'lame-g1'");
      s.potential.gamma = get_num(p, "potential", "gamma", s.potential.gamma);
      s.potential.g2 = get_num(p, "potential", "g2", s.potential.g2);
      s.potential.g3 = get_num(p, "potential", "g3", s.potential.g3);
    }

    if (j.contains("spectral")) {
      const auto& p = j.at("spectral");
      require_keys(p, "spectral", {"z_affine", "z_unif"});
      if (p.contains("z_affine") && p.contains("z_unif"))
        throw ConfigError("spectral takes z_affine or z_unif, not both");
      if (p.contains("z_unif")) {
        s.spectral.affine = false;
        s.spectral.z_unif = get_num(p, "spectral", "z_unif", 0.0);
      } else if (p.contains("z_affine")) {
        s.spectral.affine = true;
        s.spectral.z_affine = get_num(p, "spectral", "z_affine", 1.0);
      }
    }

    if (j.contains("metric")) {
      const auto& p = j.at("metric");
      require_keys(p, "metric", {"r0", "a", "b"});
      s.metric.r0 = get_num(p, "metric", "r0", s.metric.r0);
      s.metric.a = get_vec<2>(p, "metric", "a", s.metric.a);
      s.metric.b = get_vec<3>(p, "metric", "b", s.metric.b);
    }

    if (j.contains("grid")) {
      const auto& p = j.at("grid");
      require_keys(p, "grid", {"x", "y", "nx", "ny"});
      const auto xs = get_vec<2>(p, "grid", "x", {s.grid.x0, s.grid.x1});
      const auto ys = get_vec<2>(p, "grid", "y", {s.grid.y0, s.grid.y1});
      s.grid.x0 = xs[0];
      s.grid.x1 = xs[1];
      s.grid.y0 = ys[0];
      s.grid.y1 = ys[1];
      s.grid.nx = get_int(p, "grid", "nx", s.grid.nx);
      s.grid.ny = get_int(p, "grid", "ny", s.grid.ny);
      if (s.grid.nx < 2 || s.grid.ny < 2 || s.grid.x1 <= s.grid.x0 ||
          s.grid.y1 <= s.grid.y0)
        throw ConfigError("grid must have nx, ny >= 2 and increasing windows");
    }

    if (j.contains("span")) {
      const auto& p = j.at("span");
      require_keys(p, "span", {"x", "samples"});
      const auto xs = get_vec<2>(p, "span", "x", {s.span.x0, s.span.x1});
      s.span.x0 = xs[0];
      s.span.x1 = xs[1];
      s.span.samples = get_int(p, "span", "samples", s.span.samples);
      if (s.span.samples < 2 || s.span.x1 <= s.span.x0)
        throw ConfigError("span must have samples >= 2 and x[1] > x[0]");
    }

    if (j.contains("geodesic")) {
      const auto& p = j.at("geodesic");
      require_keys(p, "geodesic",
                   {"mode", "x0", "y0", "dx0", "dy0", "p", "beta", "t_end"});
      s.geodesic.mode = get_str(p, "geodesic", "mode", s.geodesic.mode);
      if (s.geodesic.mode != "affine" && s.geodesic.mode != "hamiltonian" &&
          s.geodesic.mode != "graph")
        throw ConfigError("geodesic.mode must be affine, hamiltonian or graph");
      s.geodesic.x0 = get_num(p, "geodesic", "x0", s.geodesic.x0);
      s.geodesic.y0 = get_num(p, "geodesic", "y0", s.geodesic.y0);
      s.geodesic.dx0 = get_num(p, "geodesic", "dx0", s.geodesic.dx0);
      s.geodesic.dy0 = get_num(p, "geodesic", "dy0", s.geodesic.dy0);
      s.geodesic.p = get_vec<2>(p, "geodesic", "p", s.geodesic.p);
      s.geodesic.beta = get_vec<2>(p, "geodesic", "beta", s.geodesic.beta);
      s.geodesic.t_end = get_num(p, "geodesic", "t_end", s.geodesic.t_end);
      if (s.geodesic.t_end <= 0.0)
        throw ConfigError("geodesic.t_end must be positive");
    }

    if (j.contains("tolerances")) {
      const auto& p = j.at("tolerances");
      require_keys(p, "tolerances",
                   {"rtol", "atol", "delta_margin", "delta_min", "stencil_h",
                    "stencil_tol"});
      s.tol.rtol = get_num(p, "tolerances", "rtol", s.tol.rtol);
      s.tol.atol = get_num(p, "tolerances", "atol", s.tol.atol);
      s.tol.delta_margin =
          get_num(p, "tolerances", "delta_margin", s.tol.delta_margin);
      s.tol.delta_min = get_num(p, "tolerances", "delta_min", s.tol.delta_min);
      s.tol.stencil_h = get_num(p, "tolerances", "stencil_h", s.tol.stencil_h);
      s.tol.stencil_tol =
          get_num(p, "tolerances", "stencil_tol", s.tol.stencil_tol);
      for (double v : {s.tol.rtol, s.tol.atol, s.tol.delta_min, s.tol.stencil_h,
                       s.tol.stencil_tol})
        if (!(v > 0.0))
          throw ConfigError("tolerances must be positive");
      if (s.tol.delta_margin < 0.0)
        throw ConfigError("delta_margin must be non-negative");
    }

    return s;
  }

  json to_json() const {
    json spectral_j;
    if (spectral.affine)
      spectral_j = {{"z_affine", spectral.z_affine}};
    else
      spectral_j = {{"z_unif", spectral.z_unif}};
    return json{
        {"name", name},
        {"potential",
         {{"kind", potential.kind},
          {"gamma", potential.gamma},
          {"g2", potential.g2},
          {"g3", potential.g3}}},
        {"spectral", spectral_j},
        {"metric", {{"r0", metric.r0}, {"a", metric.a}, {"b", metric.b}}},
        {"grid",
         {{"x", {grid.x0, grid.x1}},
          {"y", {grid.y0, grid.y1}},
          {"nx", grid.nx},
          {"ny", grid.ny}}},
        {"span", {{"x", {span.x0, span.x1}}, {"samples", span.samples}}},
        {"geodesic",
         {{"mode", geodesic.mode},
          {"x0", geodesic.x0},
          {"y0", geodesic.y0},
          {"dx0", geodesic.dx0},
          {"dy0", geodesic.dy0},
          {"p", geodesic.p},
          {"beta", geodesic.beta},
          {"t_end", geodesic.t_end}}},
        {"tolerances",
         {{"rtol", tol.rtol},
          {"atol", tol.atol},
          {"delta_margin", tol.delta_margin},
          {"delta_min", tol.delta_min},
          {"stencil_h", tol.stencil_h},
          {"stencil_tol", tol.stencil_tol}}}};
  }

  schrodinger::SolutionBasis make_basis() const {
    if (potential.kind == "rational") {
      double w;
      if (spectral.affine) {
        if (!(spectral.z_affine > 0.0))
          throw ConfigError(
              "rational scenario with affine z <= 0 has no real uniformizer; "
              "give spectral.z_unif instead");
        w = 1.0 / std::sqrt(spectral.z_affine);
      } else {
        w = spectral.z_unif;
      }
      return schrodinger::SolutionBasis::rational(potential.gamma, w);
    }
    if (spectral.affine)
      throw ConfigError(
          "one-gap scenario takes the uniformizing spectral value "
          "(spectral.z_unif), not the affine one");
    const auto lat = Lattice::from_invariants(potential.g2, potential.g3);
    return schrodinger::SolutionBasis::lame_g1(lat, potential.gamma,
                                               spectral.z_unif);
  }

  metrize::MetricSurface make_surface() const {
    return metrize::MetricSurface(make_basis(), metric.r0, metric.a, metric.b);
  }
};

}  // namespace geogap::scenario
