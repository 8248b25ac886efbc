// One geodesic, three ways: affine equation, Hamiltonian flow, and the
// second-order graph equation y'' = (u + z) y. The first two are integrated
// in a parameter, the third directly in x; all three have to agree as curves.

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "geogap/geodesic.hpp"
#include "geogap/scenario.hpp"

int main() {
  const auto sc = geogap::scenario::Scenario::builtin("rational");
  const auto surf = sc.make_surface();
  const auto basis = sc.make_basis();

  // seed all three routes from the same graph germ: the first basis solution
  const double x0 = 0.75;
  const auto v = basis.eval(x0);
  const double y0 = v.s1, dy0 = v.ds1;

  const auto wave = geogap::geodesic::integrate_graph(surf, x0, 2.75, {y0, dy0});

  geogap::geodesic::FlowOptions fo;
  fo.normalize_velocity = false;  // graphs of basis solutions can be null
  const auto aff =
      geogap::geodesic::integrate_affine(surf, x0, y0, 1.0, dy0, 40.0, fo);
  const auto m = surf.metric(x0, y0);
  const auto ham = geogap::geodesic::hamiltonian_flow(
      surf, x0, y0, m.g11 + m.g12 * dy0, m.g12 + m.g22 * dy0, 40.0, fo);

  // the parametrized routes run on a time budget; compare on what they reached
  const double x_hi = std::min({2.75, aff.samples.back().x,
                                ham.samples.back().x}) -
                      1e-3;

  std::printf("%8s %14s %14s %14s %12s\n", "x", "y_graph", "y_affine",
              "y_hamilton", "spread");
  for (int i = 0; i <= 10; ++i) {
    const double x = x0 + (x_hi - x0) * i / 10.0;
    const double yg = wave.at(x).y;
    const double ya = geogap::geodesic::y_at_x(aff, x);
    const double yh = geogap::geodesic::y_at_x(ham, x);
    const double spread =
        std::max(std::abs(ya - yg), std::abs(yh - yg));
    std::printf("%8.3f %14.9f %14.9f %14.9f %12.3e\n", x, yg, ya, yh, spread);
  }

  // and the closed form this particular germ has to reproduce
  std::printf("\ny(1) = %.12f, closed form 2/e = %.12f\n", wave.at(1.0).y,
              2.0 * std::exp(-1.0));
  return 0;
}
