// Builds the rational-potential surface for a few values of r0 and tabulates
// the metric, the admissibility margin and both curvature routes along a
// horizontal line. The point of the table: K is constant and equals -r0 no
// matter where you look, while the metric itself is anything but constant.

#include <cstdio>

#include "geogap/metrize.hpp"
#include "geogap/scenario.hpp"

int main() {
  for (const double r0 : {-1.0, 0.5, 1.0}) {
    auto sc = geogap::scenario::Scenario::builtin("rational");
    sc.metric.r0 = r0;
    const auto surf = sc.make_surface();

    std::printf("r0 = %g (expect K = %g)\n", r0, -r0);
    std::printf("%8s %8s %12s %12s %12s %12s %12s %12s\n", "x", "y", "g11",
                "g12", "g22", "delta", "K_closed", "K_numeric");
    const double y = 0.15;
    for (int i = 0; i < 6; ++i) {
      const double x = 1.3 + 0.3 * i;
      const auto m = surf.metric(x, y);
      const auto kn = surf.gauss_curvature_numeric_checked(x, y);
      std::printf("%8.3f %8.3f %12.5g %12.5g %12.5g %12.5g %12.9f %12.9f\n",
                  x, y, m.g11, m.g12, m.g22, surf.delta(x, y),
                  surf.gauss_curvature_closed(x), kn.value);
    }
    std::printf("\n");
  }
  return 0;
}
