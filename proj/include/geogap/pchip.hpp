#pragma once

// Shape-preserving cubic Hermite interpolant (Fritsch-Carlson slopes).
// Used for tabulated potentials: monotone data stays monotone, so a sampled
// barrier or well does not acquire spurious oscillations.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "geogap/errors.hpp"

namespace geogap::interp {

class Pchip {
 public:
  Pchip(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
      throw std::invalid_argument("Pchip: need >= 2 nodes and matching sizes");
    for (std::size_t i = 0; i + 1 < n; ++i)
      if (!(x_[i] < x_[i + 1]))
        throw std::invalid_argument("Pchip: abscissae must be strictly increasing");
    d_.resize(n);
    if (n == 2) {
      d_[0] = d_[1] = (y_[1] - y_[0]) / (x_[1] - x_[0]);
      return;
    }
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0.0) {
        d_[i] = 0.0;
      } else {
        const double w1 = 2.0 * h[i] + h[i - 1];
        const double w2 = h[i] + 2.0 * h[i - 1];
        d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
      }
    }
    d_[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
    d_[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  }

  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

  double value(double x) const {
    const auto [i, t, h] = locate(x);
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * d_[i] +
           (-2 * t3 + 3 * t2) * y_[i + 1] + (t3 - t2) * h * d_[i + 1];
  }

  double deriv(double x) const {
    const auto [i, t, h] = locate(x);
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * (y_[i] - y_[i + 1]) / h + (3 * t2 - 4 * t + 1) * d_[i] +
            (3 * t2 - 2 * t) * d_[i + 1]);
  }

  double deriv2(double x) const {
    const auto [i, t, h] = locate(x);
    return ((12 * t - 6) * (y_[i] - y_[i + 1]) / h + (6 * t - 4) * d_[i] +
            (6 * t - 2) * d_[i + 1]) /
           h;
  }

 private:
  struct Local {
    std::size_t i;
    double t, h;
  };

  Local locate(double x) const {
    if (x < x_.front() || x > x_.back())
      throw OutOfDomain("Pchip: query outside the tabulated range");
    std::size_t lo = 0, hi = x_.size() - 2;
    while (lo < hi) {
      const std::size_t mid = (lo + hi + 1) / 2;
      if (x >= x_[mid])
        lo = mid;
      else
        hi = mid - 1;
    }
    const double h = x_[lo + 1] - x_[lo];
    return {lo, (x - x_[lo]) / h, h};
  }

  // Non-centered three-point slope, clipped so the end interval stays monotone.
  static double edge_slope(double h0, double h1, double del0, double del1) {
    double d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if (d * del0 <= 0.0)
      d = 0.0;
    else if (del0 * del1 < 0.0 && std::abs(d) > 3.0 * std::abs(del0))
      d = 3.0 * del0;
    return d;
  }

  std::vector<double> x_, y_, d_;
};

}  // namespace geogap::interp
