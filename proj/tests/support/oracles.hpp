#pragma once

// Brute-force reference computations used by the test suites. Nothing here
// calls into the solvers it is used to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "fairreg/losses.hpp"

namespace fairreg::oracle {

struct GridMinimum {
  double argmin;
  double value;
};

/// Minimum of f over lo, lo + step, ..., hi.
inline GridMinimum grid_minimize(const std::function<double(double)>& f, double lo, double hi,
                                 double step) {
  GridMinimum best{lo, std::numeric_limits<double>::infinity()};
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long k = 0; k <= count; ++k) {
    const double q = lo + static_cast<double>(k) * step;
    const double v = f(q);
    if (v < best.value) best = {q, v};
  }
  return best;
}

/// min sum_i L(q_i, y_i) over non-decreasing q on the value grid
/// lo, lo + step, ..., hi. tied[i] holds the responses that must share q_i.
/// Dynamic programme over (position, grid value) with a running prefix minimum.
inline double monotone_grid_minimum(const LossSpec& spec,
                                    const std::vector<std::vector<double>>& tied, double lo,
                                    double hi, double step) {
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k) grid[k] = lo + static_cast<double>(k) * step;
  std::vector<double> best(count, 0.0);
  for (const auto& block : tied) {
    double prefix = std::numeric_limits<double>::infinity();
    std::vector<double> next(count);
    for (std::size_t k = 0; k < count; ++k) {
      prefix = std::min(prefix, best[k]);
      double cost = 0.0;
      for (double y : block) cost += loss_value(spec, grid[k], y);
      next[k] = prefix + cost;
    }
    best = std::move(next);
  }
  return *std::min_element(best.begin(), best.end());
}

/// Composite trapezoid rule with `panels` panels.
inline double trapezoid(const std::function<double(double)>& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double s = 0.5 * (f(a) + f(b));
  for (int k = 1; k < panels; ++k) s += f(a + k * h);
  return s * h;
}

/// Five-point Gauss-Legendre rule on [a, b]; exact for polynomials of degree <= 9.
inline double gauss_legendre5(const std::function<double(double)>& f, double a, double b) {
  static constexpr double nodes[5] = {0.0, -0.5384693101056831, 0.5384693101056831,
                                      -0.9061798459386640, 0.9061798459386640};
  static constexpr double weights[5] = {0.5688888888888889, 0.4786286704993665,
                                        0.4786286704993665, 0.2369268850561891,
                                        0.2369268850561891};
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (int k = 0; k < 5; ++k) s += weights[k] * f(mid + half * nodes[k]);
  return s * half;
}

}  // namespace fairreg::oracle
