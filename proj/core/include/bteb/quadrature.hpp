#pragma once

#include <functional>

namespace bteb {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

/// Adaptive Gauss-Kronrod (7/15) integration of f over [lo, hi].
///
/// Bisects the interval with the largest error estimate until the summed
/// estimate is below max(abs_tol, rel_tol * |value|). Throws NumericError if
/// max_intervals is exhausted first.
QuadratureResult integrate_gk15(const std::function<double(double)>& f, double lo, double hi,
                                double rel_tol, double abs_tol = 0.0, int max_intervals = 4000);

}  // namespace bteb
