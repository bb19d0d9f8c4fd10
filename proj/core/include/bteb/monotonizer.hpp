#pragma once

#include <cstdint>
#include <vector>

#include "bteb/eb_estimator.hpp"

namespace bteb {

inline constexpr int kDefaultGridIntervals = 2000;
inline constexpr double kMaxCdfAdjustment = 1e-3;

// Strictly increasing action points 0 = a_0 < ... < a_M = 1, M >= 100.
class ActionGrid {
 public:
  explicit ActionGrid(std::vector<double> points);
  static ActionGrid uniform(int intervals = kDefaultGridIntervals);

  const std::vector<double>& points() const { return points_; }
  int intervals() const { return static_cast<int>(points_.size()) - 1; }

 private:
  std::vector<double> points_;
};

// Result of monotonizing one estimator table.
//
// dstar holds D*(a_i; x) on the uniform grid after cdf-ization, stored row
// by row: dstar[i * width + (x - r)].
struct MonotoneRule {
  EstimatorTable source;
  ActionGrid grid;
  std::vector<double> alpha;
  std::vector<double> dstar;
  std::size_t width = 0;
  double max_adjustment = 0.0;
  EstimatorTable result;

  double dstar_at_grid(std::size_t i, std::int64_t x) const;
};

/// alpha(a) = sum over x in [r, cap] with source(x) <= a of p_r(x; a).
/// At a = 0 this is the limit 1{source(r) <= 0}.
double alpha_at(double a, const EstimatorTable& source);

/// D*(a; x) by the three-branch definition, with F evaluated directly.
/// D*(1; x) = 1; at a = 0 the limit from above.
double dstar_at(const EstimatorTable& source, double a, std::int64_t x, double alpha_a);

/// D*(a; .) for all x = r..cap, computed from upper-tail sums so that the
/// far tail keeps full relative precision. With left_limit the column is the
/// limit from below in a (values equal to a leave the index set).
std::vector<double> dstar_column(const EstimatorTable& source, double a, bool left_limit = false);

/// Monotone estimator theta*(x) = integral of a dD*(a; x).
///
/// Columns are cdf-ized in a (running maximum); an adjustment larger than
/// kMaxCdfAdjustment throws NumericError. Jumps of D* at a = 1 and at the
/// values attained by the source are integrated exactly; the continuous part
/// uses the midpoint rule on the grid.
MonotoneRule monotonize(const EstimatorTable& source, const ActionGrid& grid = ActionGrid::uniform());

/// sum_x D*(a; x) p_r(x; a) from the raw (pre-cdf-ization) column.
double expected_dstar(const MonotoneRule& rule, double a);

}  // namespace bteb
