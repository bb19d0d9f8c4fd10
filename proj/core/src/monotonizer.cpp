#include "bteb/monotonizer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bteb/bt_dist.hpp"
#include "bteb/errors.hpp"
#include "bteb/numerics.hpp"

namespace bteb {
namespace {

// First x with source(x) > 0, or cap + 1.
std::int64_t first_positive(const EstimatorTable& source) {
  const auto& v = source.values();
  const auto it = std::find_if(v.begin(), v.end(), [](double t) { return t > 0.0; });
  return source.r() + static_cast<std::int64_t>(it - v.begin());
}

std::vector<double> zero_limit_column(const EstimatorTable& source) {
  const std::int64_t x0 = first_positive(source);
  std::vector<double> col(source.size());
  for (std::size_t i = 0; i < col.size(); ++i) {
    col[i] = source.r() + static_cast<std::int64_t>(i) < x0 ? 1.0 : 0.0;
  }
  return col;
}

// Evaluates D* columns for one source, reusing ln c_r(x).
class ColumnEvaluator {
 public:
  explicit ColumnEvaluator(const EstimatorTable& source) : source_(source) {
    log_coeff_.resize(source.size());
    for (std::size_t i = 0; i < log_coeff_.size(); ++i) {
      log_coeff_[i] = log_coeff(source.r(), source.r() + static_cast<std::int64_t>(i));
    }
    pmf_.resize(source.size());
    survival_.resize(source.size() + 1);
  }

  // a in (0, 1].
  void column(double a, bool left_limit, std::vector<double>& out) {
    const std::size_t n = pmf_.size();
    const double la = std::log(a);
    for (std::size_t i = 0; i < n; ++i) {
      pmf_[i] = std::exp(log_coeff_[i] + static_cast<double>(i) * la -
                         a * static_cast<double>(source_.r() + static_cast<std::int64_t>(i)));
    }
    CompensatedSum tail;
    survival_[n] = 0.0;
    for (std::size_t i = n; i-- > 0;) {
      tail.add(pmf_[i]);
      survival_[i] = tail.value();
    }
    // Truncated mass of {x : source(x) > a}, or >= a for the left limit.
    CompensatedSum excluded;
    const auto& v = source_.values();
    for (std::size_t i = 0; i < n; ++i) {
      if (left_limit ? v[i] >= a : v[i] > a) excluded.add(pmf_[i]);
    }
    const double beta = excluded.value();
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (beta > survival_[i]) {
        out[i] = 0.0;
      } else if (beta < survival_[i + 1]) {
        out[i] = 1.0;
      } else if (pmf_[i] > 0.0) {
        out[i] = std::clamp((survival_[i] - beta) / pmf_[i], 0.0, 1.0);
      } else {
        out[i] = 0.0;
      }
    }
  }

  const std::vector<double>& pmf() const { return pmf_; }

 private:
  const EstimatorTable& source_;
  std::vector<double> log_coeff_;
  std::vector<double> pmf_;
  std::vector<double> survival_;
};

}  // namespace

ActionGrid::ActionGrid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 101) throw DomainError("ActionGrid needs at least 100 intervals");
  if (points_.front() != 0.0 || points_.back() != 1.0) {
    throw DomainError("ActionGrid endpoints must be exactly 0 and 1");
  }
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i] > points_[i - 1])) throw DomainError("ActionGrid must be strictly increasing");
  }
}

ActionGrid ActionGrid::uniform(int intervals) {
  if (intervals < 100) throw DomainError("ActionGrid needs at least 100 intervals");
  std::vector<double> p(static_cast<std::size_t>(intervals) + 1);
  for (int i = 0; i <= intervals; ++i) p[static_cast<std::size_t>(i)] = static_cast<double>(i) / intervals;
  p.back() = 1.0;
  return ActionGrid(std::move(p));
}

double MonotoneRule::dstar_at_grid(std::size_t i, std::int64_t x) const {
  if (x < source.r() || x > source.cap()) throw DomainError("x outside monotone rule support");
  return dstar.at(i * width + static_cast<std::size_t>(x - source.r()));
}

double alpha_at(double a, const EstimatorTable& source) {
  if (!(a >= 0.0 && a <= 1.0)) throw DomainError("alpha_at requires a in [0, 1]");
  if (a == 0.0) return source.at(source.r()) <= 0.0 ? 1.0 : 0.0;
  CompensatedSum sum;
  for (std::int64_t x = source.r(); x <= source.cap(); ++x) {
    if (source.at(x) <= a) sum.add(std::exp(log_pmf_raw(source.r(), a, x)));
  }
  return sum.value();
}

double dstar_at(const EstimatorTable& source, double a, std::int64_t x, double alpha_a) {
  if (!(a >= 0.0 && a <= 1.0)) throw DomainError("dstar_at requires a in [0, 1]");
  if (x < source.r() || x > source.cap()) throw DomainError("dstar_at requires x in [r, cap]");
  if (a == 1.0) return 1.0;
  if (a == 0.0) return x < first_positive(source) ? 1.0 : 0.0;
  CompensatedSum below;
  for (std::int64_t k = source.r(); k < x; ++k) below.add(std::exp(log_pmf_raw(source.r(), a, k)));
  const double p = std::exp(log_pmf_raw(source.r(), a, x));
  const double f_prev = below.value();
  below.add(p);
  const double f_here = below.value();
  if (alpha_a < f_prev) return 0.0;
  if (f_here < alpha_a) return 1.0;
  if (!(p > 0.0)) {
    if (alpha_a > f_prev && alpha_a < f_here) {
      std::ostringstream msg;
      msg << "D* denominator underflow (x=" << x << ", a=" << a << ")";
      throw NumericError(msg.str());
    }
    return 0.0;
  }
  return std::clamp((alpha_a - f_prev) / p, 0.0, 1.0);
}

std::vector<double> dstar_column(const EstimatorTable& source, double a, bool left_limit) {
  if (!(a >= 0.0 && a <= 1.0)) throw DomainError("dstar_column requires a in [0, 1]");
  if (a == 0.0) return zero_limit_column(source);
  if (a == 1.0 && !left_limit) return std::vector<double>(source.size(), 1.0);
  ColumnEvaluator eval(source);
  std::vector<double> out;
  eval.column(a, left_limit, out);
  return out;
}

MonotoneRule monotonize(const EstimatorTable& source, const ActionGrid& grid) {
  const std::size_t width = source.size();
  const auto& points = grid.points();
  const std::size_t rows = points.size();

  // Jump locations of alpha: values attained by the source inside (0, 1).
  std::vector<double> breaks;
  for (double v : source.values()) {
    if (v > 0.0 && v < 1.0) breaks.push_back(v);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  ColumnEvaluator eval(source);
  std::vector<double> alpha(rows);
  std::vector<double> dstar(rows * width);
  std::vector<double> running = zero_limit_column(source);
  std::vector<double> integral(width, 0.0);
  std::vector<double> column;
  double max_adjustment = 0.0;
  double prev_a = 0.0;

  alpha[0] = alpha_at(0.0, source);
  std::copy(running.begin(), running.end(), dstar.begin());

  // Folds a freshly evaluated column at action a into the running cdf and
  // the Stieltjes sum, crediting the increment at `where`.
  const auto absorb = [&](double where) {
    for (std::size_t i = 0; i < width; ++i) {
      double d = column[i];
      if (d < running[i]) {
        max_adjustment = std::max(max_adjustment, running[i] - d);
        d = running[i];
      }
      integral[i] += where * (d - running[i]);
      running[i] = d;
    }
  };

  std::size_t next_break = 0;
  for (std::size_t row = 1; row < rows; ++row) {
    const double a_grid = points[row];
    // Breakpoints strictly inside (prev grid point, a_grid], then a_grid.
    while (true) {
      const bool take_break = next_break < breaks.size() && breaks[next_break] <= a_grid;
      const double a = take_break ? breaks[next_break] : a_grid;
      const bool is_break = take_break;
      if (a == 1.0) {
        eval.column(1.0, true, column);
        absorb(0.5 * (prev_a + 1.0));
        column.assign(width, 1.0);
        absorb(1.0);
      } else if (is_break) {
        eval.column(a, true, column);
        absorb(0.5 * (prev_a + a));
        eval.column(a, false, column);
        absorb(a);
      } else {
        eval.column(a, false, column);
        absorb(0.5 * (prev_a + a));
      }
      prev_a = a;
      if (is_break) {
        ++next_break;
        if (a == a_grid) break;
      } else {
        break;
      }
    }
    if (a_grid == 1.0) {
      alpha[row] = alpha_at(1.0, source);
    } else {
      CompensatedSum s;
      for (std::size_t i = 0; i < width; ++i) {
        if (source.values()[i] <= a_grid) s.add(eval.pmf()[i]);
      }
      alpha[row] = s.value();
    }
    std::copy(running.begin(), running.end(), dstar.begin() + static_cast<std::ptrdiff_t>(row * width));
  }

  if (max_adjustment > kMaxCdfAdjustment) {
    std::ostringstream msg;
    msg << "D* cdf-ization adjusted a value by " << max_adjustment << " (limit " << kMaxCdfAdjustment
        << "); grid too coarse or inconsistent source";
    throw NumericError(msg.str());
  }
  for (double& t : integral) t = std::clamp(t, 0.0, 1.0);
  EstimatorTable result(source.r(), source.cap(), std::move(integral), EstimatorTable::Label::monotone_eb);
  return MonotoneRule{source, grid, std::move(alpha), std::move(dstar), width, max_adjustment, std::move(result)};
}

double expected_dstar(const MonotoneRule& rule, double a) {
  if (!(a >= 0.0 && a <= 1.0)) throw DomainError("expected_dstar requires a in [0, 1]");
  const auto col = dstar_column(rule.source, a);
  if (a == 0.0) return col[0];
  CompensatedSum s;
  for (std::size_t i = 0; i < col.size(); ++i) {
    s.add(col[i] * std::exp(log_pmf_raw(rule.source.r(), a, rule.source.r() + static_cast<std::int64_t>(i))));
  }
  return s.value();
}

}  // namespace bteb
