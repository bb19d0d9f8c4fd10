#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

namespace bteb {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// Natural logarithm of a nonnegative quantity. kLogZero stands for log(0).
class LogReal {
 public:
  constexpr LogReal() = default;
  constexpr explicit LogReal(double log_value) : value_(log_value) {}

  static constexpr LogReal zero() { return LogReal{kLogZero}; }
  static constexpr LogReal one() { return LogReal{0.0}; }
  static LogReal from_linear(double x);

  constexpr double log() const { return value_; }
  double linear() const;
  constexpr bool is_zero() const { return value_ == kLogZero; }

  // Sum of the underlying quantities.
  friend LogReal operator+(LogReal a, LogReal b);
  LogReal& operator+=(LogReal other) { return *this = *this + other; }

  // Product of the underlying quantities; zero annihilates.
  friend LogReal operator*(LogReal a, LogReal b);
  LogReal& operator*=(LogReal other) { return *this = *this * other; }

  friend constexpr bool operator==(LogReal a, LogReal b) = default;
  friend constexpr auto operator<=>(LogReal a, LogReal b) = default;

 private:
  double value_ = kLogZero;
};

/// ln Gamma(z) for z > 0.
double log_gamma(double z);

/// Regularized lower incomplete gamma P(s, x) = gamma(s, x) / Gamma(s).
///
/// Series expansion for x < s + 1, Lentz continued fraction for the upper
/// function otherwise. Both iterate until the relative increment drops below
/// 1e-15; exhausting the 10^4 iteration cap throws NumericError.
double reg_lower_gamma(double s, double x);

/// ln P(s, x), accurate when P is tiny. kLogZero at x = 0.
double log_reg_lower_gamma(double s, double x);

/// ln Q(s, x) = ln(1 - P(s, x)), accurate when Q is tiny.
double log_reg_upper_gamma(double s, double x);

/// ln sum_{k=0}^{j} x^k / k!, summed term by term in log space.
double log_exp_partial(std::int64_t j, double x);

/// ln(e^la - e^lb) for la > lb. Throws DomainError when la <= lb.
double log_diff_exp(double la, double lb);

/// ln(e^la + e^lb).
double log_add_exp(double la, double lb);

/// ln sum_i e^{terms[i]}; kLogZero for an empty span.
double log_sum_exp(std::span<const double> terms);

/// log1p(t) - t without cancellation near t = 0. Requires t > -1.
double log1pmx(double t);

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace bteb
