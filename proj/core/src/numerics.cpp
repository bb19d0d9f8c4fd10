#include "bteb/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bteb/errors.hpp"

namespace bteb {
namespace {

constexpr int kMaxIterations = 10000;
constexpr double kRelTolerance = 1e-15;
constexpr double kTiny = 1e-300;

// lnGamma(s + 1) - [s ln s - s + 0.5 ln(2 pi s)].
double stirling_correction(double s) {
  if (s < 10.0) {
    return log_gamma(s + 1.0) -
           (s * std::log(s) - s + 0.5 * std::log(2.0 * std::numbers::pi * s));
  }
  const double inv = 1.0 / s;
  const double inv2 = inv * inv;
  // Bernoulli-number series, truncated well below double precision at s >= 10.
  return inv *
         (1.0 / 12.0 +
          inv2 * (-1.0 / 360.0 +
                  inv2 * (1.0 / 1260.0 +
                          inv2 * (-1.0 / 1680.0 +
                                  inv2 * (1.0 / 1188.0 +
                                          inv2 * (-691.0 / 360360.0 + inv2 * (1.0 / 156.0)))))));
}

// ln[x^s e^{-x} / Gamma(s + 1)] for s > 0, x > 0.
double log_poisson_prefix(double s, double x) {
  const double t = (x - s) / s;
  return s * log1pmx(t) - 0.5 * std::log(2.0 * std::numbers::pi * s) - stirling_correction(s);
}

[[noreturn]] void iteration_cap(const char* which, double s, double x) {
  std::ostringstream msg;
  msg << which << " did not converge within " << kMaxIterations << " iterations (s=" << s
      << ", x=" << x << ")";
  throw NumericError(msg.str());
}

// ln of sum_{n>=0} x^n / ((s+1)...(s+n)); P(s,x) = prefix * series.
double log_lower_series(double s, double x) {
  double term = 1.0;
  double sum = 1.0;
  double ap = s;
  for (int n = 0; n < kMaxIterations; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (term < sum * kRelTolerance) {
      return std::log(sum);
    }
  }
  iteration_cap("incomplete gamma series", s, x);
}

// ln of the continued fraction h with Q(s,x) = x^s e^{-x} / Gamma(s) * h.
double log_upper_fraction(double s, double x) {
  double b = x + 1.0 - s;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIterations; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kRelTolerance) {
      return std::log(h);
    }
  }
  iteration_cap("incomplete gamma continued fraction", s, x);
}

void check_gamma_args(double s, double x) {
  if (!(s > 0.0) || !(x >= 0.0) || !std::isfinite(s) || !std::isfinite(x)) {
    std::ostringstream msg;
    msg << "incomplete gamma requires s > 0 and x >= 0 (s=" << s << ", x=" << x << ")";
    throw DomainError(msg.str());
  }
}

}  // namespace

LogReal LogReal::from_linear(double x) {
  if (!(x >= 0.0)) throw DomainError("LogReal::from_linear requires a nonnegative value");
  return LogReal{x == 0.0 ? kLogZero : std::log(x)};
}

double LogReal::linear() const { return std::exp(value_); }

LogReal operator+(LogReal a, LogReal b) { return LogReal{log_add_exp(a.value_, b.value_)}; }

LogReal operator*(LogReal a, LogReal b) {
  if (a.is_zero() || b.is_zero()) return LogReal::zero();
  return LogReal{a.value_ + b.value_};
}

double log_gamma(double z) {
  if (!(z > 0.0) || std::isnan(z)) {
    std::ostringstream msg;
    msg << "log_gamma requires z > 0 (z=" << z << ")";
    throw DomainError(msg.str());
  }
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(z, &sign);
#else
  return std::lgamma(z);
#endif
}

double log1pmx(double t) {
  if (!(t > -1.0)) throw DomainError("log1pmx requires t > -1");
  if (std::abs(t) > 0.25) return std::log1p(t) - t;
  // -t^2/2 + t^3/3 - ...
  double power = t * t;
  double sum = -power / 2.0;
  for (int k = 3; k < 200; ++k) {
    power *= -t;
    const double term = -power / k;
    sum += term;
    if (std::abs(term) <= std::abs(sum) * 1e-17) break;
  }
  return sum;
}

double log_reg_lower_gamma(double s, double x) {
  check_gamma_args(s, x);
  if (x == 0.0) return kLogZero;
  if (x < s + 1.0) {
    return log_poisson_prefix(s, x) + log_lower_series(s, x);
  }
  const double log_q = log_poisson_prefix(s, x) + std::log(s) + log_upper_fraction(s, x);
  return std::log1p(-std::exp(log_q));
}

double log_reg_upper_gamma(double s, double x) {
  check_gamma_args(s, x);
  if (x == 0.0) return 0.0;
  if (x < s + 1.0) {
    const double log_p = log_poisson_prefix(s, x) + log_lower_series(s, x);
    return std::log1p(-std::exp(log_p));
  }
  return log_poisson_prefix(s, x) + std::log(s) + log_upper_fraction(s, x);
}

double reg_lower_gamma(double s, double x) {
  check_gamma_args(s, x);
  if (x == 0.0) return 0.0;
  double p = 0.0;
  if (x < s + 1.0) {
    p = std::exp(log_poisson_prefix(s, x) + log_lower_series(s, x));
  } else {
    p = -std::expm1(log_poisson_prefix(s, x) + std::log(s) + log_upper_fraction(s, x));
  }
  return std::clamp(p, 0.0, 1.0);
}

double log_exp_partial(std::int64_t j, double x) {
  if (j < 0 || !(x >= 0.0) || !std::isfinite(x)) {
    throw DomainError("log_exp_partial requires j >= 0 and finite x >= 0");
  }
  if (x == 0.0) return 0.0;
  const double lx = std::log(x);
  // Terms rise up to k = floor(x) and fall afterwards.
  const auto peak = std::min<std::int64_t>(j, static_cast<std::int64_t>(std::floor(x)));
  const double log_max = peak * lx - log_gamma(static_cast<double>(peak) + 1.0);
  CompensatedSum sum;
  for (std::int64_t k = 0; k <= j; ++k) {
    const double lt = k * lx - log_gamma(static_cast<double>(k) + 1.0) - log_max;
    if (k > peak && lt < -40.0) break;
    sum.add(std::exp(lt));
  }
  return log_max + std::log(sum.value());
}

double log_diff_exp(double la, double lb) {
  if (lb == kLogZero) {
    if (la == kLogZero) throw DomainError("log_diff_exp: both arguments are log(0)");
    return la;
  }
  if (!(la > lb)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "log_diff_exp requires la > lb (la=" << la << ", lb=" << lb << ")";
    throw DomainError(msg.str());
  }
  const double d = lb - la;
  if (d > -std::numbers::ln2) return la + std::log(-std::expm1(d));
  return la + std::log1p(-std::exp(d));
}

double log_add_exp(double la, double lb) {
  if (la == kLogZero) return lb;
  if (lb == kLogZero) return la;
  const double hi = std::max(la, lb);
  const double lo = std::min(la, lb);
  return hi + std::log1p(std::exp(lo - hi));
}

double log_sum_exp(std::span<const double> terms) {
  double hi = kLogZero;
  for (double t : terms) hi = std::max(hi, t);
  if (hi == kLogZero) return kLogZero;
  CompensatedSum sum;
  for (double t : terms) sum.add(std::exp(t - hi));
  return hi + std::log(sum.value());
}

}  // namespace bteb
