#pragma once

#include <cstdint>
#include <vector>

#include "bteb/rng.hpp"

namespace bteb {

inline constexpr double kRiskTailEps = 1e-12;
inline constexpr double kSamplingTailEps = 1e-9;

// One Borel-Tanner law: r ancestors, offspring mean theta in (0, 1).
class BTParams {
 public:
  BTParams(int r, double theta);

  int r() const { return r_; }
  double theta() const { return theta_; }

 private:
  int r_;
  double theta_;
};

// Truncation point of the support {r, r+1, ...}.
// For every theta <= theta_max, 1 - F(cap; theta) <= tail_bound.
struct SupportCap {
  int r = 1;
  std::int64_t cap = 1;
  double theta_max = 0.0;
  double tail_bound = 0.0;

  std::int64_t size() const { return cap - r + 1; }
};

/// ln c_r(x) with c_r(x) = r x^{x-r-1} / (x-r)!. Exactly 0 at x = r.
double log_coeff(int r, std::int64_t x);

double log_pmf(const BTParams& p, std::int64_t x);

// Same formula without parameter validation; admits theta = 1, where the
// monotonizer needs the boundary value of the family.
double log_pmf_raw(int r, double theta, std::int64_t x);

/// F(x; theta), 0 below r, by compensated summation from r.
double cdf(const BTParams& p, std::int64_t x);

/// Smallest cap with 1 - F(cap; theta_max) <= eps.
///
/// The family is stochastically increasing in theta, so the cap also bounds
/// the tail for every smaller theta. Throws NumericError past 10^7.
SupportCap support_cap(int r, double theta_max, double eps);

struct TruncationCounter {
  std::uint64_t draws = 0;
  std::uint64_t truncated = 0;
};

// pmf and cdf prefix sums for one (r, theta) over [r, cap]. Immutable after
// construction, so it can be shared between threads.
class CdfTable {
 public:
  CdfTable(const BTParams& p, std::int64_t cap);

  const BTParams& params() const { return params_; }
  std::int64_t cap() const { return cap_; }
  double pmf(std::int64_t x) const;
  double cdf(std::int64_t x) const;

  // Inverse-cdf draw by binary search.
  std::int64_t sample(Rng& rng, TruncationCounter* counter = nullptr) const;

 private:
  BTParams params_;
  std::int64_t cap_;
  std::vector<double> pmf_;
  std::vector<double> cdf_;
};

/// Smallest x with F(x) >= U by sequential search from r. If U lies beyond
/// F(cap), returns cap and records a truncation event.
std::int64_t sample_inverse(const BTParams& p, Rng& rng, std::int64_t cap,
                            TruncationCounter* counter = nullptr);

/// Total progeny of a Galton-Watson process with r ancestors and
/// Poisson(theta) offspring.
std::int64_t sample_branching(const BTParams& p, Rng& rng);

}  // namespace bteb
