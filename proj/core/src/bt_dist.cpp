#include "bteb/bt_dist.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "bteb/errors.hpp"
#include "bteb/numerics.hpp"

namespace bteb {
namespace {

constexpr std::int64_t kMaxCapSearch = 10'000'000;
constexpr std::int64_t kMaxProgeny = 100'000'000;

void check_support(int r, std::int64_t x) {
  if (x < r) {
    std::ostringstream msg;
    msg << "Borel-Tanner support starts at r=" << r << " (x=" << x << ")";
    throw DomainError(msg.str());
  }
}

}  // namespace

BTParams::BTParams(int r, double theta) : r_(r), theta_(theta) {
  if (r < 1) throw DomainError("BTParams requires r >= 1");
  if (!(theta > 0.0 && theta < 1.0)) {
    std::ostringstream msg;
    msg << "BTParams requires 0 < theta < 1 (theta=" << theta << ")";
    throw DomainError(msg.str());
  }
}

double log_coeff(int r, std::int64_t x) {
  if (r < 1) throw DomainError("log_coeff requires r >= 1");
  check_support(r, x);
  if (x == r) return 0.0;
  const auto xd = static_cast<double>(x);
  return std::log(static_cast<double>(r)) + static_cast<double>(x - r - 1) * std::log(xd) -
         log_gamma(static_cast<double>(x - r) + 1.0);
}

double log_pmf_raw(int r, double theta, std::int64_t x) {
  const double k = static_cast<double>(x - r);
  const double power = k == 0.0 ? 0.0 : k * std::log(theta);
  return log_coeff(r, x) + power - theta * static_cast<double>(x);
}

double log_pmf(const BTParams& p, std::int64_t x) {
  check_support(p.r(), x);
  return log_pmf_raw(p.r(), p.theta(), x);
}

double cdf(const BTParams& p, std::int64_t x) {
  if (x < p.r()) return 0.0;
  CompensatedSum sum;
  for (std::int64_t k = p.r(); k <= x; ++k) sum.add(std::exp(log_pmf(p, k)));
  return std::min(sum.value(), 1.0);
}

SupportCap support_cap(int r, double theta_max, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("support_cap requires 0 < eps < 1");
  const BTParams p(r, theta_max);
  CompensatedSum sum;
  for (std::int64_t x = r; x - r <= kMaxCapSearch; ++x) {
    sum.add(std::exp(log_pmf(p, x)));
    if (1.0 - sum.value() <= eps) return SupportCap{r, x, theta_max, eps};
  }
  std::ostringstream msg;
  msg << "support_cap search exceeded " << kMaxCapSearch << " points (r=" << r
      << ", theta_max=" << theta_max << ", eps=" << eps << ")";
  throw NumericError(msg.str());
}

CdfTable::CdfTable(const BTParams& p, std::int64_t cap) : params_(p), cap_(cap) {
  check_support(p.r(), cap);
  const auto n = static_cast<std::size_t>(cap - p.r() + 1);
  pmf_.resize(n);
  cdf_.resize(n);
  CompensatedSum sum;
  for (std::size_t i = 0; i < n; ++i) {
    pmf_[i] = std::exp(log_pmf(p, p.r() + static_cast<std::int64_t>(i)));
    sum.add(pmf_[i]);
    cdf_[i] = std::min(sum.value(), 1.0);
  }
}

double CdfTable::pmf(std::int64_t x) const {
  if (x < params_.r() || x > cap_) return 0.0;
  return pmf_[static_cast<std::size_t>(x - params_.r())];
}

double CdfTable::cdf(std::int64_t x) const {
  if (x < params_.r()) return 0.0;
  if (x > cap_) return cdf_.back();
  return cdf_[static_cast<std::size_t>(x - params_.r())];
}

std::int64_t CdfTable::sample(Rng& rng, TruncationCounter* counter) const {
  const double u = rng.uniform01();
  const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  if (counter) ++counter->draws;
  if (it == cdf_.end()) {
    if (counter) ++counter->truncated;
    return cap_;
  }
  return params_.r() + static_cast<std::int64_t>(it - cdf_.begin());
}

std::int64_t sample_inverse(const BTParams& p, Rng& rng, std::int64_t cap,
                            TruncationCounter* counter) {
  check_support(p.r(), cap);
  const double u = rng.uniform01();
  if (counter) ++counter->draws;
  CompensatedSum sum;
  for (std::int64_t x = p.r(); x <= cap; ++x) {
    sum.add(std::exp(log_pmf(p, x)));
    if (sum.value() >= u) return x;
  }
  if (counter) ++counter->truncated;
  return cap;
}

std::int64_t sample_branching(const BTParams& p, Rng& rng) {
  std::int64_t generation = p.r();
  std::int64_t total = p.r();
  while (generation > 0) {
    std::poisson_distribution<std::int64_t> offspring(p.theta() * static_cast<double>(generation));
    generation = offspring(rng);
    total += generation;
    if (total > kMaxProgeny) {
      throw NumericError("branching sampler exceeded 10^8 individuals");
    }
  }
  return total;
}

}  // namespace bteb
