#include "bteb/bayes_rule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "bteb/errors.hpp"
#include "bteb/numerics.hpp"

namespace bteb {
namespace {

// ln(e^x - Exp_j(x)).
double log_exp_remainder(std::int64_t j, double x) {
  try {
    return log_diff_exp(x, log_exp_partial(j, x));
  } catch (const DomainError&) {
    std::ostringstream msg;
    msg << "e^x - Exp_j(x) cancelled to zero (j=" << j << ", x=" << x << ")";
    throw NumericError(msg.str());
  }
}

double log_binomial(int n, int k) {
  return log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0);
}

// ln of sum_k (-1)^k C(w-1,k) (base+k)! / x^{k+shift} [e^x - Exp_{base+k}(x)].
double log_alternating(int w, std::int64_t base, double x, int shift) {
  std::vector<double> positive;
  std::vector<double> negative;
  for (int k = 0; k < w; ++k) {
    const std::int64_t j = base + k;
    const double term = log_binomial(w - 1, k) + log_gamma(static_cast<double>(j) + 1.0) -
                        (k + shift) * std::log(x) + log_exp_remainder(j, x);
    (k % 2 == 0 ? positive : negative).push_back(term);
  }
  const double lp = log_sum_exp(positive);
  const double ln = log_sum_exp(negative);
  if (!(lp > ln)) throw NumericError("beta closed form: alternating sum is not positive");
  const double result = log_diff_exp(lp, ln);
  const double loss = lp - result;
  if (loss > std::log(1e6)) {
    throw NumericError("beta closed form: cancellation beyond 1e6 ulps; use the quadrature path");
  }
  return result;
}

struct PosteriorMoments {
  double mean;
  double second;
};

// Grid priors: weighted average around the heaviest atom. Going through
// exp(ln I_1 - ln I_0) would cost ~|ln I_0| ulps once one atom dominates.
PosteriorMoments grid_moments(const GridPrior& grid, int r, std::int64_t x) {
  const auto xd = static_cast<double>(x);
  const auto k = static_cast<double>(x - r);
  std::vector<double> lw(grid.atoms.size(), kLogZero);
  std::size_t ref = 0;
  for (std::size_t i = 0; i < lw.size(); ++i) {
    const auto& a = grid.atoms[i];
    if (a.weight > 0.0) lw[i] = std::log(a.weight) + k * std::log(a.theta) - xd * a.theta;
    if (lw[i] > lw[ref]) ref = i;
  }
  const double t0 = grid.atoms[ref].theta;
  CompensatedSum mass;
  CompensatedSum shift;
  CompensatedSum shift2;
  for (std::size_t i = 0; i < lw.size(); ++i) {
    if (lw[i] == kLogZero) continue;
    const double q = std::exp(lw[i] - lw[ref]);
    const double d = grid.atoms[i].theta - t0;
    mass.add(q);
    shift.add(q * d);
    shift2.add(q * d * d);
  }
  const double m1 = shift.value() / mass.value();
  const double m2 = shift2.value() / mass.value();
  // E[T^2] = t0^2 + 2 t0 E[T - t0] + E[(T - t0)^2]
  return {t0 + m1, t0 * t0 + 2.0 * t0 * m1 + m2};
}

PosteriorMoments moments(const Prior& g, int r, std::int64_t x) {
  if (const auto* grid = std::get_if<GridPrior>(&g.params())) return grid_moments(*grid, r, x);
  const double l0 = log_weighted_integral(g, r, x, 0);
  return {std::exp(log_weighted_integral(g, r, x, 1) - l0), std::exp(log_weighted_integral(g, r, x, 2) - l0)};
}

}  // namespace

double posterior_mean(const Prior& g, int r, std::int64_t x) {
  if (r < 1 || x < r) throw DomainError("posterior_mean requires x >= r >= 1");
  return std::clamp(moments(g, r, x).mean, g.support_lo(), g.support_hi());
}

double posterior_mean_uniform01(int r, std::int64_t x) {
  if (r < 1 || x < r) throw DomainError("posterior_mean_uniform01 requires x >= r >= 1");
  const auto xd = static_cast<double>(x);
  const std::int64_t j = x - r;
  return std::exp(std::log(static_cast<double>(j + 1)) - std::log(xd) + log_exp_remainder(j + 1, xd) -
                  log_exp_remainder(j, xd));
}

double posterior_mean_beta(int v, int w, int r, std::int64_t x) {
  if (v < 1 || w < 1) throw DomainError("posterior_mean_beta requires integer v, w >= 1");
  if (r < 1 || x < r) throw DomainError("posterior_mean_beta requires x >= r >= 1");
  const auto xd = static_cast<double>(x);
  const std::int64_t base = x - r + v;
  return std::exp(log_alternating(w, base, xd, 1) - log_alternating(w, base - 1, xd, 0));
}

BayesTable::BayesTable(Prior prior, SupportCap cap, std::vector<double> theta,
                       std::vector<double> second_moment, std::vector<double> marginal)
    : prior_(std::move(prior)),
      cap_(cap),
      theta_(std::move(theta)),
      second_moment_(std::move(second_moment)),
      marginal_(std::move(marginal)) {
  const auto n = static_cast<std::size_t>(cap_.size());
  if (theta_.size() != n || second_moment_.size() != n || marginal_.size() != n) {
    throw UsageError("BayesTable columns must cover exactly x = r..cap");
  }
}

std::size_t BayesTable::index(std::int64_t x) const {
  if (x < cap_.r || x > cap_.cap) {
    std::ostringstream msg;
    msg << "x=" << x << " outside Bayes table [" << cap_.r << ", " << cap_.cap << "]";
    throw DomainError(msg.str());
  }
  return static_cast<std::size_t>(x - cap_.r);
}

double BayesTable::missing_mass() const {
  CompensatedSum s;
  for (double m : marginal_) s.add(m);
  return 1.0 - s.value();
}

BayesTable build_bayes_table(const Prior& g, const SupportCap& cap, unsigned threads) {
  const int r = cap.r;
  const auto n = static_cast<std::size_t>(cap.size());
  std::vector<double> theta(n);
  std::vector<double> second(n);
  std::vector<double> marginal(n);

  const auto fill = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const std::int64_t x = r + static_cast<std::int64_t>(i);
      const PosteriorMoments pm = moments(g, r, x);
      theta[i] = std::clamp(pm.mean, g.support_lo(), g.support_hi());
      second[i] = std::max(pm.second, theta[i] * theta[i]);
      marginal[i] = std::exp(log_coeff(r, x) + log_weighted_integral(g, r, x, 0));
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    fill(0, n);
  } else {
    std::vector<std::jthread> workers;
    std::vector<std::exception_ptr> errors(threads);
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&, t] {
        try {
          fill(t * chunk, std::min(n, (t + 1) * chunk));
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    workers.clear();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  return BayesTable(g, cap, std::move(theta), std::move(second), std::move(marginal));
}

SupportCap risk_cap(const Prior& g, int r, double eps) {
  const double hi = g.support_hi();
  if (!(hi < 1.0)) {
    throw UsageError("prior support reaches 1; pass an explicit cap");
  }
  return support_cap(r, hi, eps);
}

}  // namespace bteb
