#include "bteb/eb_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bteb/bt_dist.hpp"
#include "bteb/errors.hpp"
#include "bteb/numerics.hpp"

namespace bteb {

EstimatorTable::EstimatorTable(int r, std::int64_t cap, std::vector<double> values, Label label)
    : r_(r), cap_(cap), values_(std::move(values)), label_(label) {
  if (r < 1 || cap < r) throw DomainError("EstimatorTable requires cap >= r >= 1");
  if (values_.size() != static_cast<std::size_t>(cap - r + 1)) {
    throw UsageError("EstimatorTable values must cover exactly x = r..cap");
  }
  for (double v : values_) {
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("EstimatorTable values must lie in [0, 1]");
  }
}

double EstimatorTable::at(std::int64_t x) const {
  if (x < r_ || x > cap_) {
    std::ostringstream msg;
    msg << "x=" << x << " outside estimator table [" << r_ << ", " << cap_ << "]";
    throw DomainError(msg.str());
  }
  return values_[static_cast<std::size_t>(x - r_)];
}

bool EstimatorTable::is_nondecreasing(double tolerance) const {
  for (std::size_t i = 1; i < values_.size(); ++i) {
    if (values_[i] < values_[i - 1] - tolerance) return false;
  }
  return true;
}

std::size_t EstimatorTable::descents() const {
  std::size_t n = 0;
  for (std::size_t i = 1; i < values_.size(); ++i) n += values_[i] < values_[i - 1];
  return n;
}

const char* to_string(EstimatorTable::Label label) {
  switch (label) {
    case EstimatorTable::Label::eb: return "eb";
    case EstimatorTable::Label::monotone_eb: return "monotone_eb";
    case EstimatorTable::Label::bayes: return "bayes";
    case EstimatorTable::Label::mle: return "mle";
  }
  return "unknown";
}

EBHistory::EBHistory(int r, std::span<const std::int64_t> observations) : r_(r) {
  if (r < 1) throw DomainError("EBHistory requires r >= 1");
  if (observations.empty()) throw DomainError("EBHistory requires at least one observation");
  for (const auto x : observations) {
    if (x < r) {
      std::ostringstream msg;
      msg << "observation " << x << " is below r=" << r;
      throw DomainError(msg.str());
    }
    ++counts_[x];
  }
  n_ = static_cast<std::int64_t>(observations.size());
}

std::int64_t EBHistory::count(std::int64_t x) const {
  const auto it = counts_.find(x);
  return it == counts_.end() ? 0 : it->second;
}

const char* to_string(QZeroConvention c) {
  switch (c) {
    case QZeroConvention::one: return "one";
    case QZeroConvention::zero: return "zero";
    case QZeroConvention::mle: return "mle";
  }
  return "unknown";
}

QZeroConvention parse_qzero(const std::string& text) {
  if (text == "one" || text == "1") return QZeroConvention::one;
  if (text == "zero" || text == "0") return QZeroConvention::zero;
  if (text == "mle") return QZeroConvention::mle;
  throw UsageError("qzero_convention must be one of: one, zero, mle");
}

double log_psi(const EBHistory& h, std::int64_t x) {
  if (x < h.r()) throw DomainError("psi requires x >= r");
  LogReal sum = LogReal::zero();
  for (auto it = h.counts().upper_bound(x); it != h.counts().end(); ++it) {
    const auto [value, count] = *it;
    sum += LogReal{std::log(static_cast<double>(count)) + log_coeff(1, value - x) -
                   log_coeff(h.r(), value)};
  }
  if (sum.is_zero()) return kLogZero;
  return sum.log() - std::log(static_cast<double>(h.n()));
}

double psi(const EBHistory& h, std::int64_t x) { return std::exp(log_psi(h, x)); }

double log_q(const EBHistory& h, std::int64_t x) {
  if (x < h.r()) throw DomainError("q requires x >= r");
  const auto c = h.count(x);
  if (c == 0) return kLogZero;
  return std::log(static_cast<double>(c)) - std::log(static_cast<double>(h.n())) - log_coeff(h.r(), x);
}

double q(const EBHistory& h, std::int64_t x) { return std::exp(log_q(h, x)); }

EstimatorTable eb_table(const EBHistory& h, std::int64_t cap, QZeroConvention convention) {
  if (cap < h.max_observation()) throw DomainError("eb_table requires cap >= max observation");
  const int r = h.r();
  std::vector<double> values(static_cast<std::size_t>(cap - r + 1));

  for (std::int64_t x = r; x <= cap; ++x) {
    const auto i = static_cast<std::size_t>(x - r);
    const double lq = log_q(h, x);
    if (lq == kLogZero) {
      switch (convention) {
        case QZeroConvention::one: values[i] = 1.0; break;
        case QZeroConvention::zero: values[i] = 0.0; break;
        case QZeroConvention::mle:
          values[i] = static_cast<double>(x - r) / static_cast<double>(x);
          break;
      }
      continue;
    }
    const double lpsi = log_psi(h, x);
    values[i] = lpsi == kLogZero ? 0.0 : std::min(std::exp(lpsi - lq), 1.0);
  }
  return EstimatorTable(r, cap, std::move(values), EstimatorTable::Label::eb);
}

}  // namespace bteb
