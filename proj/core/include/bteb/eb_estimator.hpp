#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace bteb {

// A rule x -> estimate on x = r..cap.
class EstimatorTable {
 public:
  enum class Label { eb, monotone_eb, bayes, mle };

  EstimatorTable(int r, std::int64_t cap, std::vector<double> values, Label label);

  int r() const { return r_; }
  std::int64_t cap() const { return cap_; }
  Label label() const { return label_; }
  std::size_t size() const { return values_.size(); }
  double at(std::int64_t x) const;
  const std::vector<double>& values() const { return values_; }

  bool is_nondecreasing(double tolerance = 0.0) const;
  // Number of x with value(x+1) < value(x).
  std::size_t descents() const;

 private:
  int r_;
  std::int64_t cap_;
  std::vector<double> values_;
  Label label_;
};

const char* to_string(EstimatorTable::Label label);

// Past observations X_1..X_n, kept as value -> multiplicity.
class EBHistory {
 public:
  EBHistory(int r, std::span<const std::int64_t> observations);

  int r() const { return r_; }
  std::int64_t n() const { return n_; }
  std::int64_t max_observation() const { return counts_.rbegin()->first; }
  std::int64_t count(std::int64_t x) const;
  const std::map<std::int64_t, std::int64_t>& counts() const { return counts_; }

 private:
  int r_;
  std::int64_t n_ = 0;
  std::map<std::int64_t, std::int64_t> counts_;
};

// Value assigned where no observation equals x (q_n(x) = 0).
enum class QZeroConvention { one, zero, mle };

const char* to_string(QZeroConvention c);
QZeroConvention parse_qzero(const std::string& text);

/// psi_n(x) = (1/n) sum_j c_1(X_j - x) 1{X_j >= x+1} / c_r(X_j).
double psi(const EBHistory& h, std::int64_t x);
double log_psi(const EBHistory& h, std::int64_t x);

/// q_n(x) = count(x) / (n c_r(x)).
double q(const EBHistory& h, std::int64_t x);
double log_q(const EBHistory& h, std::int64_t x);

/// min(psi/q, 1) where q > 0; the q = 0 convention elsewhere.
EstimatorTable eb_table(const EBHistory& h, std::int64_t cap,
                        QZeroConvention convention = QZeroConvention::one);

}  // namespace bteb
