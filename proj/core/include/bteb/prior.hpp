#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bteb/rng.hpp"

namespace bteb {

struct UniformPrior {
  double a;
  double b;
};

struct BetaPrior {
  double v;
  double w;
};

struct GridAtom {
  double theta;
  double weight;
};

struct GridPrior {
  std::vector<GridAtom> atoms;
};

// Prior G on the offspring mean. Construct through the named factories,
// which validate parameters.
class Prior {
 public:
  enum class Kind { uniform, beta, grid };

  static Prior uniform(double a, double b);
  static Prior beta(double v, double w);
  static Prior grid(std::vector<GridAtom> atoms);
  static Prior point_mass(double theta);

  Kind kind() const;
  const std::variant<UniformPrior, BetaPrior, GridPrior>& params() const { return params_; }

  // Closed convex hull of the support.
  double support_lo() const;
  double support_hi() const;
  double mean() const;
  double variance() const;

  double sample(Rng& rng) const;

  // "uniform(0.5,0.8)" etc., used in output metadata.
  std::string describe() const;

 private:
  explicit Prior(std::variant<UniformPrior, BetaPrior, GridPrior> p) : params_(std::move(p)) {}
  std::variant<UniformPrior, BetaPrior, GridPrior> params_;
};

const char* to_string(Prior::Kind kind);

/// ln I_m(x) with I_m(x) = integral of theta^{x-r+m} e^{-x theta} dG(theta).
///
/// m must be 0, 1 or 2. Uniform priors go through the regularized incomplete
/// gamma function, grid priors through log-sum-exp over atoms, beta priors
/// through adaptive Gauss-Kronrod quadrature.
double log_weighted_integral(const Prior& g, int r, std::int64_t x, int m);

}  // namespace bteb
