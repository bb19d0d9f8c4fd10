#include "bteb/prior.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

#include "bteb/errors.hpp"
#include "bteb/numerics.hpp"
#include "bteb/quadrature.hpp"

namespace bteb {
namespace {

constexpr double kBetaRelTol = 1e-10;

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

[[noreturn]] void cancellation(std::int64_t x, int m) {
  std::ostringstream msg;
  msg << "prior integral lost all precision (x=" << x << ", m=" << m << ")";
  throw NumericError(msg.str());
}

// ln of P(s, hi) - P(s, lo), choosing lower or upper tails so that the
// subtraction happens on the small side.
double log_gamma_increment(double s, double lo, double hi, std::int64_t x, int m) {
  try {
    if (hi < s + 1.0) {
      return log_diff_exp(log_reg_lower_gamma(s, hi), log_reg_lower_gamma(s, lo));
    }
    if (lo >= s + 1.0) {
      return log_diff_exp(log_reg_upper_gamma(s, lo), log_reg_upper_gamma(s, hi));
    }
  } catch (const DomainError&) {
    cancellation(x, m);
  }
  const double mass = -std::expm1(log_reg_upper_gamma(s, hi)) - std::exp(log_reg_lower_gamma(s, lo));
  if (!(mass > 0.0)) cancellation(x, m);
  return std::log(mass);
}

double log_uniform_integral(const UniformPrior& u, int r, std::int64_t x, int m) {
  const double k = static_cast<double>(x - r + m);
  const double xd = static_cast<double>(x);
  const double s = k + 1.0;
  return -std::log(u.b - u.a) + log_gamma(s) - s * std::log(xd) +
         log_gamma_increment(s, u.a * xd, u.b * xd, x, m);
}

double log_grid_integral(const GridPrior& g, int r, std::int64_t x, int m) {
  const double k = static_cast<double>(x - r + m);
  const double xd = static_cast<double>(x);
  std::vector<double> terms;
  terms.reserve(g.atoms.size());
  for (const auto& atom : g.atoms) {
    if (atom.weight <= 0.0) continue;
    terms.push_back(std::log(atom.weight) + (k == 0.0 ? 0.0 : k * std::log(atom.theta)) -
                    xd * atom.theta);
  }
  return log_sum_exp(terms);
}

// Integrates exp(log_f(u)) over u in [0, 1] after shifting by the largest
// sampled value, returning the log of the integral.
double log_integrate_unit(const std::function<double(double)>& log_f) {
  double shift = kLogZero;
  constexpr int kProbe = 512;
  for (int i = 1; i < kProbe; ++i) shift = std::max(shift, log_f(static_cast<double>(i) / kProbe));
  if (shift == kLogZero) return kLogZero;
  const auto scaled = [&](double u) {
    const double lf = log_f(u);
    return lf == kLogZero ? 0.0 : std::exp(lf - shift);
  };
  const QuadratureResult q = integrate_gk15(scaled, 0.0, 1.0, kBetaRelTol * 0.1);
  if (!(q.value > 0.0)) return kLogZero;
  return shift + std::log(q.value);
}

// theta^{p-1} (1-theta)^{w-1} e^{-x theta} / B(v, w) over (0, 1).
// Splits at the interior mode and removes integrable endpoint singularities
// by a power substitution.
double log_beta_integral(const BetaPrior& bp, int r, std::int64_t x, int m) {
  const double xd = static_cast<double>(x);
  const double p = static_cast<double>(x - r + m) + bp.v;
  const double w = bp.w;
  const double log_beta_fn = log_gamma(bp.v) + log_gamma(w) - log_gamma(bp.v + w);

  double split = 0.5;
  if (p > 1.0) {
    const double c = p - 1.0;
    const double b = c + (w - 1.0) + xd;
    const double disc = b * b - 4.0 * xd * c;
    if (disc >= 0.0) {
      const double root = 2.0 * c / (b + std::sqrt(disc));
      if (root > 0.0 && root < 1.0) split = std::clamp(root, 1e-3, 1.0 - 1e-3);
    }
  }

  const auto log_kernel = [&](double theta) {
    if (theta <= 0.0 || theta >= 1.0) return kLogZero;
    return (p - 1.0) * std::log(theta) + (w - 1.0) * std::log1p(-theta) - xd * theta - log_beta_fn;
  };

  // Lower piece [0, split].
  double lower = kLogZero;
  if (p < 1.0) {
    // theta = split * u^{1/p}; theta^{p-1} d theta = split^p / p du.
    const double log_scale = p * std::log(split) - std::log(p);
    lower = log_scale + log_integrate_unit([&](double u) {
              if (u <= 0.0) return kLogZero;
              const double theta = split * std::pow(u, 1.0 / p);
              return (w - 1.0) * std::log1p(-theta) - xd * theta - log_beta_fn;
            });
  } else {
    lower = std::log(split) + log_integrate_unit([&](double u) { return log_kernel(split * u); });
  }

  // Upper piece [split, 1].
  double upper = kLogZero;
  const double span = 1.0 - split;
  if (w < 1.0) {
    // 1 - theta = span * u^{1/w}; (1-theta)^{w-1} d theta = span^w / w du.
    const double log_scale = w * std::log(span) - std::log(w);
    upper = log_scale + log_integrate_unit([&](double u) {
              if (u <= 0.0) return kLogZero;
              const double theta = 1.0 - span * std::pow(u, 1.0 / w);
              return (p - 1.0) * std::log(theta) - xd * theta - log_beta_fn;
            });
  } else {
    upper = std::log(span) + log_integrate_unit([&](double u) { return log_kernel(split + span * u); });
  }
  const double total = log_add_exp(lower, upper);
  if (total == kLogZero) cancellation(x, m);
  return total;
}

}  // namespace

Prior Prior::uniform(double a, double b) {
  if (!(a >= 0.0 && a < b && b <= 1.0)) {
    throw DomainError("uniform prior requires 0 <= a < b <= 1");
  }
  return Prior{UniformPrior{a, b}};
}

Prior Prior::beta(double v, double w) {
  if (!(v > 0.0 && w > 0.0) || !std::isfinite(v) || !std::isfinite(w)) {
    throw DomainError("beta prior requires v > 0 and w > 0");
  }
  return Prior{BetaPrior{v, w}};
}

Prior Prior::grid(std::vector<GridAtom> atoms) {
  if (atoms.empty()) throw DomainError("grid prior needs at least one atom");
  CompensatedSum total;
  for (const auto& a : atoms) {
    if (!(a.theta > 0.0 && a.theta < 1.0)) throw DomainError("grid prior atoms must lie in (0, 1)");
    if (!(a.weight >= 0.0)) throw DomainError("grid prior weights must be nonnegative");
    total.add(a.weight);
  }
  if (std::abs(total.value() - 1.0) > 1e-12) {
    throw DomainError("grid prior weights must sum to 1");
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const GridAtom& l, const GridAtom& r) { return l.theta < r.theta; });
  return Prior{GridPrior{std::move(atoms)}};
}

Prior Prior::point_mass(double theta) { return grid({GridAtom{theta, 1.0}}); }

Prior::Kind Prior::kind() const {
  return std::visit(Overloaded{[](const UniformPrior&) { return Kind::uniform; },
                               [](const BetaPrior&) { return Kind::beta; },
                               [](const GridPrior&) { return Kind::grid; }},
                    params_);
}

const char* to_string(Prior::Kind kind) {
  switch (kind) {
    case Prior::Kind::uniform: return "uniform";
    case Prior::Kind::beta: return "beta";
    case Prior::Kind::grid: return "grid";
  }
  return "unknown";
}

double Prior::support_lo() const {
  return std::visit(Overloaded{[](const UniformPrior& u) { return u.a; },
                               [](const BetaPrior&) { return 0.0; },
                               [](const GridPrior& g) { return g.atoms.front().theta; }},
                    params_);
}

double Prior::support_hi() const {
  return std::visit(Overloaded{[](const UniformPrior& u) { return u.b; },
                               [](const BetaPrior&) { return 1.0; },
                               [](const GridPrior& g) { return g.atoms.back().theta; }},
                    params_);
}

double Prior::mean() const {
  return std::visit(Overloaded{[](const UniformPrior& u) { return 0.5 * (u.a + u.b); },
                               [](const BetaPrior& b) { return b.v / (b.v + b.w); },
                               [](const GridPrior& g) {
                                 CompensatedSum s;
                                 for (const auto& a : g.atoms) s.add(a.weight * a.theta);
                                 return s.value();
                               }},
                    params_);
}

double Prior::variance() const {
  return std::visit(Overloaded{[](const UniformPrior& u) { return (u.b - u.a) * (u.b - u.a) / 12.0; },
                               [](const BetaPrior& b) {
                                 const double s = b.v + b.w;
                                 return b.v * b.w / (s * s * (s + 1.0));
                               },
                               [this](const GridPrior& g) {
                                 const double mu = mean();
                                 CompensatedSum s;
                                 for (const auto& a : g.atoms) {
                                   s.add(a.weight * (a.theta - mu) * (a.theta - mu));
                                 }
                                 return s.value();
                               }},
                    params_);
}

double Prior::sample(Rng& rng) const {
  return std::visit(Overloaded{[&](const UniformPrior& u) { return u.a + (u.b - u.a) * rng.uniform01(); },
                               [&](const BetaPrior& b) {
                                 std::gamma_distribution<double> ga(b.v, 1.0);
                                 std::gamma_distribution<double> gb(b.w, 1.0);
                                 const double y1 = ga(rng);
                                 const double y2 = gb(rng);
                                 return y1 / (y1 + y2);
                               },
                               [&](const GridPrior& g) {
                                 const double u = rng.uniform01();
                                 double acc = 0.0;
                                 for (const auto& a : g.atoms) {
                                   acc += a.weight;
                                   if (u <= acc) return a.theta;
                                 }
                                 return g.atoms.back().theta;
                               }},
                    params_);
}

namespace {

// Shortest decimal that reads back to the same double.
std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string Prior::describe() const {
  std::ostringstream out;
  std::visit(Overloaded{[&](const UniformPrior& u) { out << "uniform(" << shortest(u.a) << "," << shortest(u.b) << ")"; },
                        [&](const BetaPrior& b) { out << "beta(" << shortest(b.v) << "," << shortest(b.w) << ")"; },
                        [&](const GridPrior& g) {
                          out << "grid(";
                          for (std::size_t i = 0; i < g.atoms.size(); ++i) {
                            if (i) out << ";";
                            out << shortest(g.atoms[i].theta) << ":" << shortest(g.atoms[i].weight);
                          }
                          out << ")";
                        }},
             params_);
  return out.str();
}

double log_weighted_integral(const Prior& g, int r, std::int64_t x, int m) {
  if (r < 1 || x < r) throw DomainError("log_weighted_integral requires x >= r >= 1");
  if (m < 0 || m > 2) throw DomainError("log_weighted_integral supports m in {0, 1, 2}");
  return std::visit(Overloaded{[&](const UniformPrior& u) { return log_uniform_integral(u, r, x, m); },
                               [&](const BetaPrior& b) { return log_beta_integral(b, r, x, m); },
                               [&](const GridPrior& gp) { return log_grid_integral(gp, r, x, m); }},
                    g.params());
}

}  // namespace bteb
