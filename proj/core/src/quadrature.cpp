#include "bteb/quadrature.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "bteb/errors.hpp"
#include "bteb/numerics.hpp"

namespace bteb {
namespace {

// Kronrod nodes on [-1, 1], nonnegative half; odd indices are Gauss nodes.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrod = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGauss = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double lo;
  double hi;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment rule(const std::function<double(double)>& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(center);
  double kronrod = fc * kKronrod[7];
  double gauss = fc * kGauss[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kNodes[i];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kKronrod[i] * pair;
    if (i % 2 == 1) gauss += kGauss[i / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {lo, hi, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

QuadratureResult integrate_gk15(const std::function<double(double)>& f, double lo, double hi,
                                double rel_tol, double abs_tol, int max_intervals) {
  if (!(hi > lo)) throw DomainError("integrate_gk15 requires hi > lo");
  std::priority_queue<Segment> heap;
  heap.push(rule(f, lo, hi));
  double value = heap.top().value;
  double error = heap.top().error;
  int intervals = 1;
  while (error > std::max(abs_tol, rel_tol * std::abs(value))) {
    if (intervals >= max_intervals) {
      throw NumericError("adaptive quadrature exhausted its interval budget");
    }
    const Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    const Segment left = rule(f, worst.lo, mid);
    const Segment right = rule(f, mid, worst.hi);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
    // Guard against drift of the running totals.
    if (intervals % 64 == 0) {
      std::vector<Segment> all;
      CompensatedSum v;
      CompensatedSum e;
      while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
      }
      for (const auto& s : all) {
        v.add(s.value);
        e.add(s.error);
        heap.push(s);
      }
      value = v.value();
      error = e.value();
    }
  }
  return {value, error, intervals};
}

}  // namespace bteb
