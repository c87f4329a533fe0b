#include "tiltsense/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace tiltsense {

namespace {

struct Panel {
  double lo, hi, value, error, l1;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel evaluate(const std::function<double(double)>& f, double lo, double hi) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 61>;
  Panel p{lo, hi, 0.0, 0.0, 0.0};
  p.value = Rule::integrate(f, lo, hi, 0, 0.0, &p.error, &p.l1);
  // Boost reports a single panel's error on the reference interval [-1, 1].
  p.error *= 0.5 * (hi - lo);
  if (!std::isfinite(p.error)) p.error = 1e300;
  return p;
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& options) {
  const int panels = std::max(1, options.panels);
  const double step = (b - a) / panels;
  std::priority_queue<Panel> queue;
  double value = 0.0, error = 0.0, l1 = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + i * step;
    const double hi = i + 1 == panels ? b : lo + step;
    Panel p = evaluate(f, lo, hi);
    value += p.value;
    error += p.error;
    l1 += p.l1;
    queue.push(p);
  }
  const double eps = std::numeric_limits<double>::epsilon();
  auto target = [&] {
    return std::max({options.rel_tol * std::abs(value), 4.0 * eps * l1, options.abs_floor});
  };
  while (error > target() && static_cast<int>(queue.size()) < options.max_intervals) {
    Panel worst = queue.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) break;
    queue.pop();
    Panel left = evaluate(f, worst.lo, mid);
    Panel right = evaluate(f, mid, worst.hi);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    l1 += left.l1 + right.l1 - worst.l1;
    queue.push(left);
    queue.push(right);
  }
  // Re-sum to shed the drift of the running updates.
  QuadratureResult out{0.0, 0.0, 0.0, false, static_cast<int>(queue.size())};
  while (!queue.empty()) {
    out.value += queue.top().value;
    out.error += queue.top().error;
    out.l1 += queue.top().l1;
    queue.pop();
  }
  out.converged = out.error <=
                  std::max({options.rel_tol * std::abs(out.value), 4.0 * eps * out.l1, options.abs_floor});
  return out;
}

}  // namespace tiltsense
