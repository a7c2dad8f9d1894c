#include "uavcov/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

#include "uavcov/errors.hpp"

namespace uavcov {

namespace {

struct Segment {
  double a;
  double b;
  double value;
  double error;

  bool operator<(const Segment& other) const { return error < other.error; }
};

// 21-point Kronrod rule with its embedded 10-point Gauss rule, nodes from
// Boost. Error estimate follows QUADPACK's qk21.
Segment apply_rule(const std::function<double(double)>& f, double a, double b) {
  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
  using Gauss = boost::math::quadrature::gauss<double, 10>;
  const auto& x = Kronrod::abscissa();
  const auto& wk = Kronrod::weights();
  const auto& wg = Gauss::weights();

  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const std::size_t count = x.size();

  std::vector<double> fp(count), fm(count);
  fp[0] = fm[0] = f(center);
  for (std::size_t i = 1; i < count; ++i) {
    fp[i] = f(center + half * x[i]);
    fm[i] = f(center - half * x[i]);
  }

  double kronrod = fp[0] * wk[0];
  double abs_sum = std::abs(fp[0]) * wk[0];
  double gauss = 0.0;
  for (std::size_t i = 1; i < count; ++i) {
    kronrod += (fp[i] + fm[i]) * wk[i];
    abs_sum += (std::abs(fp[i]) + std::abs(fm[i])) * wk[i];
    if (i % 2 == 1) gauss += (fp[i] + fm[i]) * wg[i / 2];
  }
  const double mean = 0.5 * kronrod;
  double asc = std::abs(fp[0] - mean) * wk[0];
  for (std::size_t i = 1; i < count; ++i) {
    asc += (std::abs(fp[i] - mean) + std::abs(fm[i] - mean)) * wk[i];
  }

  const double value = kronrod * half;
  abs_sum *= std::abs(half);
  asc *= std::abs(half);
  double err = std::abs((kronrod - gauss) * half);
  if (asc != 0.0 && err != 0.0) {
    err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (abs_sum > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(50.0 * eps * abs_sum, err);
  }
  return {a, b, value, err};
}

}  // namespace

void QuadratureConfig::validate() const {
  if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be positive");
  if (!(abs_tol > 0.0)) throw std::invalid_argument("abs_tol must be positive");
  if (max_subdivisions == 0) throw std::invalid_argument("max_subdivisions must be >= 1");
}

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureConfig& cfg) {
  cfg.validate();
  if (a == b) return {};
  if (!(std::isfinite(a) && std::isfinite(b))) {
    throw std::invalid_argument("integrate: bounds must be finite");
  }

  std::priority_queue<Segment> heap;
  Segment first = apply_rule(f, a, b);
  double total = first.value;
  double total_err = first.error;
  heap.push(first);

  unsigned subdivisions = 0;
  auto converged = [&] { return total_err <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total)); };

  while (!converged()) {
    if (subdivisions >= cfg.max_subdivisions) {
      throw NumericError("integrate: tolerance not reached within max_subdivisions", total, total_err);
    }
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      throw NumericError("integrate: interval collapsed below machine resolution", total, total_err);
    }
    Segment left = apply_rule(f, worst.a, mid);
    Segment right = apply_rule(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }

  // Re-sum from the leaves to drop the drift of the incremental updates.
  double value = 0.0;
  double err = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {value, err, subdivisions};
}

}  // namespace uavcov
