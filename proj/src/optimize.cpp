#include "uavcov/optimize.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

#include "uavcov/errors.hpp"

namespace uavcov {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInvPhi = 0.6180339887498949;  // (sqrt(5) - 1) / 2

// Cardano-form root of x^3 + x / B - 1 / (B C) = 0 for a given radicand term
// r (1/(27 B^3) is the textbook value). The small difference q - s is formed
// as -r / (q + s) to avoid cancellation.
double cardano_root(double coef_B, double coef_C, double radicand_term) {
  const double half_q = 1.0 / (2.0 * coef_B * coef_C);
  const double s = std::sqrt(half_q * half_q + radicand_term);
  const double big = half_q + s;
  return std::cbrt(big) + std::cbrt(-radicand_term / big);
}

double stationarity(double x, const DensityCoeffs& c) {
  return -c.coef_B * c.coef_C * x * x * x - c.coef_C * x + 1.0;
}

}  // namespace

std::string_view to_string(OptimumMethod method) {
  switch (method) {
    case OptimumMethod::kCubicClosed:
      return "cubic-closed";
    case OptimumMethod::kGoldenSection:
      return "golden-section";
    case OptimumMethod::kGrid:
      return "grid";
  }
  return "unknown";
}

DensityCoeffs density_coeffs(double z, double theta, double beta0, double d0, double rho_value) {
  if (!(theta * beta0 > 0.0)) {
    throw std::domain_error("density_coeffs: the approximation needs theta * beta0 > 0");
  }
  if (!(d0 > 0.0) || !(z >= 0.0) || !(rho_value >= 0.0)) {
    throw std::domain_error("density_coeffs: parameter out of range");
  }
  const double noise = theta * beta0;
  const double d0_sq = d0 * d0;
  const double z_sq = z * z;
  DensityCoeffs c;
  c.coef_A = kPi * d0_sq / std::sqrt(2.0 * noise) * std::exp(-noise * z_sq * z_sq / (d0_sq * d0_sq));
  c.coef_B = kPi * kPi * (1.0 + rho_value) * (1.0 + rho_value) * d0_sq * d0_sq / (2.0 * noise);
  c.coef_C = kPi * rho_value * z_sq;
  return c;
}

DensityApprox coverage_density_approx(double lambda, const DensityCoeffs& coeffs) {
  if (!(lambda > 0.0)) throw std::domain_error("coverage_density_approx: lambda must be positive");
  DensityApprox out;
  out.value = coeffs.coef_A * lambda * std::exp(-coeffs.coef_C * lambda) /
              std::sqrt(1.0 + coeffs.coef_B * lambda * lambda);
  out.valid = std::sqrt(coeffs.coef_B) * lambda >= 3.0 && out.value <= 1.0;
  return out;
}

DensityOptimumClosed optimal_density_closed(const DensityCoeffs& coeffs) {
  if (!(coeffs.coef_B > 0.0) || !(coeffs.coef_C > 0.0)) {
    throw std::domain_error("optimal_density_closed: B and C must be positive");
  }
  // g(x) = B C x^3 + C x - 1 is strictly increasing with g(0) = -1 and
  // g(1/C) = B / C^2 > 0, so [0, 1/C] always brackets the single root.
  auto g = [&](double x) { return -stationarity(x, coeffs); };
  double lo = 0.0;
  double hi = 1.0 / coeffs.coef_C;
  std::uintmax_t iterations = 200;
  const auto bracket = boost::math::tools::toms748_solve(g, lo, hi, g(lo), g(hi),
                                                         boost::math::tools::eps_tolerance<double>(50),
                                                         iterations);
  if (iterations >= 200) {
    throw NumericError("optimal_density_closed: root finder did not converge",
                       0.5 * (bracket.first + bracket.second), bracket.second - bracket.first);
  }
  const double root = 0.5 * (bracket.first + bracket.second);

  DensityOptimumClosed out;
  out.optimum.argument = root;
  out.optimum.value = std::clamp(coverage_density_approx(root, coeffs).value, 0.0, 1.0);
  out.optimum.method = OptimumMethod::kCubicClosed;
  out.residual = std::abs(stationarity(root, coeffs));

  const double b3 = coeffs.coef_B * coeffs.coef_B * coeffs.coef_B;
  out.cardano_27 = cardano_root(coeffs.coef_B, coeffs.coef_C, 1.0 / (27.0 * b3));
  out.cardano_8 = cardano_root(coeffs.coef_B, coeffs.coef_C, 1.0 / (8.0 * b3));
  out.cardano_27_rel_gap = std::abs(out.cardano_27 - root) / root;
  out.cardano_8_rel_gap = std::abs(out.cardano_8 - root) / root;
  if (out.cardano_27_rel_gap <= 1e-9) {
    out.matching_variant = "27";
  } else if (out.cardano_8_rel_gap <= 1e-9) {
    out.matching_variant = "8";
  } else {
    out.matching_variant = "none";
  }
  return out;
}

double golden_section_maximize(const std::function<double(double)>& f, double lo, double hi, double tol,
                               int max_iterations) {
  if (hi < lo) std::swap(lo, hi);
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < max_iterations && (b - a) > tol; ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

NumericOptimum optimal_density_numeric(const Scenario& scenario, const DensityBounds& bounds, double rel_tol) {
  if (!(bounds.lower > 0.0) || !(bounds.upper >= bounds.lower)) {
    throw std::invalid_argument("optimal_density_numeric: need 0 < lower <= upper");
  }
  auto coverage_at_log = [&](double log_lambda) {
    Scenario s = scenario;
    s.deployment.lambda = std::pow(10.0, log_lambda);
    return coverage_rayleigh_n4_closed(s).value;
  };

  NumericOptimum out;
  const double lo = std::log10(bounds.lower);
  const double hi = std::log10(bounds.upper);
  if (lo == hi) {
    out.optimum = {bounds.lower, coverage_at_log(lo), OptimumMethod::kGrid};
    return out;
  }

  auto scan = [&](int points) {
    std::vector<std::pair<double, double>> grid(points);
    for (int i = 0; i < points; ++i) {
      const double x = lo + (hi - lo) * i / (points - 1);
      grid[i] = {x, coverage_at_log(x)};
    }
    return grid;
  };
  auto best_of = [](const std::vector<std::pair<double, double>>& grid) {
    return std::max_element(grid.begin(), grid.end(),
                            [](const auto& l, const auto& r) { return l.second < r.second; });
  };

  const auto coarse = scan(65);
  const auto best = best_of(coarse);
  const auto index = static_cast<std::size_t>(best - coarse.begin());

  int local_maxima = 0;
  for (std::size_t i = 1; i + 1 < coarse.size(); ++i) {
    if (coarse[i].second > coarse[i - 1].second && coarse[i].second > coarse[i + 1].second) ++local_maxima;
  }

  if (local_maxima == 1 && index > 0 && index + 1 < coarse.size()) {
    const double tol = std::log10(1.0 + rel_tol);
    const double x = golden_section_maximize(coverage_at_log, coarse[index - 1].first,
                                             coarse[index + 1].first, tol);
    const double fx = coverage_at_log(x);
    if (fx >= best->second) {
      out.optimum = {std::pow(10.0, x), fx, OptimumMethod::kGoldenSection};
      return out;
    }
  } else if (local_maxima == 0) {
    // Monotone over the bounds: the optimum sits on a bound.
    out.optimum = {std::pow(10.0, best->first), best->second, OptimumMethod::kGrid};
    return out;
  }

  out.fallback_to_grid = true;
  const auto dense = scan(1000);
  const auto dense_best = best_of(dense);
  out.optimum = {std::pow(10.0, dense_best->first), dense_best->second, OptimumMethod::kGrid};
  return out;
}

HeightCurvePoint evaluate_height(const Scenario& scenario, double z, const HeightSearchOptions& options) {
  Scenario s = scenario;
  s.deployment.z = z;
  const double n = s.exponent();

  McConfig mc = options.mc;
  if (!mc.region_radius) {
    mc.region_radius = auto_region_radius(s.deployment.lambda, s.deployment.l_max, s.environment.d0);
  }

  HeightCurvePoint point;
  point.z = z;
  point.exponent = n;

  auto run_mc = [&] {
    point.coverage = simulate_coverage(s, mc).estimate;
    point.method = CoverageMethod::kMonteCarlo;
  };

  if (options.evaluator == HeightEvaluator::kMonteCarlo) {
    run_mc();
    return point;
  }

  const double beta0 = s.radio.beta0;
  const bool noise_limited = beta0 > 0.0 && linear_to_db(1.0 / beta0) <= options.noise_limited_snr_db;
  if (noise_limited) {
    const auto est = coverage_noise_limited(s, options.quadrature);
    point.coverage = est.value;
    point.method = est.method;
  } else {
    try {
      const auto est = coverage_rayleigh(s, options.quadrature);
      point.coverage = est.value;
      point.method = est.method;
    } catch (const DivergenceError&) {
      run_mc();
    }
  }
  return point;
}

HeightOptimum optimal_height(const Scenario& scenario, const HeightSearchOptions& options) {
  const auto& dep = scenario.deployment;
  if (!(dep.l_min >= 20.0)) throw std::invalid_argument("optimal_height: l_min must be >= 20 m");
  if (!(dep.l_max >= dep.l_min)) throw std::invalid_argument("optimal_height: l_max must be >= l_min");
  if (!(options.step > 0.0)) throw std::invalid_argument("optimal_height: step must be positive");

  HeightOptimum out;
  std::vector<double> heights;
  for (double z = dep.l_min; z < dep.l_max - 1e-9; z += options.step) heights.push_back(z);
  heights.push_back(dep.l_max);
  if (dep.l_max == dep.l_min) heights.resize(1);

  for (double z : heights) out.curve.push_back(evaluate_height(scenario, z, options));
  for (const auto& p : out.curve) {
    if (p.method == CoverageMethod::kMonteCarlo && options.evaluator == HeightEvaluator::kAnalytic) {
      ++out.mc_fallbacks;
    }
  }

  const auto best = std::max_element(out.curve.begin(), out.curve.end(),
                                     [](const auto& l, const auto& r) { return l.coverage < r.coverage; });
  out.optimum = {best->z, best->coverage, OptimumMethod::kGrid};
  if (out.curve.size() < 2) return out;

  const auto index = static_cast<std::size_t>(best - out.curve.begin());
  const double lo = out.curve[index == 0 ? 0 : index - 1].z;
  const double hi = out.curve[std::min(index + 1, out.curve.size() - 1)].z;
  auto f = [&](double z) { return evaluate_height(scenario, z, options).coverage; };
  const double z_star = golden_section_maximize(f, lo, hi, 0.1);
  const double f_star = f(z_star);
  if (f_star > best->coverage) out.optimum = {z_star, f_star, OptimumMethod::kGoldenSection};
  return out;
}

}  // namespace uavcov
