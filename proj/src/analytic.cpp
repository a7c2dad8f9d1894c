#include "uavcov/analytic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "uavcov/errors.hpp"

namespace uavcov {

namespace {

constexpr double kPi = std::numbers::pi;

constexpr std::array<std::pair<CoverageMethod, std::string_view>, 7> kMethodNames{{
    {CoverageMethod::kExactQuadrature, "exact-quadrature"},
    {CoverageMethod::kClosedN4, "closed-n4"},
    {CoverageMethod::kNoNoise, "no-noise"},
    {CoverageMethod::kNoiseLimited, "noise-limited"},
    {CoverageMethod::kDensityApprox, "density-approx"},
    {CoverageMethod::kMonteCarlo, "monte-carlo"},
    {CoverageMethod::kNakagamiSemianalytic, "nakagami-semianalytic"},
}};

void require_rayleigh(const Scenario& scenario, const char* who) {
  if (fading_shape(scenario.radio.fading) != 1.0) {
    throw std::invalid_argument(std::string(who) + ": analytic forms assume Rayleigh fading");
  }
}

void require_interference_moment(double n, const char* who) {
  if (!(n > 2.0)) {
    throw DivergenceError(std::string(who) +
                          ": interference integral diverges for path-loss exponent <= 2; "
                          "use the noise-limited form or Monte Carlo");
  }
}

}  // namespace

std::string_view to_string(CoverageMethod method) {
  for (const auto& [m, name] : kMethodNames) {
    if (m == method) return name;
  }
  return "unknown";
}

CoverageMethod coverage_method_from_string(std::string_view name) {
  for (const auto& [m, label] : kMethodNames) {
    if (label == name) return m;
  }
  throw std::invalid_argument("unknown coverage method: " + std::string(name));
}

double erfcx(double x) {
  if (x < 0.0) return 2.0 * std::exp(x * x) - erfcx(-x);
  if (x < 26.0) return std::exp(x * x) * std::erfc(x);
  // Laplace continued fraction, evaluated bottom-up; converges to full
  // precision in a few terms at this range.
  double tail = x;
  for (int k = 40; k >= 1; --k) tail = x + 0.5 * k / tail;
  return 1.0 / (std::sqrt(kPi) * tail);
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double q_function_scaled(double x) { return 0.5 * erfcx(x / std::numbers::sqrt2); }

double q_approx(double x) {
  return std::exp(-0.5 * x * x) / (std::sqrt(2.0 * kPi) * std::sqrt(1.0 + x * x));
}

QuadratureResult rho_with_error(double theta, double n, const QuadratureConfig& cfg) {
  if (!(theta > 0.0)) throw std::domain_error("rho: theta must be positive");
  require_interference_moment(n, "rho");

  // x = s^(-1/(p-1)) with p = n/2 maps [theta^(-2/n), inf) onto [0, theta^(1-2/n)]
  // and turns the integrand into (1/(p-1)) / (1 + s^(p/(p-1))), which is
  // bounded for every n > 2. At n = 4 this is the plain x -> 1/x map.
  const double p = 0.5 * n;
  const double q = p / (p - 1.0);
  const double upper = std::pow(theta, 1.0 - 2.0 / n);
  QuadratureResult tail =
      integrate([q](double s) { return 1.0 / (1.0 + std::pow(s, q)); }, 0.0, upper, cfg);

  const double scale = std::pow(theta, 2.0 / n) / (p - 1.0);
  tail.value *= scale;
  tail.error *= scale;
  return tail;
}

double rho(double theta, double n, const QuadratureConfig& cfg) {
  return rho_with_error(theta, n, cfg).value;
}

double rho_closed_n4(double theta) {
  if (!(theta > 0.0)) throw std::domain_error("rho_closed_n4: theta must be positive");
  const double root = std::sqrt(theta);
  // pi/2 - atan(1/t) = atan(t) for t > 0
  return root * std::atan(root);
}

double laplace_interference(double theta, double r, double z, double lambda, double n,
                            const QuadratureConfig& cfg) {
  if (!(r >= 0.0) || !(z >= 0.0)) throw std::domain_error("laplace_interference: negative distance");
  if (!(lambda >= 0.0)) throw std::domain_error("laplace_interference: negative density");
  const double d2 = r * r + z * z;
  return std::exp(-lambda * kPi * d2 * rho(theta, n, cfg));
}

CoverageEstimate rayleigh_coverage_integral(double lambda, double z, double theta, double beta0,
                                            double d0, double n, double rho_value,
                                            const QuadratureConfig& cfg) {
  if (!(lambda > 0.0) || !(theta > 0.0) || !(beta0 >= 0.0) || !(d0 > 0.0) || !(n >= 2.0) ||
      !(rho_value >= 0.0) || !(z >= 0.0)) {
    throw std::domain_error("rayleigh_coverage_integral: parameter out of range");
  }
  cfg.validate();

  // Substituting u = lambda pi (1 + rho) v normalizes the integral to
  //   J = Integral_0^inf exp(-u - excess(u)) du  in (0, 1],
  // with excess(u) the noise exponent above its value at v = 0.
  const double rate = lambda * kPi * (1.0 + rho_value);
  const double noise_coef = theta * beta0;
  const double half_n = 0.5 * n;
  const double base0 = (z / d0) * (z / d0);
  const double base0_pow = std::pow(base0, half_n);
  const double noise0 = noise_coef * base0_pow;
  const double d0_sq = d0 * d0;

  auto excess = [=](double u) {
    if (noise_coef == 0.0) return 0.0;
    const double v = u / rate;
    return noise_coef * (std::pow((v + z * z) / d0_sq, half_n) - base0_pow);
  };
  auto integrand = [&](double u) { return std::exp(-u - excess(u)); };

  // Truncation: the integrand is below exp(-budget) beyond whichever of the
  // exponential or the noise term reaches the budget first.
  const double budget = -std::log(cfg.abs_tol);
  double upper = budget;
  if (noise_coef > 0.0) {
    double v_noise;
    if (base0 > 0.0) {
      v_noise = d0_sq * base0 * std::expm1(std::log1p(budget / noise0) / half_n);
    } else {
      v_noise = d0_sq * std::pow(budget / noise_coef, 1.0 / half_n);
    }
    if (std::isfinite(v_noise) && v_noise > 0.0) upper = std::min(upper, rate * v_noise);
  }
  const double tail_bound = integrand(upper);

  const double prefactor = std::exp(-lambda * kPi * rho_value * z * z - noise0) / (1.0 + rho_value);
  try {
    const QuadratureResult j = integrate(integrand, 0.0, upper, cfg);
    CoverageEstimate out;
    out.value = std::clamp(prefactor * j.value, 0.0, 1.0);
    out.method = rho_value == 0.0 ? CoverageMethod::kNoiseLimited : CoverageMethod::kExactQuadrature;
    out.error_bound = prefactor * (j.error + tail_bound);
    return out;
  } catch (const NumericError& e) {
    throw NumericError(e.what(), prefactor * e.best_estimate(),
                       prefactor * (e.error_estimate() + tail_bound));
  }
}

CoverageEstimate coverage_rayleigh(const Scenario& scenario, const QuadratureConfig& cfg) {
  scenario.validate();
  require_rayleigh(scenario, "coverage_rayleigh");
  const double n = scenario.exponent();
  require_interference_moment(n, "coverage_rayleigh");

  const auto& dep = scenario.deployment;
  const auto& radio = scenario.radio;
  const QuadratureResult r = rho_with_error(radio.theta, n, cfg);
  CoverageEstimate out = rayleigh_coverage_integral(dep.lambda, dep.z, radio.theta, radio.beta0,
                                                    scenario.environment.d0, n, r.value, cfg);
  // First-order propagation of the rho quadrature error.
  const double sensitivity = dep.lambda * kPi * dep.z * dep.z + 1.0 / (1.0 + r.value);
  out.error_bound += r.error * sensitivity * out.value;
  out.method = CoverageMethod::kExactQuadrature;
  return out;
}

CoverageEstimate coverage_rayleigh_n4_closed(const Scenario& scenario) {
  scenario.validate();
  require_rayleigh(scenario, "coverage_rayleigh_n4_closed");
  const auto& dep = scenario.deployment;
  const auto& radio = scenario.radio;
  if (!(radio.beta0 > 0.0)) {
    throw std::domain_error("coverage_rayleigh_n4_closed: needs beta0 > 0 (use coverage_no_noise)");
  }
  const double d0 = scenario.environment.d0;
  const double rho_value = rho_closed_n4(radio.theta);
  const double noise_root = std::sqrt(2.0 * radio.theta * radio.beta0);
  const double kappa = dep.lambda * kPi * (1.0 + rho_value) * d0 * d0 / noise_root;
  const double shift = dep.z * dep.z / (d0 * d0) * noise_root;

  // exp(kappa^2/2 + lambda pi z^2) Q(kappa + shift)
  //   = exp(-lambda pi rho z^2 - shift^2/2) * [exp(x^2/2) Q(x)],  x = kappa + shift
  const double exponent = -dep.lambda * kPi * rho_value * dep.z * dep.z - 0.5 * shift * shift;
  const double prefactor = dep.lambda * std::pow(kPi, 1.5) * d0 * d0 / std::sqrt(radio.theta * radio.beta0);
  const double value = prefactor * std::exp(exponent) * q_function_scaled(kappa + shift);

  CoverageEstimate out;
  out.value = std::clamp(value, 0.0, 1.0);
  out.method = CoverageMethod::kClosedN4;
  out.error_bound = 64.0 * std::numeric_limits<double>::epsilon() * out.value;
  return out;
}

CoverageEstimate coverage_no_noise(const Scenario& scenario, const QuadratureConfig& cfg) {
  scenario.validate();
  require_rayleigh(scenario, "coverage_no_noise");
  const double n = scenario.exponent();
  require_interference_moment(n, "coverage_no_noise");
  const auto& dep = scenario.deployment;
  const QuadratureResult r = rho_with_error(scenario.radio.theta, n, cfg);
  CoverageEstimate out;
  out.value = std::exp(-dep.lambda * kPi * r.value * dep.z * dep.z) / (1.0 + r.value);
  out.method = CoverageMethod::kNoNoise;
  out.error_bound = r.error * (dep.lambda * kPi * dep.z * dep.z + 1.0 / (1.0 + r.value)) * out.value;
  return out;
}

CoverageEstimate coverage_noise_limited(const Scenario& scenario, const QuadratureConfig& cfg) {
  scenario.validate();
  require_rayleigh(scenario, "coverage_noise_limited");
  if (!(scenario.radio.beta0 > 0.0)) {
    throw std::domain_error("coverage_noise_limited: needs beta0 > 0");
  }
  const auto& dep = scenario.deployment;
  return rayleigh_coverage_integral(dep.lambda, dep.z, scenario.radio.theta, scenario.radio.beta0,
                                    scenario.environment.d0, scenario.exponent(), 0.0, cfg);
}

}  // namespace uavcov
