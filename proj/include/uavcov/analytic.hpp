#ifndef UAVCOV_ANALYTIC_HPP
#define UAVCOV_ANALYTIC_HPP

#include <string_view>

#include "uavcov/channel.hpp"
#include "uavcov/quadrature.hpp"

namespace uavcov {

enum class CoverageMethod {
  kExactQuadrature,
  kClosedN4,
  kNoNoise,
  kNoiseLimited,
  kDensityApprox,
  kMonteCarlo,
  kNakagamiSemianalytic,
};

std::string_view to_string(CoverageMethod method);
CoverageMethod coverage_method_from_string(std::string_view name);

struct CoverageEstimate {
  double value = 0.0;
  CoverageMethod method = CoverageMethod::kExactQuadrature;
  double error_bound = 0.0;
};

// Gaussian tail probability Q(x).
double q_function(double x);

// exp(x^2 / 2) Q(x), finite for arbitrarily large positive x.
double q_function_scaled(double x);

// Large-argument approximation exp(-x^2/2) / (sqrt(2 pi) sqrt(1 + x^2)).
// Only meaningful for x >= 0 and accurate to a few percent from x ~ 3 on.
double q_approx(double x);

// Scaled complementary error function exp(x^2) erfc(x).
double erfcx(double x);

// Normalized interference integral
//   rho(theta, n) = theta^(2/n) * Integral_{theta^(-2/n)}^inf dx / (1 + x^(n/2)).
// Throws DivergenceError for n <= 2.
double rho(double theta, double n, const QuadratureConfig& cfg = {});
QuadratureResult rho_with_error(double theta, double n, const QuadratureConfig& cfg = {});

// sqrt(theta) (pi/2 - atan(theta^-1/2)), the n = 4 antiderivative.
double rho_closed_n4(double theta);

// Laplace transform of the interference at s = theta (d/d0)^n for a serving
// link at horizontal distance r and altitude z: exp(-lambda pi d^2 rho(theta, n)).
double laplace_interference(double theta, double r, double z, double lambda, double n,
                            const QuadratureConfig& cfg = {});

// Rayleigh coverage for a caller-supplied interference integral rho:
//   lambda pi exp(-lambda pi rho z^2) Integral_0^inf
//       exp(-lambda pi (1 + rho) v - theta beta0 ((v + z^2) / d0^2)^(n/2)) dv.
// rho = 0 is the noise-limited form. The integral is truncated where the
// integrand's exponential tail bound drops below abs_tol and the analytic
// remainder is added to error_bound.
CoverageEstimate rayleigh_coverage_integral(double lambda, double z, double theta, double beta0,
                                            double d0, double n, double rho_value,
                                            const QuadratureConfig& cfg = {});

// Exact Rayleigh coverage with the exponent taken from the scenario.
// Throws DivergenceError when the exponent is <= 2.
CoverageEstimate coverage_rayleigh(const Scenario& scenario, const QuadratureConfig& cfg = {});

// Closed form at n = 4 (exponent in the scenario is ignored). Needs beta0 > 0.
CoverageEstimate coverage_rayleigh_n4_closed(const Scenario& scenario);

// Interference-limited form exp(-lambda pi rho z^2) / (1 + rho).
CoverageEstimate coverage_no_noise(const Scenario& scenario, const QuadratureConfig& cfg = {});

// Noise-limited form (interference dropped). Valid for every n >= 2.
CoverageEstimate coverage_noise_limited(const Scenario& scenario, const QuadratureConfig& cfg = {});

}  // namespace uavcov

#endif  // UAVCOV_ANALYTIC_HPP
