#ifndef UAVCOV_OPTIMIZE_HPP
#define UAVCOV_OPTIMIZE_HPP

#include <functional>
#include <string_view>
#include <vector>

#include "uavcov/analytic.hpp"
#include "uavcov/channel.hpp"
#include "uavcov/montecarlo.hpp"

namespace uavcov {

enum class OptimumMethod { kCubicClosed, kGoldenSection, kGrid };

std::string_view to_string(OptimumMethod method);

struct Optimum {
  double argument = 0.0;  // meters (height) or per m^2 (density)
  double value = 0.0;
  OptimumMethod method = OptimumMethod::kGrid;
};

// Coefficients of the large-argument density approximation
//   P(lambda) ~ A lambda exp(-C lambda) / sqrt(1 + B lambda^2)
// for the n = 4 closed form.
struct DensityCoeffs {
  double coef_A = 0.0;  // per unit density
  double coef_B = 0.0;  // density^-2
  double coef_C = 0.0;  // density^-1
};

// A = pi d0^2 / sqrt(2 theta beta0) exp(-theta beta0 z^4 / d0^4),
// B = pi^2 (1 + rho)^2 d0^4 / (2 theta beta0), C = pi rho z^2.
DensityCoeffs density_coeffs(double z, double theta, double beta0, double d0, double rho_value);

struct DensityApprox {
  double value = 0.0;
  // True when the Q-function argument sqrt(B) lambda >= 3 and value <= 1.
  bool valid = false;
};

DensityApprox coverage_density_approx(double lambda, const DensityCoeffs& coeffs);

struct DensityOptimumClosed {
  Optimum optimum;              // bracketed root of B C x^3 + C x - 1 = 0
  double residual = 0.0;        // |-B C x^3 - C x + 1| at the root
  double cardano_27 = 0.0;      // Cardano with radicand 1/(4B^2C^2) + 1/(27B^3)
  double cardano_8 = 0.0;       // same with 1/(8B^3)
  double cardano_27_rel_gap = 0.0;
  double cardano_8_rel_gap = 0.0;
  std::string_view matching_variant;  // "27", "8", or "none" (1e-9 relative)
};

DensityOptimumClosed optimal_density_closed(const DensityCoeffs& coeffs);

struct DensityBounds {
  double lower = 1e-8;  // per m^2
  double upper = 1e-4;
};

struct NumericOptimum {
  Optimum optimum;
  bool fallback_to_grid = false;  // bracket failure: dense grid used
};

// Golden-section maximization of the n = 4 closed form over lambda (on a log
// scale) after a coarse scan; falls back to 1000 log-spaced points when the
// scan is not unimodal. Ignores scenario.deployment.lambda.
NumericOptimum optimal_density_numeric(const Scenario& scenario, const DensityBounds& bounds,
                                       double rel_tol = 1e-4);

// Golden-section maximization of f on [lo, hi]; returns the abscissa.
double golden_section_maximize(const std::function<double(double)>& f, double lo, double hi, double tol,
                               int max_iterations = 200);

enum class HeightEvaluator { kAnalytic, kMonteCarlo };

struct HeightSearchOptions {
  HeightEvaluator evaluator = HeightEvaluator::kAnalytic;
  double step = 5.0;  // meters
  // Reference SNRs at or below this treat interference as negligible and use
  // the noise-limited form with n(z).
  double noise_limited_snr_db = 10.0;
  QuadratureConfig quadrature;
  // For the Monte Carlo evaluator and the analytic evaluator's n = 2 fallback.
  // An unset region radius is fixed at the auto radius for l_max so every
  // height shares the same ground realizations.
  McConfig mc;
};

struct HeightCurvePoint {
  double z = 0.0;
  double coverage = 0.0;
  double exponent = 0.0;
  CoverageMethod method = CoverageMethod::kExactQuadrature;
};

struct HeightOptimum {
  Optimum optimum;
  std::vector<HeightCurvePoint> curve;
  unsigned mc_fallbacks = 0;
};

// Coverage at one height under the search options (analytic regime rules or
// Monte Carlo).
HeightCurvePoint evaluate_height(const Scenario& scenario, double z, const HeightSearchOptions& options);

// Grid scan over [l_min, l_max] of scenario.deployment, then golden-section
// refinement around the best cell.
HeightOptimum optimal_height(const Scenario& scenario, const HeightSearchOptions& options = {});

}  // namespace uavcov

#endif  // UAVCOV_OPTIMIZE_HPP
