#ifndef UAVCOV_MONTECARLO_HPP
#define UAVCOV_MONTECARLO_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "uavcov/channel.hpp"

namespace uavcov {

struct McConfig {
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  // Simulation disk radius in meters; empty selects auto_region_radius.
  std::optional<double> region_radius;
  double confidence_level = 0.95;
  // Worker threads, 0 = hardware concurrency. Results do not depend on it.
  unsigned workers = 0;

  void validate() const;
};

struct McResult {
  double estimate = 0.0;
  double ci_half_width = 0.0;
  std::uint64_t trials_used = 0;
  double region_radius = 0.0;
  // Variance of the per-trial statistic (indicator or conditional coverage).
  double sample_variance = 0.0;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

// max(10 / sqrt(lambda), 20 z, 10 d0): about 314 expected points in the disk.
double auto_region_radius(double lambda, double z, double d0);

double region_radius_for(const Scenario& scenario, const McConfig& mc);

// Independent stream for one trial, derived from (seed, trial) only.
RandomStream trial_stream(std::uint64_t seed, std::uint64_t trial);

// Homogeneous PPP on the disk of the given radius, returned in increasing
// distance from the origin. Points are generated outward (the normalized
// squared radii lambda pi r^2 are unit-rate Poisson arrivals), so a larger
// disk drawn from the same stream contains the smaller one's points.
std::vector<Point2> generate_ppp(double lambda, double radius, RandomStream& rng);

// One trial of the downlink: serving (nearest) link and aggregate interference,
// all in units normalized by the received power at d0.
struct LinkSample {
  double serving_gain = 0.0;    // (d / d0)^-n
  double serving_fading = 0.0;  // h
  double interference = 0.0;    // sum h_i (d_i / d0)^-n
  bool has_serving = false;
};

// Draws every trial for the scenario. theta and beta0 do not enter, so one
// sample set serves a whole threshold or SNR sweep.
std::vector<LinkSample> sample_links(const Scenario& scenario, const McConfig& mc);

// Fraction of trials with SINR > theta, with a Wilson score interval.
McResult coverage_from_samples(std::span<const LinkSample> samples, double theta, double beta0,
                               double confidence_level, double region_radius);

// Mean of Gamma(m, m mu) / Gamma(m), mu = theta (beta0 + I) (d/d0)^n, i.e. the
// serving fading integrated out; normal-approximation interval.
McResult nakagami_from_samples(std::span<const LinkSample> samples, double theta, double beta0,
                               double m, double confidence_level, double region_radius);

McResult simulate_coverage(const Scenario& scenario, const McConfig& mc);

// Semi-analytic estimator for Nakagami-m fading (Rician uses its moment-matched
// m, Rayleigh m = 1).
McResult coverage_nakagami_semianalytic(const Scenario& scenario, const McConfig& mc);

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double confidence_level);

// Two-sided standard normal critical value for the confidence level.
double normal_critical_value(double confidence_level);

}  // namespace uavcov

#endif  // UAVCOV_MONTECARLO_HPP
