#include "uavcov/montecarlo.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace uavcov {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kBlockSize = 2048;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Visits the PPP points on the disk in increasing distance. The callback
// receives (r, phi) and may draw further values from the same stream.
template <typename Visitor>
void for_each_ppp_point(double lambda, double radius, RandomStream& rng, Visitor&& visit) {
  std::exponential_distribution<double> arrival(1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  const double area_rate = lambda * kPi;
  const double limit = area_rate * radius * radius;
  double cumulative = 0.0;
  while (true) {
    cumulative += arrival(rng);
    if (cumulative > limit) break;
    const double r = std::sqrt(cumulative / area_rate);
    const double phi = angle(rng);
    visit(r, phi);
  }
}

unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

McResult mean_with_interval(double sum, double sum_sq, std::uint64_t count, double confidence_level,
                            double region_radius) {
  McResult out;
  out.trials_used = count;
  out.region_radius = region_radius;
  if (count == 0) return out;
  const double n = static_cast<double>(count);
  const double mean = sum / n;
  const double var = count > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
  out.estimate = std::clamp(mean, 0.0, 1.0);
  out.sample_variance = var;
  out.ci_half_width = normal_critical_value(confidence_level) * std::sqrt(var / n);
  return out;
}

}  // namespace

void McConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (region_radius && !(*region_radius > 0.0)) throw std::invalid_argument("region radius must be positive");
  if (!(confidence_level > 0.0 && confidence_level < 1.0)) {
    throw std::invalid_argument("confidence level must lie in (0, 1)");
  }
}

double auto_region_radius(double lambda, double z, double d0) {
  return std::max({10.0 / std::sqrt(lambda), 20.0 * z, 10.0 * d0});
}

double region_radius_for(const Scenario& scenario, const McConfig& mc) {
  if (mc.region_radius) return *mc.region_radius;
  return auto_region_radius(scenario.deployment.lambda, scenario.deployment.z, scenario.environment.d0);
}

RandomStream trial_stream(std::uint64_t seed, std::uint64_t trial) {
  return RandomStream(splitmix64(splitmix64(seed) ^ splitmix64(trial + 0x632BE59BD9B4E019ULL)));
}

std::vector<Point2> generate_ppp(double lambda, double radius, RandomStream& rng) {
  if (!(lambda > 0.0) || !(radius > 0.0)) {
    throw std::invalid_argument("generate_ppp: lambda and radius must be positive");
  }
  std::vector<Point2> points;
  for_each_ppp_point(lambda, radius, rng, [&](double r, double phi) {
    points.push_back({r * std::cos(phi), r * std::sin(phi)});
  });
  return points;
}

std::vector<LinkSample> sample_links(const Scenario& scenario, const McConfig& mc) {
  scenario.validate();
  mc.validate();

  const double lambda = scenario.deployment.lambda;
  const double z_sq = scenario.deployment.z * scenario.deployment.z;
  const double d0_sq = scenario.environment.d0 * scenario.environment.d0;
  const double half_n = 0.5 * scenario.exponent();
  const double radius = region_radius_for(scenario, mc);
  const FadingModel fading = scenario.radio.fading;

  std::vector<LinkSample> samples(mc.trials);
  const std::uint64_t blocks = (mc.trials + kBlockSize - 1) / kBlockSize;
  std::atomic<std::uint64_t> next_block{0};

  auto worker = [&] {
    FadingSampler draw_fading(fading);
    for (std::uint64_t b = next_block++; b < blocks; b = next_block++) {
      const std::uint64_t end = std::min(mc.trials, (b + 1) * kBlockSize);
      for (std::uint64_t t = b * kBlockSize; t < end; ++t) {
        RandomStream rng = trial_stream(mc.seed, t);
        LinkSample s;
        for_each_ppp_point(lambda, radius, rng, [&](double r, double) {
          const double h = draw_fading(rng);
          const double gain = std::pow((r * r + z_sq) / d0_sq, -half_n);
          if (!s.has_serving) {
            s.has_serving = true;
            s.serving_gain = gain;
            s.serving_fading = h;
          } else {
            s.interference += h * gain;
          }
        });
        samples[t] = s;
      }
    }
  };

  const unsigned workers = std::min<std::uint64_t>(resolve_workers(mc.workers), blocks);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  return samples;
}

McResult coverage_from_samples(std::span<const LinkSample> samples, double theta, double beta0,
                               double confidence_level, double region_radius) {
  std::uint64_t covered = 0;
  for (const auto& s : samples) {
    // Empty window: no serving UAV, counted as outage.
    if (!s.has_serving) continue;
    if (s.serving_fading * s.serving_gain > theta * (beta0 + s.interference)) ++covered;
  }
  McResult out;
  out.trials_used = samples.size();
  out.region_radius = region_radius;
  if (samples.empty()) return out;
  const double n = static_cast<double>(samples.size());
  out.estimate = static_cast<double>(covered) / n;
  const Interval ci = wilson_interval(covered, samples.size(), confidence_level);
  out.ci_half_width = 0.5 * (ci.upper - ci.lower);
  out.sample_variance = samples.size() > 1 ? out.estimate * (1.0 - out.estimate) * n / (n - 1.0) : 0.0;
  return out;
}

McResult nakagami_from_samples(std::span<const LinkSample> samples, double theta, double beta0,
                               double m, double confidence_level, double region_radius) {
  if (!(m >= 0.5)) throw std::invalid_argument("Nakagami shape must be >= 0.5");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto& s : samples) {
    if (!s.has_serving) continue;
    const double mu = theta * (beta0 + s.interference) / s.serving_gain;
    const double p = boost::math::gamma_q(m, m * mu);
    sum += p;
    sum_sq += p * p;
  }
  return mean_with_interval(sum, sum_sq, samples.size(), confidence_level, region_radius);
}

McResult simulate_coverage(const Scenario& scenario, const McConfig& mc) {
  const auto samples = sample_links(scenario, mc);
  return coverage_from_samples(samples, scenario.radio.theta, scenario.radio.beta0, mc.confidence_level,
                               region_radius_for(scenario, mc));
}

McResult coverage_nakagami_semianalytic(const Scenario& scenario, const McConfig& mc) {
  const double m = fading_shape(scenario.radio.fading);
  if (!(scenario.exponent() > 2.0) && !(scenario.radio.beta0 > 0.0)) {
    throw std::invalid_argument("semi-analytic estimator needs n > 2 or beta0 > 0");
  }
  const auto samples = sample_links(scenario, mc);
  return nakagami_from_samples(samples, scenario.radio.theta, scenario.radio.beta0, m, mc.confidence_level,
                               region_radius_for(scenario, mc));
}

double normal_critical_value(double confidence_level) {
  if (!(confidence_level > 0.0 && confidence_level < 1.0)) {
    throw std::invalid_argument("confidence level must lie in (0, 1)");
  }
  return boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 * (1.0 + confidence_level));
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double confidence_level) {
  if (trials == 0) throw std::invalid_argument("wilson_interval: no trials");
  if (successes > trials) throw std::invalid_argument("wilson_interval: successes exceed trials");
  const double z = normal_critical_value(confidence_level);
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace uavcov
