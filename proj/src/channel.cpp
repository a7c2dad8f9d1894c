#include "uavcov/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace uavcov {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void EnvironmentParams::validate() const {
  require(terrain_a > 0.0, "terrain_a must be positive");
  require(terrain_b >= 0.0, "terrain_b must be non-negative");
  require(terrain_c >= 0.0, "terrain_c must be non-negative");
  require(d0 > 0.0, "d0 must be positive");
}

void DeploymentParams::validate_physical() const {
  require(lambda > 0.0, "lambda must be positive");
  require(z >= 0.0, "altitude must be non-negative");
}

void DeploymentParams::validate() const {
  validate_physical();
  require(l_min > 0.0, "l_min must be positive");
  require(l_min <= z && z <= l_max, "altitude must lie in [l_min, l_max]");
}

void validate_fading(const FadingModel& model) {
  if (const auto* nak = std::get_if<Nakagami>(&model)) {
    require(nak->m >= 0.5, "Nakagami shape must be >= 0.5");
  } else if (const auto* ric = std::get_if<Rician>(&model)) {
    require(ric->k >= 0.0, "Rician K-factor must be >= 0");
  }
}

double fading_shape(const FadingModel& model) {
  validate_fading(model);
  if (const auto* nak = std::get_if<Nakagami>(&model)) return nak->m;
  if (const auto* ric = std::get_if<Rician>(&model)) return rician_k_to_m(ric->k);
  return 1.0;
}

void RadioParams::validate() const {
  require(theta > 0.0, "theta must be positive");
  require(beta0 >= 0.0, "beta0 must be non-negative");
  validate_fading(fading);
}

double Scenario::exponent() const {
  if (ple_override) return *ple_override;
  return ple(deployment.z, environment);
}

void Scenario::validate() const {
  deployment.validate_physical();
  radio.validate();
  environment.validate();
  if (ple_override) require(*ple_override >= 2.0, "path-loss exponent must be >= 2");
}

double ple(double z, const EnvironmentParams& env) {
  if (!(z > 0.0)) throw std::domain_error("ple: altitude must be positive");
  return std::max(env.terrain_a - env.terrain_b * z + env.terrain_c / z, 2.0);
}

double path_gain(double d, const EnvironmentParams& env, double n) {
  if (!(d > 0.0)) throw std::domain_error("path_gain: distance must be positive");
  return std::pow(d / env.d0, -n);
}

double rician_k_to_m(double k) {
  if (!(k >= 0.0)) throw std::domain_error("rician_k_to_m: K-factor must be non-negative");
  return (k * k + 2.0 * k + 1.0) / (2.0 * k + 1.0);
}

FadingSampler::FadingSampler(const FadingModel& model)
    : shape_(fading_shape(model)),
      exponential_(shape_ == 1.0),
      gamma_(shape_, 1.0 / shape_) {}

double sample_fading(const FadingModel& model, RandomStream& rng) {
  FadingSampler sampler(model);
  return sampler(rng);
}

double nearest_distance_pdf(double r, double lambda) {
  const double lp = lambda * std::numbers::pi;
  return 2.0 * lp * r * std::exp(-lp * r * r);
}

double nearest_distance_cdf(double r, double lambda) {
  return -std::expm1(-lambda * std::numbers::pi * r * r);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }
double per_km2_to_per_m2(double density_per_km2) { return density_per_km2 * 1e-6; }
double per_m2_to_per_km2(double density_per_m2) { return density_per_m2 * 1e6; }

}  // namespace uavcov
