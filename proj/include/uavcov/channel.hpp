#ifndef UAVCOV_CHANNEL_HPP
#define UAVCOV_CHANNEL_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <variant>

namespace uavcov {

// Random stream used by every sampler in the library.
using RandomStream = std::mt19937_64;

// SUI terrain constants and the reference distance of the path-loss law.
// Defaults are the urban terrain values (a, b, c) = (4.6, 0.0075, 12.6).
struct EnvironmentParams {
  double terrain_a = 4.6;
  double terrain_b = 0.0075;  // per meter
  double terrain_c = 12.6;    // meters
  double d0 = 100.0;          // meters

  void validate() const;
};

// UAV layer: 2D PPP density (per m^2) at common altitude z.
struct DeploymentParams {
  double lambda = 1e-6;
  double z = 100.0;
  double l_min = 20.0;
  double l_max = 600.0;

  // Full invariants including l_min <= z <= l_max.
  void validate() const;
  // Only what the coverage formulas need: lambda > 0, z >= 0.
  void validate_physical() const;
};

struct Rayleigh {};
struct Nakagami {
  double m = 1.0;
};
// Rician power fading with linear K-factor. Sampled through its
// moment-matched Nakagami shape.
struct Rician {
  double k = 0.0;
};

// Unit-mean small-scale power fading.
using FadingModel = std::variant<Rayleigh, Nakagami, Rician>;

void validate_fading(const FadingModel& model);

// Nakagami shape equivalent to the model (1 for Rayleigh).
double fading_shape(const FadingModel& model);

struct RadioParams {
  double theta = 1.0;   // linear SINR threshold
  double beta0 = 0.0;   // noise over received power at d0, i.e. 1/SNR(d0)
  FadingModel fading = Rayleigh{};

  void validate() const;
};

// Full evaluation point. The path-loss exponent follows the SUI height law
// unless ple_override pins it.
struct Scenario {
  DeploymentParams deployment;
  RadioParams radio;
  EnvironmentParams environment;
  std::optional<double> ple_override;

  double exponent() const;
  void validate() const;
};

// max(a - b z + c / z, 2).
double ple(double z, const EnvironmentParams& env);

// (d / d0)^-n, the deterministic part of the link gain with K0 normalized out.
double path_gain(double d, const EnvironmentParams& env, double n);

// m = (K^2 + 2K + 1) / (2K + 1).
double rician_k_to_m(double k);

double sample_fading(const FadingModel& model, RandomStream& rng);

// Holds the distribution object so hot loops don't rebuild it per draw.
// Shape 1 (Rayleigh, Nakagami(1), Rician(0)) draws from the exponential law.
class FadingSampler {
 public:
  explicit FadingSampler(const FadingModel& model);

  double operator()(RandomStream& rng) {
    return exponential_ ? exp_(rng) : gamma_(rng);
  }

  double shape() const { return shape_; }

 private:
  double shape_;
  bool exponential_;
  std::exponential_distribution<double> exp_{1.0};
  std::gamma_distribution<double> gamma_;
};

// Density of the horizontal distance to the nearest PPP point.
double nearest_distance_pdf(double r, double lambda);

// CDF of the same, 1 - exp(-lambda pi r^2).
double nearest_distance_cdf(double r, double lambda);

// Unit conversions at the CLI boundary.
double db_to_linear(double db);
double linear_to_db(double linear);
double per_km2_to_per_m2(double density_per_km2);
double per_m2_to_per_km2(double density_per_m2);

}  // namespace uavcov

#endif  // UAVCOV_CHANNEL_HPP
