#include "doctest.h"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "test_support.hpp"
#include "uavcov/channel.hpp"
#include "uavcov/quadrature.hpp"

using namespace uavcov;

TEST_SUITE("channel") {
  TEST_CASE("ple follows the SUI height law with the n = 2 floor") {
    const EnvironmentParams env;
    CHECK(ple(100.0, env) == doctest::Approx(3.976).epsilon(1e-12));
    CHECK(ple(400.0, env) == 2.0);
    // a - b z + c / z = 2 at z = 351.4469...
    CHECK(ple(351.446905091479951, env) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(ple(351.0, env) > 2.0);
    CHECK(ple(352.0, env) == 2.0);
    CHECK_THROWS_AS(ple(0.0, env), std::domain_error);
    CHECK_THROWS_AS(ple(-5.0, env), std::domain_error);
  }

  TEST_CASE("ple is continuous and never below 2") {
    const EnvironmentParams env;
    double prev = ple(20.0, env);
    for (double z = 20.5; z < 2000.0; z += 0.5) {
      const double n = ple(z, env);
      CHECK(n >= 2.0);
      CHECK(std::abs(n - prev) < 0.1);
      prev = n;
    }
  }

  TEST_CASE("path gain") {
    const EnvironmentParams env;
    for (double n : {2.0, 2.5, 3.0, 4.0, 5.0}) CHECK(path_gain(env.d0, env, n) == 1.0);
    CHECK(path_gain(2.0 * env.d0, env, 4.0) == doctest::Approx(0.0625).epsilon(1e-15));
    CHECK(path_gain(300.0, env, 2.0) == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
    CHECK(path_gain(150.0, env, 3.0) > path_gain(151.0, env, 3.0));
    CHECK_THROWS_AS(path_gain(0.0, env, 4.0), std::domain_error);
  }

  TEST_CASE("Rician K to Nakagami m") {
    CHECK(rician_k_to_m(0.0) == 1.0);
    CHECK(rician_k_to_m(10.0) == doctest::Approx(121.0 / 21.0).epsilon(1e-15));
    CHECK(rician_k_to_m(10.0) == doctest::Approx(5.7619).epsilon(1e-4));
    CHECK(rician_k_to_m(1.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    double prev = rician_k_to_m(0.0);
    for (double k = 0.05; k < 100.0; k *= 1.3) {
      const double m = rician_k_to_m(k);
      CHECK(m > prev);
      prev = m;
    }
    CHECK_THROWS_AS(rician_k_to_m(-0.1), std::domain_error);
  }

  TEST_CASE("fading samplers have unit mean") {
    constexpr int kDraws = 1000000;
    for (const FadingModel& model :
         {FadingModel{Rayleigh{}}, FadingModel{Nakagami{5.7619}}, FadingModel{Rician{10.0}}, FadingModel{Nakagami{0.5}}}) {
      RandomStream rng(42);
      FadingSampler draw(model);
      double sum = 0.0, sum_sq = 0.0;
      for (int i = 0; i < kDraws; ++i) {
        const double h = draw(rng);
        REQUIRE(h > 0.0);
        sum += h;
        sum_sq += h * h;
      }
      const double mean = sum / kDraws;
      const double var = sum_sq / kDraws - mean * mean;
      const double m = fading_shape(model);
      CHECK(std::abs(mean - 1.0) <= 3.0 * std::sqrt(1.0 / m / kDraws));
      CHECK(var == doctest::Approx(1.0 / m).epsilon(0.05));
    }
  }

  TEST_CASE("Rayleigh and Nakagami(1) draw from the exponential law") {
    RandomStream rng(7);
    std::vector<double> sample(20000);
    for (auto& h : sample) h = sample_fading(Nakagami{1.0}, rng);
    const double d = test::ks_statistic(sample, [](double x) { return -std::expm1(-x); });
    CHECK(d < test::ks_critical_1pct(sample.size()));

    RandomStream a(3), b(3);
    for (int i = 0; i < 100; ++i) CHECK(sample_fading(Rayleigh{}, a) == sample_fading(Nakagami{1.0}, b));
  }

  TEST_CASE("fading model validation") {
    CHECK_THROWS_AS(validate_fading(Nakagami{0.4}), std::invalid_argument);
    CHECK_THROWS_AS(validate_fading(Rician{-1.0}), std::invalid_argument);
    CHECK(fading_shape(Rician{0.0}) == 1.0);
  }

  TEST_CASE("nearest-UAV distance density") {
    CHECK(nearest_distance_pdf(0.0, 1e-6) == 0.0);
    const double lambda = 1e-6;
    QuadratureConfig cfg;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-14;
    const double mass = integrate([&](double r) { return nearest_distance_pdf(r, lambda); }, 0.0, 1e4, cfg).value;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    const double median = 469.718639349825667;
    CHECK(nearest_distance_cdf(median, lambda) == doctest::Approx(0.5).epsilon(1e-12));
  }

  TEST_CASE("deployment invariants") {
    DeploymentParams dep;
    CHECK_NOTHROW(dep.validate());
    dep.z = 10.0;
    CHECK_THROWS_AS(dep.validate(), std::invalid_argument);
    CHECK_NOTHROW(dep.validate_physical());
    dep.lambda = 0.0;
    CHECK_THROWS_AS(dep.validate_physical(), std::invalid_argument);
  }

  TEST_CASE("unit conversions") {
    CHECK(db_to_linear(10.0) == doctest::Approx(10.0));
    CHECK(db_to_linear(-40.0) == doctest::Approx(1e-4));
    CHECK(linear_to_db(db_to_linear(-13.7)) == doctest::Approx(-13.7).epsilon(1e-14));
    CHECK(per_km2_to_per_m2(1.0) == 1e-6);
    CHECK(per_m2_to_per_km2(per_km2_to_per_m2(3.5)) == doctest::Approx(3.5));
  }
}
