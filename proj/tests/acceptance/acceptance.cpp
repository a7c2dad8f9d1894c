// Acceptance criteria, one PASS/FAIL line each.
//   uavcov_acceptance            run all
//   uavcov_acceptance --only 7   run one
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "uavcov/analytic.hpp"
#include "uavcov/montecarlo.hpp"
#include "uavcov/optimize.hpp"
#include "uavcov_cli.hpp"

using namespace uavcov;

namespace {

// Pinned tolerances.
constexpr double kAgreementFloor = 0.01;
constexpr double kIdentityRel = 1e-6;
constexpr double kRhoAbs = 1e-8;
constexpr double kNoNoiseGap = 1e-4;
constexpr double kHeightTarget = 350.0;
constexpr double kHeightTol = 25.0;
constexpr double kHeightSpread = 25.0;
constexpr double kAnalyticHeightSeconds = 10.0;
constexpr double kMcHeightSeconds = 600.0;
constexpr double kDensityGap = 0.05;
constexpr double kCubicResidual = 1e-10;
constexpr double kFadingCiMultiple = 2.0;
constexpr double kHighCoverage = 0.5;
constexpr std::uint64_t kTrials = 100000;
constexpr std::uint64_t kHeightMcTrials = 10000;

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

Scenario fig2(double theta_db, double snr_db) {
  Scenario s;
  s.deployment.lambda = per_km2_to_per_m2(1.0);
  s.deployment.z = 100.0;
  s.radio.theta = db_to_linear(theta_db);
  s.radio.beta0 = db_to_linear(-snr_db);
  s.ple_override = 4.0;
  return s;
}

std::vector<double> theta_grid() { return cli::axis_values(-20.0, 20.0, 1.0); }

McConfig mc(std::uint64_t trials, std::uint64_t seed = 2024) {
  McConfig c;
  c.trials = trials;
  c.seed = seed;
  return c;
}

Outcome criterion_1() {
  const auto t0 = Clock::now();
  const McConfig cfg = mc(kTrials);
  const Scenario base = fig2(0.0, 20.0);
  // theta and beta0 do not enter the geometry, so one sample set covers the grid
  const auto samples = sample_links(base, cfg);
  const double radius = region_radius_for(base, cfg);
  double worst_diff = 0.0, worst_excess = -1.0;
  int bad = 0;
  for (double snr : {20.0, 40.0}) {
    for (double t : theta_grid()) {
      const Scenario s = fig2(t, snr);
      const double exact = coverage_rayleigh(s).value;
      const auto sim = coverage_from_samples(samples, s.radio.theta, s.radio.beta0, cfg.confidence_level, radius);
      const double diff = std::abs(exact - sim.estimate);
      const double tol = std::max(kAgreementFloor, sim.ci_half_width);
      worst_diff = std::max(worst_diff, diff);
      worst_excess = std::max(worst_excess, diff - tol);
      bad += diff > tol;
    }
  }
  return {bad == 0, "82 points, max |exact - MC| = " + fmt("%.4g", worst_diff) + ", points over tolerance " +
                        std::to_string(bad) + ", runtime " + fmt("%.1f", seconds_since(t0)) + " s"};
}

Outcome criterion_2() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> theta_db(-20.0, 20.0), z(20.0, 400.0), log_density(-1.0, 1.0),
      snr_db(0.0, 50.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    Scenario s = fig2(theta_db(rng), 0.0);
    s.deployment.z = z(rng);
    s.deployment.lambda = per_km2_to_per_m2(std::pow(10.0, log_density(rng)));
    s.radio.beta0 = db_to_linear(-snr_db(rng));
    const double quad = coverage_rayleigh(s).value;
    const double closed = coverage_rayleigh_n4_closed(s).value;
    worst = std::max(worst, std::abs(quad - closed) / closed);
  }
  return {worst <= kIdentityRel, "100 tuples, max relative error " + fmt("%.3g", worst)};
}

Outcome criterion_3() {
  double worst = 0.0;
  for (int i = 0; i < 61; ++i) {
    const double theta = std::pow(10.0, -3.0 + 6.0 * i / 60.0);
    worst = std::max(worst, std::abs(rho(theta, 4.0) - rho_closed_n4(theta)));
  }
  return {worst <= kRhoAbs, "61 points, max absolute error " + fmt("%.3g", worst)};
}

Outcome criterion_4() {
  bool pass = true;
  std::string detail;
  for (double t : {-10.0, 0.0, 10.0}) {
    Scenario s = fig2(t, 0.0);
    s.radio.beta0 = 0.0;
    const double limit = coverage_no_noise(s).value;
    double prev = std::numeric_limits<double>::infinity(), gap = 0.0;
    bool monotone = true;
    for (double beta0 : {1e-3, 1e-5, 1e-7}) {
      s.radio.beta0 = beta0;
      gap = std::abs(coverage_rayleigh(s).value - limit);
      monotone = monotone && gap < prev;
      prev = gap;
    }
    pass = pass && monotone && gap <= kNoNoiseGap;
    detail += std::string(detail.empty() ? "" : "; ") + "theta " + fmt("%g", t) + " dB: final gap " +
              fmt("%.3g", gap) + (monotone ? "" : " (not monotone)");
  }
  return {pass, detail};
}

Outcome criterion_5() {
  int violations = 0;
  for (double snr : {20.0, 40.0}) {
    for (double t : theta_grid()) {
      double prev = 2.0;
      for (double z : {100.0, 200.0, 300.0}) {
        Scenario s = fig2(t, snr);
        s.deployment.z = z;
        const double c = coverage_rayleigh(s).value;
        violations += !(c < prev);
        prev = c;
      }
    }
  }
  return {violations == 0, "82 (SNR, theta) pairs, non-decreasing steps " + std::to_string(violations)};
}

Outcome criterion_6() {
  const std::vector<double> exponents{2.5, 3.0, 4.0, 5.0};
  auto curve = [&](double snr, bool noise_limited) {
    std::vector<double> out;
    for (double n : exponents) {
      Scenario s = fig2(-5.0, snr);
      s.ple_override = n;
      out.push_back(noise_limited ? coverage_noise_limited(s).value : coverage_rayleigh(s).value);
    }
    return out;
  };
  auto strictly = [](const std::vector<double>& v, bool increasing) {
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (increasing ? !(v[i] > v[i - 1]) : !(v[i] < v[i - 1])) return false;
    }
    return true;
  };
  auto show = [](const std::vector<double>& v) {
    std::string out;
    for (double x : v) out += (out.empty() ? "" : " ") + fmt("%.3f", x);
    return out;
  };
  const auto high = curve(50.0, false);
  const auto low_exact = curve(10.0, false);
  const auto low_nl = curve(10.0, true);
  const bool pass = strictly(high, true) && strictly(low_exact, false) && strictly(low_nl, false);
  return {pass, "n = 2.5,3,4,5; SNR 50 dB: " + show(high) + "; SNR 10 dB exact: " + show(low_exact) +
                    "; SNR 10 dB noise-limited: " + show(low_nl)};
}

Outcome criterion_7() {
  auto scenario = [](double theta_db) {
    Scenario s;
    s.deployment.lambda = per_km2_to_per_m2(1.0);
    s.deployment.l_min = 20.0;
    s.deployment.l_max = 600.0;
    s.deployment.z = 20.0;
    s.radio.theta = db_to_linear(theta_db);
    s.radio.beta0 = 1.0;
    return s;
  };
  const std::vector<double> thetas{-15.0, -10.0, -5.0};

  const auto t0 = Clock::now();
  std::vector<double> optima;
  for (double t : thetas) optima.push_back(optimal_height(scenario(t)).optimum.argument);
  const double analytic_seconds = seconds_since(t0);

  HeightSearchOptions mc_opts;
  mc_opts.evaluator = HeightEvaluator::kMonteCarlo;
  mc_opts.mc = mc(kHeightMcTrials);
  const auto t1 = Clock::now();
  std::vector<double> mc_optima;
  for (double t : thetas) mc_optima.push_back(optimal_height(scenario(t), mc_opts).optimum.argument);
  const double mc_seconds = seconds_since(t1);

  bool pass = analytic_seconds < kAnalyticHeightSeconds && mc_seconds < kMcHeightSeconds;
  for (double z : optima) pass = pass && std::abs(z - kHeightTarget) <= kHeightTol;
  const auto [lo, hi] = std::minmax_element(optima.begin(), optima.end());
  pass = pass && (*hi - *lo) <= kHeightSpread;

  std::string detail = "analytic optima";
  for (double z : optima) detail += " " + fmt("%.1f", z);
  detail += " m (" + fmt("%.2f", analytic_seconds) + " s); Monte Carlo evaluator optima";
  for (double z : mc_optima) detail += " " + fmt("%.1f", z);
  detail += " m (" + fmt("%.1f", mc_seconds) + " s)";
  return {pass, detail};
}

Outcome criterion_8() {
  auto gap_at = [](double snr, double theta_db, double* residual) {
    Scenario s;
    s.deployment.z = 100.0;
    s.radio.theta = db_to_linear(theta_db);
    s.radio.beta0 = db_to_linear(-snr);
    s.ple_override = 4.0;
    const auto coeffs =
        density_coeffs(100.0, s.radio.theta, s.radio.beta0, 100.0, rho_closed_n4(s.radio.theta));
    const auto closed = optimal_density_closed(coeffs);
    const auto numeric = optimal_density_numeric(s, {});
    if (residual) *residual = std::max(*residual, closed.residual);
    return std::abs(closed.optimum.argument - numeric.optimum.argument) / numeric.optimum.argument;
  };

  double residual = 0.0, worst = 0.0;
  std::string detail = "gaps";
  for (double snr : {40.0, 50.0}) {
    for (double t : {0.0, 5.0, 10.0}) {
      const double g = gap_at(snr, t, &residual);
      worst = std::max(worst, g);
      detail += " (" + fmt("%g", snr) + " dB, " + fmt("%g", t) + " dB) " + fmt("%.3f", g);
    }
  }
  bool snr_trend = true;
  detail += "; at 20 dB";
  for (double t : {0.0, 5.0, 10.0}) {
    const double g = gap_at(20.0, t, &residual);
    detail += " (" + fmt("%g", t) + " dB) " + fmt("%.3f", g);
    snr_trend = snr_trend && g > gap_at(40.0, t, nullptr);
  }
  const bool theta_trend =
      gap_at(40.0, 0.0, nullptr) > gap_at(40.0, 5.0, nullptr) && gap_at(40.0, 5.0, nullptr) > gap_at(40.0, 10.0, nullptr);
  detail += "; max gap " + fmt("%.3f", worst) + "; gap grows as SNR drops: " + (snr_trend ? "yes" : "no") +
            "; gap grows as theta drops: " + (theta_trend ? "yes" : "no") + "; max cubic residual " +
            fmt("%.2g", residual);
  return {worst <= kDensityGap && snr_trend && theta_trend && residual < kCubicResidual, detail};
}

Outcome criterion_9() {
  const auto t0 = Clock::now();
  const McConfig cfg = mc(kTrials, 99);
  Scenario base = fig2(0.0, 20.0);
  base.radio.fading = Rician{db_to_linear(10.0)};
  const double m = fading_shape(base.radio.fading);
  const auto samples = sample_links(base, cfg);
  const double radius = region_radius_for(base, cfg);
  int disagree = 0, below_rayleigh = 0, high_points = 0;
  double worst_ratio = 0.0;
  for (double snr : {20.0, 40.0}) {
    for (double t : theta_grid()) {
      const Scenario s = fig2(t, snr);
      const auto rician = coverage_from_samples(samples, s.radio.theta, s.radio.beta0, cfg.confidence_level, radius);
      const auto naka = nakagami_from_samples(samples, s.radio.theta, s.radio.beta0, m, cfg.confidence_level, radius);
      const double ci = std::max(rician.ci_half_width, naka.ci_half_width);
      const double diff = std::abs(rician.estimate - naka.estimate);
      worst_ratio = std::max(worst_ratio, diff / ci);
      disagree += diff > kFadingCiMultiple * ci;
      const double rayleigh = coverage_rayleigh(s).value;
      if (rayleigh >= kHighCoverage) {
        ++high_points;
        below_rayleigh += rician.estimate < rayleigh - rician.ci_half_width;
        below_rayleigh += naka.estimate < rayleigh - naka.ci_half_width;
      }
    }
  }
  return {disagree == 0 && below_rayleigh == 0,
          "m = " + fmt("%.4f", m) + ", max |Rician - Nakagami| / CI = " + fmt("%.2f", worst_ratio) +
              ", disagreements " + std::to_string(disagree) + ", points under Rayleigh " +
              std::to_string(below_rayleigh) + " of " + std::to_string(2 * high_points) + ", runtime " +
              fmt("%.1f", seconds_since(t0)) + " s"};
}

Outcome criterion_10() {
  cli::RunConfig c;
  c.axis = "theta_db";
  c.from = -20.0;
  c.to = 20.0;
  c.step = 1.0;
  c.methods = {"exact-quadrature", "monte-carlo"};
  c.trials = 20000;
  c.seed = 5;
  auto sweep = [](cli::RunConfig cfg) {
    std::ostringstream csv, log;
    cli::cmd_sweep(cfg, csv, log);
    return csv.str();
  };
  cli::RunConfig single = c;
  single.workers = 1;
  const std::string first = sweep(c);
  const bool identical = first == sweep(c) && first == sweep(single);

  McConfig cfg = mc(kTrials, 31);
  const Scenario base = fig2(0.0, 20.0);
  const double radius = region_radius_for(base, cfg);
  cfg.region_radius = radius;
  const auto near = sample_links(base, cfg);
  cfg.region_radius = 2.0 * radius;
  const auto far = sample_links(base, cfg);
  int moved = 0;
  double worst = 0.0;
  for (double snr : {20.0, 40.0}) {
    for (double t : theta_grid()) {
      const Scenario s = fig2(t, snr);
      const auto a = coverage_from_samples(near, s.radio.theta, s.radio.beta0, cfg.confidence_level, radius);
      const auto b = coverage_from_samples(far, s.radio.theta, s.radio.beta0, cfg.confidence_level, 2.0 * radius);
      const double shift = std::abs(a.estimate - b.estimate);
      worst = std::max(worst, shift / a.ci_half_width);
      moved += !(shift < a.ci_half_width);
    }
  }
  return {identical && moved == 0, std::string("repeat and worker-count runs ") +
                                       (identical ? "byte-identical" : "differ") + "; window " + fmt("%.0f", radius) +
                                       " m -> " + fmt("%.0f", 2.0 * radius) + " m: max shift / CI = " +
                                       fmt("%.3f", worst) + ", points at or over one CI " + std::to_string(moved)};
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "analytic vs Monte Carlo, Rayleigh", criterion_1},
      {2, "n = 4 closed form vs quadrature", criterion_2},
      {3, "rho identity at n = 4", criterion_3},
      {4, "no-noise limit", criterion_4},
      {5, "coverage falls with height", criterion_5},
      {6, "path-loss exponent sign flip", criterion_6},
      {7, "optimal height", criterion_7},
      {8, "optimal density closed form vs numeric", criterion_8},
      {9, "Rician vs Nakagami approximation", criterion_9},
      {10, "determinism and window truncation", criterion_10},
  };

  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
      return 2;
    }
  }

  int failed = 0, ran = 0;
  for (const auto& c : all) {
    if (only && c.id != only) continue;
    ++ran;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str());
    std::fflush(stdout);
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }
  return failed ? 1 : 0;
}
