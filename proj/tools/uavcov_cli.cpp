#include "uavcov_cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "uavcov/analytic.hpp"
#include "uavcov/errors.hpp"
#include "uavcov/montecarlo.hpp"
#include "uavcov/optimize.hpp"

namespace uavcov::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using nlohmann::json;

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

template <typename T>
void read_field(const json& j, const char* key, T& field) {
  if (!j.contains(key)) return;
  try {
    field = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

template <typename T>
void read_optional(const json& j, const char* key, std::optional<T>& field) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    field.reset();
    return;
  }
  T value{};
  read_field(j, key, value);
  field = value;
}

template <typename T>
json optional_to_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

bool is_analytic(CoverageMethod m) {
  return m != CoverageMethod::kMonteCarlo && m != CoverageMethod::kNakagamiSemianalytic;
}

bool needs_n4(CoverageMethod m) {
  return m == CoverageMethod::kClosedN4 || m == CoverageMethod::kDensityApprox;
}

std::vector<CoverageMethod> parse_methods(const RunConfig& config) {
  require(!config.methods.empty(), "at least one method is required");
  std::vector<CoverageMethod> out;
  for (const auto& name : config.methods) {
    CoverageMethod m;
    try {
      m = coverage_method_from_string(name);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    require(std::find(out.begin(), out.end(), m) == out.end(), "method listed twice: " + name);
    out.push_back(m);
  }
  return out;
}

std::string axis_column(const std::string& axis) {
  if (axis == "z") return "z_m";
  if (axis == "lambda") return "lambda_per_km2";
  return axis;
}

McConfig mc_config(const RunConfig& config) {
  McConfig mc;
  mc.trials = config.trials;
  mc.seed = config.seed;
  mc.region_radius = config.region_radius_m;
  mc.confidence_level = config.confidence;
  mc.workers = config.workers;
  return mc;
}

unsigned worker_count(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(i) for i in [0, count) on a small pool; order of completion does
// not matter because every index writes its own slot.
template <typename Body>
void parallel_for(std::size_t count, unsigned workers, Body body) {
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i = next++; i < count; i = next++) body(i);
  };
  const unsigned n = std::min<std::size_t>(worker_count(workers), count);
  if (n <= 1) {
    run();
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < n; ++w) pool.emplace_back(run);
}

struct Cell {
  double value = kNaN;
  double error = kNaN;
  bool ok() const { return !std::isnan(value); }
};

Cell evaluate_analytic(CoverageMethod method, const Scenario& s) {
  try {
    switch (method) {
      case CoverageMethod::kExactQuadrature: {
        const auto e = coverage_rayleigh(s);
        return {e.value, e.error_bound};
      }
      case CoverageMethod::kClosedN4: {
        const auto e = coverage_rayleigh_n4_closed(s);
        return {e.value, e.error_bound};
      }
      case CoverageMethod::kNoNoise: {
        const auto e = coverage_no_noise(s);
        return {e.value, e.error_bound};
      }
      case CoverageMethod::kNoiseLimited: {
        const auto e = coverage_noise_limited(s);
        return {e.value, e.error_bound};
      }
      case CoverageMethod::kDensityApprox: {
        const auto c = density_coeffs(s.deployment.z, s.radio.theta, s.radio.beta0, s.environment.d0,
                                      rho_closed_n4(s.radio.theta));
        const double approx = coverage_density_approx(s.deployment.lambda, c).value;
        // distance from the expression it approximates
        return {approx, std::abs(approx - coverage_rayleigh_n4_closed(s).value)};
      }
      default:
        break;
    }
  } catch (const std::domain_error&) {
  } catch (const NumericError&) {
  }
  return {};
}

// Rejects method/scenario combinations that can never be evaluated.
void check_method_applicability(const std::vector<CoverageMethod>& methods, const Scenario& s) {
  for (auto m : methods) {
    const auto name = std::string(to_string(m));
    if (is_analytic(m)) {
      require(fading_shape(s.radio.fading) == 1.0, name + " assumes Rayleigh fading");
    }
    if (needs_n4(m)) require(s.exponent() == 4.0, name + " needs a fixed path-loss exponent of 4");
    if (needs_n4(m) || m == CoverageMethod::kNoiseLimited) {
      require(s.radio.beta0 > 0.0, name + " needs a finite SNR");
    }
  }
}

void write_row(std::ostream& os, double axis_value, const std::vector<Cell>& cells) {
  os << format_number(axis_value);
  for (const auto& c : cells) os << ',' << format_number(c.value) << ',' << format_number(c.error);
  os << '\n';
}

}  // namespace

json to_json(const RunConfig& c) {
  json j;
  j["terrain_a"] = c.terrain_a;
  j["terrain_b"] = c.terrain_b;
  j["terrain_c"] = c.terrain_c;
  j["d0_m"] = c.d0_m;
  j["density_per_km2"] = c.density_per_km2;
  j["height_m"] = c.height_m;
  j["theta_db"] = c.theta_db;
  j["snr_db"] = std::isinf(c.snr_db) ? json(nullptr) : json(c.snr_db);
  j["ple"] = optional_to_json(c.ple);
  j["sui"] = c.sui;
  j["fading"] = c.fading;
  j["nakagami_m"] = c.nakagami_m;
  j["rician_k_db"] = c.rician_k_db;
  j["axis"] = c.axis;
  j["from"] = optional_to_json(c.from);
  j["to"] = optional_to_json(c.to);
  j["step"] = optional_to_json(c.step);
  j["methods"] = c.methods;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["confidence"] = c.confidence;
  j["workers"] = c.workers;
  j["region_radius_m"] = optional_to_json(c.region_radius_m);
  j["target"] = c.target;
  j["out"] = c.out;
  return j;
}

RunConfig from_json(const json& j, RunConfig c) {
  require(j.is_object(), "config must be a JSON object");
  static const std::vector<std::string> known{
      "terrain_a", "terrain_b", "terrain_c", "d0_m",   "density_per_km2", "height_m", "theta_db",
      "snr_db",    "ple",       "sui",       "fading", "nakagami_m",      "rician_k_db", "axis",
      "from",      "to",        "step",      "methods", "trials",         "seed",     "confidence",
      "workers",   "region_radius_m", "target", "out"};
  for (const auto& [key, value] : j.items()) {
    require(std::find(known.begin(), known.end(), key) != known.end(), "unknown config key: " + key);
  }
  read_field(j, "terrain_a", c.terrain_a);
  read_field(j, "terrain_b", c.terrain_b);
  read_field(j, "terrain_c", c.terrain_c);
  read_field(j, "d0_m", c.d0_m);
  read_field(j, "density_per_km2", c.density_per_km2);
  read_field(j, "height_m", c.height_m);
  read_field(j, "theta_db", c.theta_db);
  if (j.contains("snr_db")) {
    if (j.at("snr_db").is_null()) {
      c.snr_db = std::numeric_limits<double>::infinity();
    } else {
      read_field(j, "snr_db", c.snr_db);
    }
  }
  read_optional(j, "ple", c.ple);
  read_field(j, "sui", c.sui);
  read_field(j, "fading", c.fading);
  read_field(j, "nakagami_m", c.nakagami_m);
  read_field(j, "rician_k_db", c.rician_k_db);
  read_field(j, "axis", c.axis);
  read_optional(j, "from", c.from);
  read_optional(j, "to", c.to);
  read_optional(j, "step", c.step);
  read_field(j, "methods", c.methods);
  read_field(j, "trials", c.trials);
  read_field(j, "seed", c.seed);
  read_field(j, "confidence", c.confidence);
  read_field(j, "workers", c.workers);
  read_optional(j, "region_radius_m", c.region_radius_m);
  read_field(j, "target", c.target);
  read_field(j, "out", c.out);
  return c;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  return from_json(j, std::move(base));
}

void validate(const RunConfig& c) {
  require(c.sui != c.ple.has_value(), "choose exactly one of a fixed path-loss exponent (ple) or sui");
  require(c.fading == "rayleigh" || c.fading == "nakagami" || c.fading == "rician",
          "fading must be rayleigh, nakagami or rician");
  require(c.axis == "theta_db" || c.axis == "snr_db" || c.axis == "z" || c.axis == "ple" || c.axis == "lambda",
          "axis must be one of theta_db, snr_db, z, ple, lambda");
  require(c.target == "height" || c.target == "density", "target must be height or density");
  require(std::isfinite(c.theta_db), "theta_db must be finite");
  require(!std::isnan(c.snr_db) && c.snr_db != -std::numeric_limits<double>::infinity(),
          "snr_db must be a number or +inf");
  require(c.density_per_km2 > 0.0, "density_per_km2 must be positive");
  require(c.height_m >= 0.0, "height_m must be >= 0");
  require(c.trials >= 1, "trials must be >= 1");
  require(c.confidence > 0.0 && c.confidence < 1.0, "confidence must lie in (0, 1)");
  require(!c.region_radius_m || *c.region_radius_m > 0.0, "region_radius_m must be positive");
  require(!c.step || *c.step > 0.0, "step must be positive");
  require(!c.from || !c.to || *c.from <= *c.to, "from must not exceed to");
  require(c.perturb_rho > 0.0, "perturb_rho must be positive");
  parse_methods(c);
  to_scenario(c);
}

Scenario to_scenario(const RunConfig& c) {
  Scenario s;
  s.environment.terrain_a = c.terrain_a;
  s.environment.terrain_b = c.terrain_b;
  s.environment.terrain_c = c.terrain_c;
  s.environment.d0 = c.d0_m;
  s.deployment.lambda = per_km2_to_per_m2(c.density_per_km2);
  s.deployment.z = c.height_m;
  s.radio.theta = db_to_linear(c.theta_db);
  s.radio.beta0 = std::isinf(c.snr_db) ? 0.0 : db_to_linear(-c.snr_db);
  if (c.fading == "nakagami") {
    s.radio.fading = Nakagami{c.nakagami_m};
  } else if (c.fading == "rician") {
    s.radio.fading = Rician{db_to_linear(c.rician_k_db)};
  }
  if (!c.sui) s.ple_override = c.ple;
  try {
    s.validate();
    if (c.sui) s.exponent();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
  return s;
}

RunConfig at_axis(const RunConfig& config, double value) {
  RunConfig c = config;
  if (c.axis == "theta_db") {
    c.theta_db = value;
  } else if (c.axis == "snr_db") {
    c.snr_db = value;
  } else if (c.axis == "z") {
    c.height_m = value;
  } else if (c.axis == "ple") {
    c.ple = value;
    c.sui = false;
  } else if (c.axis == "lambda") {
    c.density_per_km2 = value;
  }
  return c;
}

std::vector<double> axis_values(double from, double to, double step) {
  require(std::isfinite(from) && std::isfinite(to), "sweep bounds must be finite");
  require(step > 0.0, "step must be positive");
  require(from <= to, "from must not exceed to");
  const auto count = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
  require(count <= 1000000, "sweep has too many points");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = from + static_cast<double>(i) * step;
  return out;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

int cmd_sweep(const RunConfig& config, std::ostream& csv, std::ostream& log) {
  validate(config);
  const auto methods = parse_methods(config);
  const double from = config.from.value_or(-20.0);
  const double to = config.to.value_or(20.0);
  const double step = config.step.value_or(1.0);
  const auto values = axis_values(from, to, step);

  std::vector<Scenario> scenarios;
  for (double v : values) {
    scenarios.push_back(to_scenario(at_axis(config, v)));
    check_method_applicability(methods, scenarios.back());
  }

  std::vector<std::vector<Cell>> table(values.size(), std::vector<Cell>(methods.size()));
  parallel_for(values.size(), config.workers, [&](std::size_t i) {
    for (std::size_t k = 0; k < methods.size(); ++k) {
      if (is_analytic(methods[k])) table[i][k] = evaluate_analytic(methods[k], scenarios[i]);
    }
  });

  const McConfig mc = mc_config(config);
  const bool shared_geometry = config.axis == "theta_db" || config.axis == "snr_db";
  std::vector<LinkSample> shared;
  for (std::size_t k = 0; k < methods.size(); ++k) {
    const auto m = methods[k];
    if (is_analytic(m)) continue;
    if (shared_geometry && shared.empty()) shared = sample_links(scenarios.front(), mc);
    for (std::size_t i = 0; i < values.size(); ++i) {
      const Scenario& s = scenarios[i];
      const double radius = region_radius_for(s, mc);
      try {
        McResult r;
        if (m == CoverageMethod::kMonteCarlo) {
          r = shared_geometry ? coverage_from_samples(shared, s.radio.theta, s.radio.beta0, mc.confidence_level, radius)
                              : simulate_coverage(s, mc);
        } else if (shared_geometry) {
          r = nakagami_from_samples(shared, s.radio.theta, s.radio.beta0, fading_shape(s.radio.fading),
                                    mc.confidence_level, radius);
        } else {
          r = coverage_nakagami_semianalytic(s, mc);
        }
        table[i][k] = {r.estimate, r.ci_half_width};
      } catch (const std::invalid_argument&) {
      }
    }
  }

  csv << axis_column(config.axis);
  for (auto m : methods) csv << ',' << to_string(m) << ',' << to_string(m) << "_error_bound";
  csv << '\n';
  std::size_t failures = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    write_row(csv, values[i], table[i]);
    for (const auto& c : table[i]) failures += c.ok() ? 0 : 1;
  }

  log << "sweep axis=" << config.axis << " rows=" << values.size() << " methods=";
  for (std::size_t k = 0; k < methods.size(); ++k) log << (k ? "," : "") << to_string(methods[k]);
  log << " failed_cells=" << failures << '\n';

  const auto exact = std::find(methods.begin(), methods.end(), CoverageMethod::kExactQuadrature);
  const auto sim = std::find(methods.begin(), methods.end(), CoverageMethod::kMonteCarlo);
  if (exact != methods.end() && sim != methods.end()) {
    const auto ke = static_cast<std::size_t>(exact - methods.begin());
    const auto ks = static_cast<std::size_t>(sim - methods.begin());
    double worst = 0.0;
    for (const auto& row : table) {
      if (row[ke].ok() && row[ks].ok()) worst = std::max(worst, std::abs(row[ke].value - row[ks].value));
    }
    log << "max_abs_diff exact-quadrature monte-carlo " << format_number(worst) << '\n';
  }
  return failures ? kExitNumericFailure : kExitOk;
}

namespace {

int optimize_height(const RunConfig& config, std::ostream& csv, std::ostream& log) {
  Scenario s = to_scenario(config);
  s.deployment.l_min = config.from.value_or(20.0);
  s.deployment.l_max = config.to.value_or(600.0);
  s.deployment.z = s.deployment.l_min;
  require(s.deployment.l_min >= 20.0, "height search needs from >= 20 m");
  require(s.deployment.l_max >= s.deployment.l_min, "from must not exceed to");

  HeightSearchOptions opts;
  opts.step = config.step.value_or(5.0);
  opts.mc = mc_config(config);
  const auto methods = parse_methods(config);
  const bool mc = std::find(methods.begin(), methods.end(), CoverageMethod::kMonteCarlo) != methods.end();
  opts.evaluator = mc ? HeightEvaluator::kMonteCarlo : HeightEvaluator::kAnalytic;
  if (!mc) require(fading_shape(s.radio.fading) == 1.0, "the analytic height evaluator assumes Rayleigh fading");

  const HeightOptimum r = optimal_height(s, opts);
  std::vector<std::pair<HeightCurvePoint, bool>> rows;
  for (const auto& p : r.curve) rows.emplace_back(p, false);
  if (r.optimum.method == OptimumMethod::kGoldenSection) {
    HeightCurvePoint p = evaluate_height(s, r.optimum.argument, opts);
    p.coverage = r.optimum.value;
    const auto pos = std::find_if(rows.begin(), rows.end(), [&](const auto& row) { return row.first.z > p.z; });
    rows.insert(pos, {p, true});
  } else {
    for (auto& row : rows) {
      if (row.first.z == r.optimum.argument) {
        row.second = true;
        break;
      }
    }
  }

  csv << "z_m,coverage,ple,method,optimum\n";
  for (const auto& [p, flagged] : rows) {
    csv << format_number(p.z) << ',' << format_number(p.coverage) << ',' << format_number(p.exponent) << ','
        << to_string(p.method) << ',' << (flagged ? 1 : 0) << '\n';
  }
  log << "optimum target=height z_m=" << format_number(r.optimum.argument)
      << " coverage=" << format_number(r.optimum.value) << " method=" << to_string(r.optimum.method)
      << " evaluator=" << (mc ? "monte-carlo" : "analytic") << " mc_fallbacks=" << r.mc_fallbacks << '\n';
  return kExitOk;
}

int optimize_density(const RunConfig& config, std::ostream& csv, std::ostream& log) {
  const Scenario s = to_scenario(config);
  check_method_applicability({CoverageMethod::kClosedN4, CoverageMethod::kDensityApprox}, s);
  const double lo = config.from.value_or(0.01);
  const double hi = config.to.value_or(100.0);
  require(lo > 0.0 && lo <= hi, "density bounds need 0 < from <= to");

  const DensityBounds bounds{per_km2_to_per_m2(lo), per_km2_to_per_m2(hi)};
  const auto numeric = optimal_density_numeric(s, bounds);
  const auto coeffs = density_coeffs(s.deployment.z, s.radio.theta, s.radio.beta0, s.environment.d0,
                                     rho_closed_n4(s.radio.theta));
  const auto closed = optimal_density_closed(coeffs);

  struct Row {
    double lambda;
    std::string flag;
  };
  std::vector<Row> rows;
  if (lo == hi) {
    rows.push_back({bounds.lower, "numeric"});
  } else {
    const int points = 81;
    for (int i = 0; i < points; ++i) {
      const double x = std::log10(bounds.lower) + (std::log10(bounds.upper) - std::log10(bounds.lower)) * i / (points - 1);
      rows.push_back({std::pow(10.0, x), ""});
    }
    rows.push_back({numeric.optimum.argument, "numeric"});
    const double lc = closed.optimum.argument;
    if (lc >= bounds.lower && lc <= bounds.upper) rows.push_back({lc, "closed-form"});
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.lambda < b.lambda; });
  }

  csv << "lambda_per_km2,closed-n4,density-approx,optimum\n";
  for (const auto& row : rows) {
    Scenario at = s;
    at.deployment.lambda = row.lambda;
    csv << format_number(per_m2_to_per_km2(row.lambda)) << ','
        << format_number(coverage_rayleigh_n4_closed(at).value) << ','
        << format_number(coverage_density_approx(row.lambda, coeffs).value) << ',' << row.flag << '\n';
  }

  const double gap = std::abs(closed.optimum.argument - numeric.optimum.argument) / numeric.optimum.argument;
  log << "optimum target=density numeric_per_km2=" << format_number(per_m2_to_per_km2(numeric.optimum.argument))
      << " closed_per_km2=" << format_number(per_m2_to_per_km2(closed.optimum.argument))
      << " rel_gap=" << format_number(gap) << " residual=" << format_number(closed.residual)
      << " cardano_match=" << closed.matching_variant << " cardano_27_gap=" << format_number(closed.cardano_27_rel_gap)
      << " cardano_8_gap=" << format_number(closed.cardano_8_rel_gap)
      << " fallback_to_grid=" << (numeric.fallback_to_grid ? 1 : 0) << '\n';
  return kExitOk;
}

std::string short_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", value);
  return buf;
}

struct CheckResult {
  std::string name;
  bool pass;
  double metric;
  double tolerance;
  std::size_t points;
};

CheckResult check_closed_form_identity(const RunConfig& config) {
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> theta_db(-20.0, 20.0), z(20.0, 400.0), log_density(-1.0, 1.0),
      snr_db(0.0, 50.0);
  const double d0 = config.d0_m;
  double worst = 0.0;
  const int tuples = 100;
  for (int i = 0; i < tuples; ++i) {
    Scenario s;
    s.environment.d0 = d0;
    s.deployment.lambda = per_km2_to_per_m2(std::pow(10.0, log_density(rng)));
    s.deployment.z = z(rng);
    s.radio.theta = db_to_linear(theta_db(rng));
    s.radio.beta0 = db_to_linear(-snr_db(rng));
    s.ple_override = 4.0;
    const double r = rho(s.radio.theta, 4.0) * config.perturb_rho;
    const double quad = rayleigh_coverage_integral(s.deployment.lambda, s.deployment.z, s.radio.theta,
                                                   s.radio.beta0, d0, 4.0, r)
                            .value;
    const double closed = coverage_rayleigh_n4_closed(s).value;
    worst = std::max(worst, std::abs(quad - closed) / closed);
  }
  return {"closed_form_identity", worst <= 1e-6, worst, 1e-6, tuples};
}

CheckResult check_rho_identity(const RunConfig& config) {
  double worst = 0.0;
  const int points = 61;
  for (int i = 0; i < points; ++i) {
    const double theta = std::pow(10.0, -3.0 + 6.0 * i / (points - 1));
    worst = std::max(worst, std::abs(rho(theta, 4.0) * config.perturb_rho - rho_closed_n4(theta)));
  }
  return {"rho_identity", worst <= 1e-8, worst, 1e-8, points};
}

CheckResult check_no_noise_limit(const RunConfig& config) {
  Scenario s;
  s.environment.d0 = config.d0_m;
  s.deployment.lambda = per_km2_to_per_m2(config.density_per_km2);
  s.deployment.z = config.height_m;
  s.radio.theta = db_to_linear(config.theta_db);
  s.ple_override = 4.0;
  const double limit = coverage_no_noise(s).value;
  const double r = rho(s.radio.theta, 4.0) * config.perturb_rho;
  double prev = std::numeric_limits<double>::infinity();
  bool monotone = true;
  double gap = 0.0;
  for (double beta0 : {1e-3, 1e-5, 1e-7}) {
    const double v = rayleigh_coverage_integral(s.deployment.lambda, s.deployment.z, s.radio.theta, beta0,
                                                config.d0_m, 4.0, r)
                         .value;
    gap = std::abs(v - limit);
    monotone = monotone && gap < prev;
    prev = gap;
  }
  return {"no_noise_limit", monotone && gap <= 1e-4, gap, 1e-4, 3};
}

CheckResult check_mc_agreement(const RunConfig& config) {
  RunConfig c = config;
  c.fading = "rayleigh";
  c.sui = false;
  c.ple = 4.0;
  const Scenario base = to_scenario(c);
  const McConfig mc = mc_config(config);
  const auto samples = sample_links(base, mc);
  const double radius = region_radius_for(base, mc);
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t points = 0;
  for (double theta_db : axis_values(-20.0, 20.0, 1.0)) {
    Scenario s = base;
    s.radio.theta = db_to_linear(theta_db);
    const double exact = coverage_rayleigh(s).value;
    const auto sim = coverage_from_samples(samples, s.radio.theta, s.radio.beta0, mc.confidence_level, radius);
    worst = std::max(worst, std::abs(exact - sim.estimate) - std::max(0.01, sim.ci_half_width));
    ++points;
  }
  // metric is the worst excess over max(0.01, CI half-width)
  return {"mc_agreement", worst <= 0.0, worst, 0.0, points};
}

}  // namespace

int cmd_optimize(const RunConfig& config, std::ostream& csv, std::ostream& log) {
  validate(config);
  return config.target == "height" ? optimize_height(config, csv, log) : optimize_density(config, csv, log);
}

int cmd_validate(const RunConfig& config, std::ostream& report) {
  validate(config);
  const std::vector<CheckResult> checks{check_closed_form_identity(config), check_rho_identity(config),
                                        check_no_noise_limit(config), check_mc_agreement(config)};
  std::size_t failed = 0;
  for (const auto& c : checks) {
    report << "check=" << c.name << " status=" << (c.pass ? "pass" : "fail") << " metric=" << format_number(c.metric)
           << " tolerance=" << short_number(c.tolerance) << " points=" << c.points << '\n';
    failed += c.pass ? 0 : 1;
  }
  report << "validate status=" << (failed ? "fail" : "pass") << " checks=" << checks.size() << " failed=" << failed
         << '\n';
  for (const auto& c : checks) {
    if (!c.pass) report << "failed " << c.name << '\n';
  }
  return failed ? kExitValidationFailed : kExitOk;
}

int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coverage probability of UAV networks: sweeps, optimization and validation"};
  app.require_subcommand(1);
  auto* sweep = app.add_subcommand("sweep", "Coverage along one axis, written as CSV")->fallthrough();
  app.add_subcommand("optimize", "Optimal height or density")->fallthrough();
  auto* check = app.add_subcommand("validate", "Cross-method identity and agreement checks")->fallthrough();

  std::string config_path;
  RunConfig f;  // flag values; applied only when given
  std::vector<double> terrain;
  double ple = 4.0, from = 0.0, to = 0.0, step = 0.0, radius = 0.0;

  app.add_option("--config", config_path, "JSON config file; flags override its values");
  auto* o_axis = app.add_option("--axis", f.axis, "Sweep axis: theta_db, snr_db, z, ple, lambda");
  auto* o_from = app.add_option("--from", from, "Sweep start, or lower search bound for optimize");
  auto* o_to = app.add_option("--to", to, "Sweep end, or upper search bound for optimize");
  auto* o_step = app.add_option("--step", step, "Sweep step, or height grid step for optimize");
  auto* o_method = app.add_option("--method", f.methods, "Methods, comma separated")->delimiter(',');
  auto* o_snr = app.add_option("--snr-db", f.snr_db, "Reference SNR at d0 in dB (inf for no noise)");
  auto* o_theta = app.add_option("--theta-db", f.theta_db, "SINR threshold in dB");
  auto* o_height = app.add_option("--height-m", f.height_m, "UAV altitude in meters");
  auto* o_density = app.add_option("--density-per-km2", f.density_per_km2, "UAV density per km^2");
  auto* o_ple = app.add_option("--ple", ple, "Fixed path-loss exponent");
  auto* o_sui = app.add_flag("--sui", f.sui, "Path-loss exponent from the SUI height law");
  o_ple->excludes(o_sui);
  auto* o_terrain = app.add_option("--terrain", terrain, "SUI terrain constants a,b,c")->delimiter(',')->expected(3);
  auto* o_d0 = app.add_option("--d0", f.d0_m, "Reference distance in meters");
  auto* o_fading = app.add_option("--fading", f.fading, "rayleigh, nakagami or rician");
  auto* o_m = app.add_option("--nakagami-m", f.nakagami_m, "Nakagami shape m");
  auto* o_k = app.add_option("--rician-k-db", f.rician_k_db, "Rician K-factor in dB");
  auto* o_trials = app.add_option("--trials", f.trials, "Monte Carlo trials");
  auto* o_seed = app.add_option("--seed", f.seed, "Monte Carlo seed");
  auto* o_conf = app.add_option("--confidence", f.confidence, "Confidence level of intervals");
  auto* o_workers = app.add_option("--workers", f.workers, "Worker threads (0 = all cores)");
  auto* o_radius = app.add_option("--region-radius-m", radius, "Monte Carlo disk radius (default: auto)");
  auto* o_target = app.add_option("--target", f.target, "optimize: height or density");
  auto* o_out = app.add_option("--out", f.out, "CSV output path (default: stdout)");
  auto* o_perturb = app.add_option("--perturb-rho", f.perturb_rho)->group("");
  bool print_config = false;
  app.add_flag("--print-config", print_config, "Print the resolved config as JSON and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitBadConfig;
  }

  try {
    RunConfig c = config_path.empty() ? RunConfig{} : load_config_file(config_path);
    if (*o_axis) c.axis = f.axis;
    if (*o_from) c.from = from;
    if (*o_to) c.to = to;
    if (*o_step) c.step = step;
    if (*o_method) c.methods = f.methods;
    if (*o_snr) c.snr_db = f.snr_db;
    if (*o_theta) c.theta_db = f.theta_db;
    if (*o_height) c.height_m = f.height_m;
    if (*o_density) c.density_per_km2 = f.density_per_km2;
    if (*o_ple) {
      c.ple = ple;
      c.sui = false;
    }
    if (*o_sui) {
      c.sui = true;
      c.ple.reset();
    }
    if (*o_terrain) {
      c.terrain_a = terrain[0];
      c.terrain_b = terrain[1];
      c.terrain_c = terrain[2];
    }
    if (*o_d0) c.d0_m = f.d0_m;
    if (*o_fading) c.fading = f.fading;
    if (*o_m) c.nakagami_m = f.nakagami_m;
    if (*o_k) c.rician_k_db = f.rician_k_db;
    if (*o_trials) c.trials = f.trials;
    if (*o_seed) c.seed = f.seed;
    if (*o_conf) c.confidence = f.confidence;
    if (*o_workers) c.workers = f.workers;
    if (*o_radius) c.region_radius_m = radius;
    if (*o_target) c.target = f.target;
    if (*o_out) c.out = f.out;
    if (*o_perturb) c.perturb_rho = f.perturb_rho;

    if (print_config) {
      validate(c);
      out << to_json(c).dump(2) << '\n';
      return kExitOk;
    }

    if (check->parsed()) return cmd_validate(c, out);

    std::ostringstream csv;
    const int code = sweep->parsed() ? cmd_sweep(c, csv, c.out.empty() ? err : out)
                                     : cmd_optimize(c, csv, c.out.empty() ? err : out);
    if (c.out.empty()) {
      out << csv.str();
    } else {
      std::ofstream file(c.out, std::ios::binary);
      require(static_cast<bool>(file), "cannot write " + c.out);
      file << csv.str();
    }
    return code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumericFailure;
  } catch (const std::domain_error& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumericFailure;
  }
}

}  // namespace uavcov::cli
