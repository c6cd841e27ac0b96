#include "bioinsure/serialization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>

#include "bioinsure/errors.hpp"

namespace bioinsure {

using nlohmann::json;

namespace {

std::string child(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string element(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void expect_object(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ValidationError(path.empty() ? "<document>" : path, "must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ValidationError(child(path, key), "is not a recognized field");
    }
  }
}

const json& require(const json& j, const std::string& path, std::string_view key) {
  const auto it = j.find(std::string(key));
  if (it == j.end()) throw ValidationError(child(path, key), "is required");
  return *it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ValidationError(path, "must be a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw ValidationError(path, "must be finite");
  return x;
}

std::uint64_t as_count(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  if (j.is_number_float()) {
    const double x = j.get<double>();
    if (x >= 0.0 && x == std::floor(x) && x < 1.8e19) return static_cast<std::uint64_t>(x);
  }
  throw ValidationError(path, "must be a non-negative integer");
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ValidationError(path, "must be a boolean");
  return j.get<bool>();
}

double number(const json& j, const std::string& path, std::string_view key) {
  return as_number(require(j, path, key), child(path, key));
}

std::uint64_t count(const json& j, const std::string& path, std::string_view key) {
  return as_count(require(j, path, key), child(path, key));
}

BiodiversityLevel level(const json& j, const std::string& path, std::string_view key) {
  const double v = number(j, path, key);
  if (v < 0.0) throw ValidationError(child(path, key), "must be >= 0");
  return BiodiversityLevel(v);
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) throw ValidationError(path, "must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], element(path, i)));
  return out;
}

std::vector<std::size_t> indices(const json& j, const std::string& path) {
  if (!j.is_array()) throw ValidationError(path, "must be an array of species indices");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(static_cast<std::size_t>(as_count(j[i], element(path, i))));
  return out;
}

// Re-roots a validation failure raised with a path relative to `prefix`.
[[noreturn]] void rethrow_under(const std::string& prefix, const ValidationError& e) {
  if (prefix.empty()) throw e;
  throw ValidationError(child(prefix, e.field()), e.detail());
}

json finite_or_throw(double x, const char* name) {
  if (!std::isfinite(x)) throw NumericalError(std::string(name) + " is not finite");
  return x;
}

HazardDamageSpec hazard_from_json(const json& j, const std::string& path) {
  expect_object(j, path, {"event_probability", "damage_without", "damage_with", "periods"});
  HazardDamageSpec h{.event_probability = number(j, path, "event_probability"),
                     .damage_without = number(j, path, "damage_without"),
                     .damage_with = number(j, path, "damage_with"),
                     .periods = count(j, path, "periods")};
  validate(h, path.c_str());
  return h;
}

RegimeScenario regimes_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) throw ValidationError(path, "must be an array of regimes");
  RegimeScenario s;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string here = element(path, i);
    expect_object(j[i], here, {"probability", "service_by_species"});
    s.regimes.push_back(Regime{.probability = number(j[i], here, "probability"),
                               .service_by_species = numbers(require(j[i], here, "service_by_species"),
                                                             child(here, "service_by_species"))});
  }
  validate(s, path.c_str());
  return s;
}

ServicePortfolio portfolio_from_json(const json& j, const std::string& path) {
  expect_object(j, path, {"weights", "means", "covariance"});
  ServicePortfolio p;
  p.weights = numbers(require(j, path, "weights"), child(path, "weights"));
  p.means = numbers(require(j, path, "means"), child(path, "means"));
  const json& cov = require(j, path, "covariance");
  const std::string cov_path = child(path, "covariance");
  if (!cov.is_array()) throw ValidationError(cov_path, "must be an array of rows");
  for (std::size_t r = 0; r < cov.size(); ++r) {
    const auto row = numbers(cov[r], element(cov_path, r));
    if (row.size() != cov.size()) throw ValidationError(element(cov_path, r), "must have one entry per row");
    p.covariance.insert(p.covariance.end(), row.begin(), row.end());
  }
  validate(p, path.c_str());
  return p;
}

ResilienceInputs resilience_from_json(const json& j, const ScenarioSpec& base, const std::string& path) {
  expect_object(j, path,
                {"v", "hazard", "regimes", "retained", "reduced", "portfolio", "practice", "alternative_state"});
  ResilienceInputs in;
  in.scenario = base;
  in.v = level(j, path, "v");
  if (!base.v_bounds.contains(in.v.value())) throw ValidationError(child(path, "v"), "must lie inside v_bounds");
  in.hazard = hazard_from_json(require(j, path, "hazard"), child(path, "hazard"));
  in.regimes = regimes_from_json(require(j, path, "regimes"), child(path, "regimes"));
  in.retained = indices(require(j, path, "retained"), child(path, "retained"));
  in.reduced = indices(require(j, path, "reduced"), child(path, "reduced"));
  in.portfolio = portfolio_from_json(require(j, path, "portfolio"), child(path, "portfolio"));

  in.practice_hazard = in.hazard;
  in.practice_scenario = base;
  if (const auto it = j.find("practice"); it != j.end()) {
    const std::string practice = child(path, "practice");
    expect_object(*it, practice, {"hazard", "scenario"});
    if (it->contains("hazard")) in.practice_hazard = hazard_from_json(it->at("hazard"), child(practice, "hazard"));
    if (it->contains("scenario")) in.practice_scenario = scenario_from_json(it->at("scenario"), child(practice, "scenario"));
  }
  in.alternative_state = base;
  if (const auto it = j.find("alternative_state"); it != j.end()) {
    in.alternative_state = scenario_from_json(*it, child(path, "alternative_state"));
  }
  return in;
}

}  // namespace

ScenarioSpec scenario_from_json(const json& j, const std::string& path) {
  expect_object(j, path, {"service", "cost", "preference", "market", "v_bounds"});
  ScenarioSpec s;

  const std::string service = child(path, "service");
  const json& js = require(j, path, "service");
  expect_object(js, service, {"mu_max", "k_mu", "sigma_0", "k_sigma"});
  s.service = ServiceModel{.mu_max = number(js, service, "mu_max"),
                           .k_mu = number(js, service, "k_mu"),
                           .sigma_0 = number(js, service, "sigma_0"),
                           .k_sigma = number(js, service, "k_sigma")};

  const std::string cost = child(path, "cost");
  const json& jc = require(j, path, "cost");
  expect_object(jc, cost, {"c1", "c2"});
  s.cost = CostModel{.c1 = number(jc, cost, "c1"), .c2 = number(jc, cost, "c2")};

  const std::string pref = child(path, "preference");
  const json& jp = require(j, path, "preference");
  expect_object(jp, pref, {"rho"});
  s.preference = RiskPreference{.rho = number(jp, pref, "rho")};

  if (const auto it = j.find("market"); it != j.end()) {
    const std::string market = child(path, "market");
    expect_object(*it, market, {"lambda"});
    s.market = InsuranceMarket{.lambda = number(*it, market, "lambda")};
  }

  const std::string bounds = child(path, "v_bounds");
  const auto b = numbers(require(j, path, "v_bounds"), bounds);
  if (b.size() != 2) throw ValidationError(bounds, "must be a [lo, hi] pair");
  s.v_bounds = Interval{.lo = b[0], .hi = b[1]};

  try {
    return validate_scenario(s);
  } catch (const ValidationError& e) {
    rethrow_under(path, e);
  }
}

BufferPoolSpec buffer_pool_from_json(const json& j, const std::string& path) {
  expect_object(j, path,
                {"issuance_per_period", "buffer_fraction", "reversal_probability", "reversal_severity", "horizon"});
  BufferPoolSpec s{.issuance_per_period = number(j, path, "issuance_per_period"),
                   .buffer_fraction = number(j, path, "buffer_fraction"),
                   .reversal_probability = number(j, path, "reversal_probability"),
                   .reversal_severity = number(j, path, "reversal_severity"),
                   .horizon = count(j, path, "horizon")};
  validate(s, path.c_str());
  return s;
}

ScenarioDocument document_from_json(const json& j) {
  expect_object(j, "", {"service", "cost", "preference", "market", "v_bounds", "buffer_pool", "resilience"});
  json core = j;
  core.erase("buffer_pool");
  core.erase("resilience");
  ScenarioDocument doc;
  doc.scenario = scenario_from_json(core);
  if (const auto it = j.find("buffer_pool"); it != j.end()) doc.buffer_pool = buffer_pool_from_json(*it);
  if (const auto it = j.find("resilience"); it != j.end()) {
    doc.resilience = resilience_from_json(*it, doc.scenario, "resilience");
  }
  return doc;
}

ScenarioDocument parse_scenario_document(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ValidationError("<document>", std::string("is not valid JSON: ") + e.what());
  }
  return document_from_json(j);
}

ResilienceReport resilience_report_from_json(const json& j) {
  const std::string path;
  expect_object(j, path,
                {"component_a_insurance_value", "component_b_avoided_damage", "component_c_option_value",
                 "component_c_diversification", "component_d_practice_value", "regime_delta_ce"});
  return ResilienceReport{
      .component_a_insurance_value = number(j, path, "component_a_insurance_value"),
      .component_b_avoided_damage = number(j, path, "component_b_avoided_damage"),
      .component_c_option_value = number(j, path, "component_c_option_value"),
      .component_c_diversification = number(j, path, "component_c_diversification"),
      .component_d_practice_value = number(j, path, "component_d_practice_value"),
      .regime_delta_ce = number(j, path, "regime_delta_ce"),
  };
}

ValuationResult valuation_result_from_json(const json& j) {
  const std::string path;
  expect_object(j, path,
                {"v", "mu", "sigma", "cost", "risk_premium", "certainty_equivalent", "insurance_value",
                 "insurance_value_fd", "fd_step"});
  ValuationResult r{.v = level(j, path, "v")};
  r.mu = number(j, path, "mu");
  r.sigma = number(j, path, "sigma");
  r.cost = number(j, path, "cost");
  r.risk_premium = number(j, path, "risk_premium");
  r.certainty_equivalent = number(j, path, "certainty_equivalent");
  r.insurance_value = number(j, path, "insurance_value");
  r.insurance_value_fd = number(j, path, "insurance_value_fd");
  r.fd_step = number(j, path, "fd_step");
  return r;
}

OptimizationResult optimization_result_from_json(const json& j) {
  const std::string path;
  expect_object(j, path,
                {"v_star", "alpha_star", "ce_star", "foc_residual", "iterations", "converged", "active_bound"});
  OptimizationResult r{.v_star = level(j, path, "v_star")};
  r.alpha_star = number(j, path, "alpha_star");
  r.ce_star = number(j, path, "ce_star");
  r.foc_residual = number(j, path, "foc_residual");
  r.iterations = static_cast<int>(std::min<std::uint64_t>(count(j, path, "iterations"), std::numeric_limits<int>::max()));
  r.converged = as_bool(require(j, path, "converged"), "converged");
  const json& bound = require(j, path, "active_bound");
  if (bound == "none") {
    r.active_bound = ActiveBound::none;
  } else if (bound == "lower") {
    r.active_bound = ActiveBound::lower;
  } else if (bound == "upper") {
    r.active_bound = ActiveBound::upper;
  } else {
    throw ValidationError("active_bound", "must be one of none, lower, upper");
  }
  return r;
}

SimulationSummary simulation_summary_from_json(const json& j) {
  const std::string path;
  expect_object(j, path,
                {"shortfall_probability", "expected_terminal_buffer", "expected_net_credits", "trials",
                 "stderr_shortfall"});
  return SimulationSummary{
      .shortfall_probability = number(j, path, "shortfall_probability"),
      .expected_terminal_buffer = number(j, path, "expected_terminal_buffer"),
      .expected_net_credits = number(j, path, "expected_net_credits"),
      .trials = count(j, path, "trials"),
      .stderr_shortfall = number(j, path, "stderr_shortfall"),
  };
}

const char* to_string(ActiveBound b) noexcept {
  switch (b) {
    case ActiveBound::lower:
      return "lower";
    case ActiveBound::upper:
      return "upper";
    case ActiveBound::none:
      break;
  }
  return "none";
}

void to_json(json& j, const ScenarioSpec& s) {
  j = json{
      {"service",
       {{"mu_max", s.service.mu_max}, {"k_mu", s.service.k_mu}, {"sigma_0", s.service.sigma_0},
        {"k_sigma", s.service.k_sigma}}},
      {"cost", {{"c1", s.cost.c1}, {"c2", s.cost.c2}}},
      {"preference", {{"rho", s.preference.rho}}},
      {"v_bounds", {s.v_bounds.lo, s.v_bounds.hi}},
  };
  if (s.market) j["market"] = {{"lambda", s.market->lambda}};
}

void to_json(json& j, const BufferPoolSpec& s) {
  j = json{{"issuance_per_period", s.issuance_per_period},
           {"buffer_fraction", s.buffer_fraction},
           {"reversal_probability", s.reversal_probability},
           {"reversal_severity", s.reversal_severity},
           {"horizon", s.horizon}};
}

void to_json(json& j, const HazardDamageSpec& h) {
  j = json{{"event_probability", h.event_probability},
           {"damage_without", h.damage_without},
           {"damage_with", h.damage_with},
           {"periods", h.periods}};
}

void to_json(json& j, const RegimeScenario& r) {
  j = json::array();
  for (const auto& regime : r.regimes) {
    j.push_back({{"probability", regime.probability}, {"service_by_species", regime.service_by_species}});
  }
}

void to_json(json& j, const ServicePortfolio& p) {
  const std::size_t n = p.size();
  json rows = json::array();
  for (std::size_t r = 0; r < n; ++r) {
    rows.push_back(std::vector<double>(p.covariance.begin() + static_cast<std::ptrdiff_t>(r * n),
                                       p.covariance.begin() + static_cast<std::ptrdiff_t>((r + 1) * n)));
  }
  j = json{{"weights", p.weights}, {"means", p.means}, {"covariance", rows}};
}

void to_json(json& j, const ResilienceInputs& in) {
  j = json{{"v", in.v.value()},
           {"hazard", in.hazard},
           {"regimes", in.regimes},
           {"retained", in.retained},
           {"reduced", in.reduced},
           {"portfolio", in.portfolio},
           {"practice", {{"hazard", in.practice_hazard}, {"scenario", in.practice_scenario}}},
           {"alternative_state", in.alternative_state}};
}

void to_json(json& j, const ScenarioDocument& d) {
  to_json(j, d.scenario);
  if (d.buffer_pool) j["buffer_pool"] = *d.buffer_pool;
  if (d.resilience) j["resilience"] = *d.resilience;
}

void to_json(json& j, const ValuationResult& r) {
  j = json{{"v", finite_or_throw(r.v.value(), "v")},
           {"mu", finite_or_throw(r.mu, "mu")},
           {"sigma", finite_or_throw(r.sigma, "sigma")},
           {"cost", finite_or_throw(r.cost, "cost")},
           {"risk_premium", finite_or_throw(r.risk_premium, "risk_premium")},
           {"certainty_equivalent", finite_or_throw(r.certainty_equivalent, "certainty_equivalent")},
           {"insurance_value", finite_or_throw(r.insurance_value, "insurance_value")},
           {"insurance_value_fd", finite_or_throw(r.insurance_value_fd, "insurance_value_fd")},
           {"fd_step", finite_or_throw(r.fd_step, "fd_step")}};
}

void to_json(json& j, const OptimizationResult& r) {
  j = json{{"v_star", finite_or_throw(r.v_star.value(), "v_star")},
           {"alpha_star", finite_or_throw(r.alpha_star, "alpha_star")},
           {"ce_star", finite_or_throw(r.ce_star, "ce_star")},
           {"foc_residual", finite_or_throw(r.foc_residual, "foc_residual")},
           {"iterations", r.iterations},
           {"converged", r.converged},
           {"active_bound", to_string(r.active_bound)}};
}

void to_json(json& j, const SimulationSummary& s) {
  j = json{{"shortfall_probability", finite_or_throw(s.shortfall_probability, "shortfall_probability")},
           {"expected_terminal_buffer", finite_or_throw(s.expected_terminal_buffer, "expected_terminal_buffer")},
           {"expected_net_credits", finite_or_throw(s.expected_net_credits, "expected_net_credits")},
           {"trials", s.trials},
           {"stderr_shortfall", finite_or_throw(s.stderr_shortfall, "stderr_shortfall")}};
}

void to_json(json& j, const ResilienceReport& r) {
  j = json{
      {"component_a_insurance_value", finite_or_throw(r.component_a_insurance_value, "component_a_insurance_value")},
      {"component_b_avoided_damage", finite_or_throw(r.component_b_avoided_damage, "component_b_avoided_damage")},
      {"component_c_option_value", finite_or_throw(r.component_c_option_value, "component_c_option_value")},
      {"component_c_diversification", finite_or_throw(r.component_c_diversification, "component_c_diversification")},
      {"component_d_practice_value", finite_or_throw(r.component_d_practice_value, "component_d_practice_value")},
      {"regime_delta_ce", finite_or_throw(r.regime_delta_ce, "regime_delta_ce")}};
}

}  // namespace bioinsure
