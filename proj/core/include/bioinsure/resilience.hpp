#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "bioinsure/model.hpp"
#include "bioinsure/optimize.hpp"

namespace bioinsure {

/// Hazard exposure of a project with and without a protective ecosystem
/// service. damage_with <= damage_without is validated.
struct HazardDamageSpec {
  double event_probability = 0.0;
  double damage_without = 0.0;
  double damage_with = 0.0;
  std::uint64_t periods = 1;

  friend bool operator==(const HazardDamageSpec&, const HazardDamageSpec&) = default;
};

struct Regime {
  double probability = 0.0;
  std::vector<double> service_by_species;

  friend bool operator==(const Regime&, const Regime&) = default;
};

/// Possible future regimes; each lists the service every species would
/// provide if that regime realizes.
struct RegimeScenario {
  std::vector<Regime> regimes;

  std::size_t species_count() const noexcept {
    return regimes.empty() ? 0 : regimes.front().service_by_species.size();
  }

  friend bool operator==(const RegimeScenario&, const RegimeScenario&) = default;
};

/// Species are identified by their index into service_by_species.
using SpeciesSet = std::vector<std::size_t>;

/// Ecosystem components as assets. `covariance` is row-major n x n.
struct ServicePortfolio {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> covariance;

  std::size_t size() const noexcept { return weights.size(); }

  friend bool operator==(const ServicePortfolio&, const ServicePortfolio&) = default;
};

struct PortfolioStats {
  double mean = 0.0;
  double variance = 0.0;
  double diversification_benefit = 0.0;
};

/// Side-by-side resilience components. Components are never summed: A and C
/// both draw on variance reduction and would double count.
struct ResilienceReport {
  double component_a_insurance_value = 0.0;
  double component_b_avoided_damage = 0.0;
  double component_c_option_value = 0.0;
  double component_c_diversification = 0.0;
  double component_d_practice_value = 0.0;
  double regime_delta_ce = 0.0;

  friend bool operator==(const ResilienceReport&, const ResilienceReport&) = default;
};

const HazardDamageSpec& validate(const HazardDamageSpec& spec, const char* path = "hazard");
const RegimeScenario& validate(const RegimeScenario& scenario, const char* path = "regimes");
const ServicePortfolio& validate(const ServicePortfolio& portfolio, const char* path = "portfolio");

/// periods * p * (damage_without - damage_with)
double avoided_damage_value(const HazardDamageSpec& spec);

/// Expected damage with no protective service in place: periods * p * damage_without.
double expected_unprotected_damage(const HazardDamageSpec& spec);

/// E[max over retained of service] - E[max over reduced of service].
/// `reduced` must be a non-empty subset of `retained`.
double option_value(const RegimeScenario& scenario, const SpeciesSet& retained, const SpeciesSet& reduced);

/// mean = w'mu, variance = w'Sw, diversification_benefit = (sum w_i s_i)^2 - w'Sw.
/// Throws ValidationError if S is not symmetric PSD within tolerance.
PortfolioStats portfolio_stats(const ServicePortfolio& portfolio);

/// Value a management practice adds through parameter shifts:
///   [CE*(modified_scenario) - CE*(scenario)] + [E damage(hazard) - E damage(modified_hazard)]
/// where CE* is the no-insurance optimum and expected damage is unprotected
/// damage. Positive means the practice helps.
double practice_value(const ScenarioSpec& scenario, const HazardDamageSpec& hazard,
                      const HazardDamageSpec& modified_hazard, const ScenarioSpec& modified_scenario);

/// CE*(state_a) - CE*(state_b): the value at stake in a shift from A to B.
double regime_delta(const ScenarioSpec& state_a, const ScenarioSpec& state_b);

/// Everything the report needs. Component A is evaluated at `v`, which the
/// caller chooses (current level or the optimum).
struct ResilienceInputs {
  ScenarioSpec scenario;
  BiodiversityLevel v{0.0};
  HazardDamageSpec hazard;
  RegimeScenario regimes;
  SpeciesSet retained;
  SpeciesSet reduced;
  ServicePortfolio portfolio;
  HazardDamageSpec practice_hazard;
  ScenarioSpec practice_scenario;
  ScenarioSpec alternative_state;
};

ResilienceReport resilience_report(const ResilienceInputs& inputs);

}  // namespace bioinsure
