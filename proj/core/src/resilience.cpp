#include "bioinsure/resilience.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "bioinsure/errors.hpp"
#include "bioinsure/valuation.hpp"

namespace bioinsure {

namespace {

constexpr double kSimplexTolerance = 1e-9;
constexpr double kSymmetryTolerance = 1e-9;
constexpr double kPsdTolerance = 1e-8;

std::string at(const char* path, const std::string& field) { return std::string(path) + "." + field; }

double optimal_ce(const ScenarioSpec& scenario) {
  const auto r = optimal_biodiversity(scenario);
  if (!r.converged) throw NumericalError("optimizer did not converge while valuing a scenario");
  return r.ce_star;
}

}  // namespace

const HazardDamageSpec& validate(const HazardDamageSpec& h, const char* path) {
  if (!std::isfinite(h.event_probability) || h.event_probability < 0.0 || h.event_probability > 1.0) {
    throw ValidationError(at(path, "event_probability"), "must lie in [0, 1]");
  }
  if (!std::isfinite(h.damage_without) || h.damage_without < 0.0) {
    throw ValidationError(at(path, "damage_without"), "must be >= 0");
  }
  if (!std::isfinite(h.damage_with) || h.damage_with < 0.0) {
    throw ValidationError(at(path, "damage_with"), "must be >= 0");
  }
  if (h.damage_with > h.damage_without) {
    throw ValidationError(at(path, "damage_with"), "must not exceed damage_without");
  }
  if (h.periods < 1) throw ValidationError(at(path, "periods"), "must be >= 1");
  return h;
}

const RegimeScenario& validate(const RegimeScenario& s, const char* path) {
  if (s.regimes.empty()) throw ValidationError(path, "must contain at least one regime");
  const std::size_t species = s.species_count();
  if (species == 0) throw ValidationError(at(path, "service_by_species"), "must be non-empty");
  double total = 0.0;
  for (std::size_t r = 0; r < s.regimes.size(); ++r) {
    const auto& regime = s.regimes[r];
    const std::string here = std::string(path) + "[" + std::to_string(r) + "]";
    if (!std::isfinite(regime.probability) || regime.probability < 0.0 || regime.probability > 1.0) {
      throw ValidationError(here + ".probability", "must lie in [0, 1]");
    }
    if (regime.service_by_species.size() != species) {
      throw ValidationError(here + ".service_by_species", "must have the same length in every regime");
    }
    for (double x : regime.service_by_species) {
      if (!std::isfinite(x) || x < 0.0) throw ValidationError(here + ".service_by_species", "entries must be >= 0");
    }
    total += regime.probability;
  }
  if (std::abs(total - 1.0) > kSimplexTolerance) throw ValidationError(at(path, "probability"), "must sum to 1");
  return s;
}

const ServicePortfolio& validate(const ServicePortfolio& p, const char* path) {
  const std::size_t n = p.size();
  if (n == 0) throw ValidationError(at(path, "weights"), "must be non-empty");
  if (p.means.size() != n) throw ValidationError(at(path, "means"), "must match weights in length");
  if (p.covariance.size() != n * n) throw ValidationError(at(path, "covariance"), "must be an n x n matrix");
  double total = 0.0;
  for (double w : p.weights) {
    if (!std::isfinite(w) || w < 0.0) throw ValidationError(at(path, "weights"), "must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > kSimplexTolerance) throw ValidationError(at(path, "weights"), "must sum to 1");
  for (double m : p.means) {
    if (!std::isfinite(m)) throw ValidationError(at(path, "means"), "must be finite");
  }

  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> cov(
      p.covariance.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  if (!cov.allFinite()) throw ValidationError(at(path, "covariance"), "must be finite");
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance) {
    throw ValidationError(at(path, "covariance"), "must be symmetric");
  }
  const Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericalError("eigen decomposition of covariance failed");
  if (eig.eigenvalues().minCoeff() < -kPsdTolerance) {
    throw ValidationError(at(path, "covariance"), "must be positive semidefinite");
  }
  return p;
}

double avoided_damage_value(const HazardDamageSpec& spec) {
  validate(spec);
  return static_cast<double>(spec.periods) * spec.event_probability * (spec.damage_without - spec.damage_with);
}

double expected_unprotected_damage(const HazardDamageSpec& spec) {
  validate(spec);
  return static_cast<double>(spec.periods) * spec.event_probability * spec.damage_without;
}

namespace {

void validate_subset(const SpeciesSet& set, std::size_t species, const char* name) {
  if (set.empty()) throw ValidationError(name, "must be non-empty");
  for (std::size_t i : set) {
    if (i >= species) throw ValidationError(name, "references species " + std::to_string(i) + " out of range");
  }
}

}  // namespace

double option_value(const RegimeScenario& scenario, const SpeciesSet& retained, const SpeciesSet& reduced) {
  validate(scenario);
  validate_subset(retained, scenario.species_count(), "retained");
  validate_subset(reduced, scenario.species_count(), "reduced");
  for (std::size_t i : reduced) {
    if (std::find(retained.begin(), retained.end(), i) == retained.end()) {
      throw ValidationError("reduced", "must be a subset of retained");
    }
  }
  // Per regime the retained maximum dominates the reduced one, so summing
  // the regime-wise gaps keeps the result non-negative under rounding.
  double total = 0.0;
  for (const auto& regime : scenario.regimes) {
    double best_retained = 0.0;
    double best_reduced = 0.0;
    for (std::size_t i : retained) best_retained = std::max(best_retained, regime.service_by_species[i]);
    for (std::size_t i : reduced) best_reduced = std::max(best_reduced, regime.service_by_species[i]);
    total += regime.probability * (best_retained - best_reduced);
  }
  return total;
}

PortfolioStats portfolio_stats(const ServicePortfolio& p) {
  validate(p);
  const auto n = static_cast<Eigen::Index>(p.size());
  const Eigen::Map<const Eigen::VectorXd> w(p.weights.data(), n);
  const Eigen::Map<const Eigen::VectorXd> mu(p.means.data(), n);
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> cov(
      p.covariance.data(), n, n);

  const double variance = std::max(0.0, w.dot(cov * w));
  const double weighted_sd = w.dot(cov.diagonal().cwiseMax(0.0).cwiseSqrt());
  // Cauchy-Schwarz makes the gap non-negative; clamp rounding noise only.
  const double benefit = std::max(0.0, weighted_sd * weighted_sd - variance);
  return PortfolioStats{.mean = w.dot(mu), .variance = variance, .diversification_benefit = benefit};
}

double practice_value(const ScenarioSpec& scenario, const HazardDamageSpec& hazard,
                      const HazardDamageSpec& modified_hazard, const ScenarioSpec& modified_scenario) {
  validate(hazard, "hazard");
  validate(modified_hazard, "practice.hazard");
  const double ce_gain = optimal_ce(modified_scenario) - optimal_ce(scenario);
  const double damage_reduction = expected_unprotected_damage(hazard) - expected_unprotected_damage(modified_hazard);
  return ce_gain + damage_reduction;
}

double regime_delta(const ScenarioSpec& state_a, const ScenarioSpec& state_b) {
  return optimal_ce(state_a) - optimal_ce(state_b);
}

ResilienceReport resilience_report(const ResilienceInputs& in) {
  ResilienceReport r;
  r.component_a_insurance_value = insurance_value(validate_scenario(in.scenario), in.v);
  r.component_b_avoided_damage = avoided_damage_value(in.hazard);
  r.component_c_option_value = option_value(in.regimes, in.retained, in.reduced);
  r.component_c_diversification = portfolio_stats(in.portfolio).diversification_benefit;
  r.component_d_practice_value = practice_value(in.scenario, in.hazard, in.practice_hazard, in.practice_scenario);
  r.regime_delta_ce = regime_delta(in.scenario, in.alternative_state);
  return r;
}

}  // namespace bioinsure
