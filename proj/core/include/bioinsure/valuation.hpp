#pragma once

#include <optional>
#include <span>
#include <vector>

#include "bioinsure/model.hpp"

namespace bioinsure {

/// Normal income distribution (currency units).
struct IncomeDistribution {
  double mean = 0.0;
  double sd = 0.0;

  friend bool operator==(const IncomeDistribution&, const IncomeDistribution&) = default;
};

inline constexpr double kDefaultFdStep = 1e-5;

struct ValuationResult {
  BiodiversityLevel v{0.0};
  double mu = 0.0;
  double sigma = 0.0;
  double cost = 0.0;
  double risk_premium = 0.0;
  double certainty_equivalent = 0.0;
  double insurance_value = 0.0;
  double insurance_value_fd = 0.0;
  double fd_step = kDefaultFdStep;

  friend bool operator==(const ValuationResult&, const ValuationResult&) = default;
};

/// CARA utility u(y) = -exp(-rho*y)/rho with normal income gives the exact
/// premium R = rho/2 * sd^2 (zero for rho = 0).
double risk_premium(const RiskPreference& pref, const IncomeDistribution& dist);

double certainty_equivalent(const RiskPreference& pref, const IncomeDistribution& dist);

/// Net income y = s - C(v), optionally after a coinsurance contract:
///   mean = mu - C - lambda*alpha*sigma,  sd = (1 - alpha)*sigma.
/// Throws OutOfBoundsError when v leaves v_bounds.
IncomeDistribution net_income_distribution(const ScenarioSpec& scenario, BiodiversityLevel v,
                                           const std::optional<InsuranceContract>& contract = {});

/// Insurance value of biodiversity, V(v) = -rho * sigma(v) * sigma'(v).
double insurance_value(const ScenarioSpec& scenario, BiodiversityLevel v);

/// Central-difference -dR/dv. The stencil [v-h, v+h] must lie in v_bounds.
double insurance_value_fd(const ScenarioSpec& scenario, BiodiversityLevel v, double h = kDefaultFdStep);

/// Full valuation at one v. Near a bound, where the central stencil does not
/// fit, the cross-check switches to a second-order one-sided stencil.
ValuationResult evaluate(const ScenarioSpec& scenario, BiodiversityLevel v, double h = kDefaultFdStep);

/// Evenly spaced grid of `points` levels spanning [lo, hi], inclusive.
std::vector<BiodiversityLevel> linear_grid(double lo, double hi, std::size_t points);

std::vector<ValuationResult> evaluate_grid(const ScenarioSpec& scenario,
                                           std::span<const BiodiversityLevel> grid,
                                           double h = kDefaultFdStep);

}  // namespace bioinsure
