#include "bioinsure/valuation.hpp"

#include <cmath>

#include "bioinsure/errors.hpp"

namespace bioinsure {

double risk_premium(const RiskPreference& pref, const IncomeDistribution& dist) {
  if (pref.rho == 0.0 || dist.sd == 0.0) return 0.0;
  return 0.5 * pref.rho * dist.sd * dist.sd;
}

double certainty_equivalent(const RiskPreference& pref, const IncomeDistribution& dist) {
  return dist.mean - risk_premium(pref, dist);
}

IncomeDistribution net_income_distribution(const ScenarioSpec& scenario, BiodiversityLevel v,
                                           const std::optional<InsuranceContract>& contract) {
  require_in_bounds(scenario, v);
  const auto m = eval_service_moments(scenario.service, v);
  const auto c = eval_cost(scenario.cost, v);
  IncomeDistribution dist{.mean = m.mu - c.cost, .sd = m.sigma};
  if (contract) {
    validate(*contract);
    dist.mean -= contract->lambda * contract->alpha * m.sigma;
    dist.sd = (1.0 - contract->alpha) * m.sigma;
  }
  return dist;
}

double insurance_value(const ScenarioSpec& scenario, BiodiversityLevel v) {
  require_in_bounds(scenario, v);
  const auto m = eval_service_moments(scenario.service, v);
  return -scenario.preference.rho * m.sigma * m.dsigma;
}

namespace {

double premium_at(const ScenarioSpec& scenario, double v) {
  return risk_premium(scenario.preference, net_income_distribution(scenario, BiodiversityLevel(v)));
}

}  // namespace

double insurance_value_fd(const ScenarioSpec& scenario, BiodiversityLevel v, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ValidationError("fd_step", "must be > 0");
  const double x = v.value();
  if (x - h < scenario.v_bounds.lo || x + h > scenario.v_bounds.hi) {
    throw OutOfBoundsError("finite-difference stencil around v = " + std::to_string(x) +
                           " leaves v_bounds");
  }
  return -(premium_at(scenario, x + h) - premium_at(scenario, x - h)) / (2.0 * h);
}

ValuationResult evaluate(const ScenarioSpec& scenario, BiodiversityLevel v, double h) {
  const auto dist = net_income_distribution(scenario, v);
  const auto m = eval_service_moments(scenario.service, v);
  const auto c = eval_cost(scenario.cost, v);

  ValuationResult r{.v = v};
  r.mu = m.mu;
  r.sigma = m.sigma;
  r.cost = c.cost;
  r.risk_premium = risk_premium(scenario.preference, dist);
  r.certainty_equivalent = dist.mean - r.risk_premium;
  r.insurance_value = insurance_value(scenario, v);
  r.fd_step = h;

  const double x = v.value();
  const auto& b = scenario.v_bounds;
  if (x - h >= b.lo && x + h <= b.hi) {
    r.insurance_value_fd = insurance_value_fd(scenario, v, h);
  } else if (x + 2.0 * h <= b.hi) {
    // forward: R'(x) ~ (-3R(x) + 4R(x+h) - R(x+2h)) / 2h
    r.insurance_value_fd = -(-3.0 * r.risk_premium + 4.0 * premium_at(scenario, x + h) -
                             premium_at(scenario, x + 2.0 * h)) / (2.0 * h);
  } else if (x - 2.0 * h >= b.lo) {
    r.insurance_value_fd = -(3.0 * r.risk_premium - 4.0 * premium_at(scenario, x - h) +
                             premium_at(scenario, x - 2.0 * h)) / (2.0 * h);
  } else {
    throw OutOfBoundsError("v_bounds too narrow for fd_step " + std::to_string(h));
  }
  return r;
}

std::vector<BiodiversityLevel> linear_grid(double lo, double hi, std::size_t points) {
  if (points < 2) throw ValidationError("grid.steps", "must produce at least 2 points");
  if (!(lo < hi)) throw ValidationError("grid", "must satisfy lo < hi");
  std::vector<BiodiversityLevel> grid;
  grid.reserve(points);
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i + 1 < points; ++i) grid.emplace_back(lo + step * static_cast<double>(i));
  grid.emplace_back(hi);
  return grid;
}

std::vector<ValuationResult> evaluate_grid(const ScenarioSpec& scenario,
                                           std::span<const BiodiversityLevel> grid, double h) {
  std::vector<ValuationResult> out;
  out.reserve(grid.size());
  for (auto v : grid) out.push_back(evaluate(scenario, v, h));
  return out;
}

}  // namespace bioinsure
