#pragma once

#include <optional>

namespace bioinsure {

/// Dimensionless biodiversity index (e.g. effective tree-species diversity).
/// Construction throws ValidationError unless the value is finite and >= 0.
class BiodiversityLevel {
 public:
  explicit BiodiversityLevel(double v);

  double value() const noexcept { return v_; }

  friend bool operator==(BiodiversityLevel, BiodiversityLevel) = default;
  friend auto operator<=>(BiodiversityLevel, BiodiversityLevel) = default;

 private:
  double v_;
};

/// Biodiversity-conditional ecosystem service distribution. Service is
/// normal with
///   mu(v)    = mu_max * (1 - exp(-k_mu * v))
///   sigma(v) = sigma_0 * exp(-k_sigma * v)
struct ServiceModel {
  double mu_max = 1.0;
  double k_mu = 1.0;
  double sigma_0 = 1.0;
  double k_sigma = 0.0;

  friend bool operator==(const ServiceModel&, const ServiceModel&) = default;
};

struct ServiceMoments {
  double mu;
  double sigma;
  double dmu;
  double dsigma;
};

/// C(v) = c1 * v + c2 * v^2
struct CostModel {
  double c1 = 0.0;
  double c2 = 0.0;

  friend bool operator==(const CostModel&, const CostModel&) = default;
};

struct CostValue {
  double cost;
  double dcost;
};

/// Arrow-Pratt coefficient of absolute risk aversion (1/currency).
struct RiskPreference {
  double rho = 0.0;

  friend bool operator==(const RiskPreference&, const RiskPreference&) = default;
};

/// Proportional coinsurance of income deviations. `alpha` is the share of
/// deviations transferred, `lambda` the premium loading per unit of
/// transferred standard deviation (lambda = 0 is actuarially fair).
struct InsuranceContract {
  double alpha = 0.0;
  double lambda = 0.0;

  friend bool operator==(const InsuranceContract&, const InsuranceContract&) = default;
};

/// Insurance market offered to the manager: only the loading is given,
/// coverage is chosen by the optimizer.
struct InsuranceMarket {
  double lambda = 0.0;

  friend bool operator==(const InsuranceMarket&, const InsuranceMarket&) = default;
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
  double width() const noexcept { return hi - lo; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

struct ScenarioSpec {
  ServiceModel service;
  CostModel cost;
  RiskPreference preference;
  std::optional<InsuranceMarket> market;
  Interval v_bounds;

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

ServiceMoments eval_service_moments(const ServiceModel& service, BiodiversityLevel v) noexcept;

CostValue eval_cost(const CostModel& cost, BiodiversityLevel v) noexcept;

/// Each `validate` throws ValidationError naming the first violated field
/// (prefixed with `path`), and returns its argument unchanged otherwise.
const ServiceModel& validate(const ServiceModel& service, const char* path = "service");
const CostModel& validate(const CostModel& cost, const char* path = "cost");
const RiskPreference& validate(const RiskPreference& pref, const char* path = "preference");
const InsuranceContract& validate(const InsuranceContract& contract, const char* path = "contract");
const InsuranceMarket& validate(const InsuranceMarket& market, const char* path = "market");

ScenarioSpec validate_scenario(const ScenarioSpec& raw);

/// Throws OutOfBoundsError unless v lies inside the scenario's v_bounds.
void require_in_bounds(const ScenarioSpec& scenario, BiodiversityLevel v);

}  // namespace bioinsure
