#include "bioinsure/model.hpp"

#include <cmath>
#include <string>

#include "bioinsure/errors.hpp"

namespace bioinsure {

namespace {

std::string join(const char* path, const char* field) {
  return std::string(path) + "." + field;
}

void require_finite(double x, const char* path, const char* field) {
  if (!std::isfinite(x)) throw ValidationError(join(path, field), "must be finite");
}

void require_positive(double x, const char* path, const char* field) {
  require_finite(x, path, field);
  if (!(x > 0.0)) throw ValidationError(join(path, field), "must be > 0");
}

void require_non_negative(double x, const char* path, const char* field) {
  require_finite(x, path, field);
  if (!(x >= 0.0)) throw ValidationError(join(path, field), "must be >= 0");
}

}  // namespace

BiodiversityLevel::BiodiversityLevel(double v) : v_(v) {
  if (!std::isfinite(v) || v < 0.0) throw ValidationError("v", "must be finite and >= 0");
}

ServiceMoments eval_service_moments(const ServiceModel& s, BiodiversityLevel level) noexcept {
  const double v = level.value();
  const double decay_mu = std::exp(-s.k_mu * v);
  const double sigma = s.sigma_0 * std::exp(-s.k_sigma * v);
  return ServiceMoments{
      .mu = -s.mu_max * std::expm1(-s.k_mu * v),
      .sigma = sigma,
      .dmu = s.mu_max * s.k_mu * decay_mu,
      .dsigma = -s.k_sigma * sigma,
  };
}

CostValue eval_cost(const CostModel& c, BiodiversityLevel level) noexcept {
  const double v = level.value();
  return CostValue{.cost = c.c1 * v + c.c2 * v * v, .dcost = c.c1 + 2.0 * c.c2 * v};
}

const ServiceModel& validate(const ServiceModel& s, const char* path) {
  require_positive(s.mu_max, path, "mu_max");
  require_positive(s.k_mu, path, "k_mu");
  require_positive(s.sigma_0, path, "sigma_0");
  require_non_negative(s.k_sigma, path, "k_sigma");
  return s;
}

const CostModel& validate(const CostModel& c, const char* path) {
  require_non_negative(c.c1, path, "c1");
  require_non_negative(c.c2, path, "c2");
  return c;
}

const RiskPreference& validate(const RiskPreference& p, const char* path) {
  require_non_negative(p.rho, path, "rho");
  return p;
}

const InsuranceContract& validate(const InsuranceContract& k, const char* path) {
  require_finite(k.alpha, path, "alpha");
  if (k.alpha < 0.0 || k.alpha > 1.0) throw ValidationError(join(path, "alpha"), "must lie in [0, 1]");
  require_non_negative(k.lambda, path, "lambda");
  return k;
}

const InsuranceMarket& validate(const InsuranceMarket& m, const char* path) {
  require_non_negative(m.lambda, path, "lambda");
  return m;
}

ScenarioSpec validate_scenario(const ScenarioSpec& raw) {
  validate(raw.service);
  validate(raw.cost);
  validate(raw.preference);
  if (raw.market) validate(*raw.market);
  const auto& b = raw.v_bounds;
  if (!std::isfinite(b.lo) || !std::isfinite(b.hi)) throw ValidationError("v_bounds", "must be finite");
  if (b.lo < 0.0) throw ValidationError("v_bounds", "lower bound must be >= 0");
  if (!(b.lo < b.hi)) throw ValidationError("v_bounds", "must satisfy lo < hi");
  // sigma(v) must stay representable (> 0) across the whole interval.
  if (!(eval_service_moments(raw.service, BiodiversityLevel(b.hi)).sigma > 0.0)) {
    throw ValidationError("service.k_sigma", "drives sigma to zero inside v_bounds");
  }
  return raw;
}

void require_in_bounds(const ScenarioSpec& scenario, BiodiversityLevel v) {
  if (!scenario.v_bounds.contains(v.value())) {
    throw OutOfBoundsError("v = " + std::to_string(v.value()) + " lies outside v_bounds [" +
                           std::to_string(scenario.v_bounds.lo) + ", " +
                           std::to_string(scenario.v_bounds.hi) + "]");
  }
}

}  // namespace bioinsure
