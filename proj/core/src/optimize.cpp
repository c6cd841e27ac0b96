#include "bioinsure/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "bioinsure/errors.hpp"
#include "bioinsure/valuation.hpp"

namespace bioinsure {

double certainty_equivalent_at(const ScenarioSpec& scenario, BiodiversityLevel v, double alpha,
                               double lambda) {
  const auto dist = net_income_distribution(scenario, v, InsuranceContract{.alpha = alpha, .lambda = lambda});
  return certainty_equivalent(scenario.preference, dist);
}

double foc_residual(const ScenarioSpec& scenario, BiodiversityLevel v, double alpha, double lambda) {
  const auto m = eval_service_moments(scenario.service, v);
  const auto c = eval_cost(scenario.cost, v);
  const double rho = scenario.preference.rho;
  const double retained = 1.0 - alpha;
  return m.dmu - c.dcost - lambda * alpha * m.dsigma - rho * retained * retained * m.sigma * m.dsigma;
}

double optimal_coverage(const ScenarioSpec& scenario, BiodiversityLevel v, double lambda) {
  require_in_bounds(scenario, v);
  if (!std::isfinite(lambda) || lambda < 0.0) throw ValidationError("lambda", "must be >= 0");
  const double rho = scenario.preference.rho;
  if (rho == 0.0) {
    if (lambda == 0.0) {
      throw IndeterminateError("coverage is indeterminate for rho = 0 and lambda = 0: every alpha is optimal");
    }
    return 0.0;
  }
  const double sigma = eval_service_moments(scenario.service, v).sigma;
  return std::clamp(1.0 - lambda / (rho * sigma), 0.0, 1.0);
}

namespace {

struct Point {
  double v;
  double ce;
  double d;
};

// Shrinks [a, b] with d(a) > 0 >= d(b) down to the sign change. Returns the
// endpoint with the smaller |d|, preferring the smaller v.
double bisect_derivative(const std::function<double(double)>& derivative, double a, double b,
                         const SolverOptions& opts, int& iterations) {
  double da = derivative(a);
  double db = derivative(b);
  while (b - a > opts.width_tolerance && iterations < opts.max_iterations) {
    const double mid = a + 0.5 * (b - a);
    if (mid <= a || mid >= b) break;
    const double dm = derivative(mid);
    ++iterations;
    if (dm > 0.0) {
      a = mid;
      da = dm;
    } else {
      b = mid;
      db = dm;
    }
  }
  return std::abs(da) <= std::abs(db) ? a : b;
}

double golden_section_max(const std::function<double(double)>& objective, double a, double b,
                          const SolverOptions& opts, int& iterations) {
  constexpr double inv_phi = std::numbers::phi - 1.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  while (b - a > opts.width_tolerance && iterations < opts.max_iterations) {
    ++iterations;
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

OptimizationResult maximize_scalar(const std::function<double(double)>& objective,
                                   const std::function<double(double)>& derivative, Interval bounds,
                                   const SolverOptions& opts) {
  const int n = std::max(opts.scan_intervals, 2);
  std::vector<double> xs(n + 1);
  std::vector<double> ds(n + 1);
  for (int i = 0; i <= n; ++i) {
    xs[i] = i == n ? bounds.hi : bounds.lo + bounds.width() * i / n;
    ds[i] = derivative(xs[i]);
    if (!std::isfinite(ds[i])) throw NumericalError("non-finite derivative at v = " + std::to_string(xs[i]));
  }

  const auto positive = [&](int i) { return ds[i] > 0.0; };
  int transitions = 0;
  for (int i = 1; i <= n; ++i) transitions += positive(i) != positive(i - 1);

  const auto at_bound = [&](double v, ActiveBound which) {
    return OptimizationResult{.v_star = BiodiversityLevel(v), .ce_star = objective(v),
                              .foc_residual = derivative(v), .iterations = 0, .converged = true,
                              .active_bound = which};
  };
  const auto interior = [&](double v, int iterations) {
    OptimizationResult r{.v_star = BiodiversityLevel(v), .ce_star = objective(v),
                         .foc_residual = derivative(v), .iterations = iterations};
    r.converged = iterations < opts.max_iterations && std::abs(r.foc_residual) <= opts.foc_tolerance;
    return r;
  };

  if (transitions == 0) {
    return positive(0) ? at_bound(bounds.hi, ActiveBound::upper) : at_bound(bounds.lo, ActiveBound::lower);
  }
  if (transitions == 1 && positive(0)) {
    int j = 1;
    while (positive(j)) ++j;
    int iterations = 0;
    const double root = bisect_derivative(derivative, xs[j - 1], xs[j], opts, iterations);
    return interior(root, iterations);
  }

  // Several sign changes: the objective may be multimodal. Locate the best
  // scanned point and refine around it derivative-free.
  std::vector<Point> scan(n + 1);
  std::size_t best = 0;
  for (int i = 0; i <= n; ++i) {
    scan[i] = Point{xs[i], objective(xs[i]), ds[i]};
    if (scan[i].ce > scan[best].ce + opts.flat_tolerance) best = static_cast<std::size_t>(i);
  }
  const double a = xs[best == 0 ? 0 : best - 1];
  const double b = xs[std::min<std::size_t>(best + 1, static_cast<std::size_t>(n))];
  int iterations = 0;
  double v = golden_section_max(objective, a, b, opts, iterations);
  // Polish to the derivative root when the golden bracket straddles it.
  const double h = 4.0 * opts.width_tolerance + 1e-9 * std::abs(v);
  const double lo = std::max(bounds.lo, v - h);
  const double hi = std::min(bounds.hi, v + h);
  if (derivative(lo) > 0.0 && derivative(hi) <= 0.0) {
    int polish = 0;
    v = bisect_derivative(derivative, lo, hi, opts, polish);
    iterations += polish;
  }

  OptimizationResult result = interior(v, iterations);
  for (const auto& [edge, which] : {std::pair{bounds.lo, ActiveBound::lower}, std::pair{bounds.hi, ActiveBound::upper}}) {
    const double ce = objective(edge);
    const bool better = ce > result.ce_star + opts.flat_tolerance;
    const bool tie_smaller = std::abs(ce - result.ce_star) <= opts.flat_tolerance && edge < result.v_star.value();
    if (better || tie_smaller) result = at_bound(edge, which);
  }
  return result;
}

OptimizationResult optimal_biodiversity(const ScenarioSpec& raw, const SolverOptions& opts) {
  const ScenarioSpec scenario = validate_scenario(raw);
  return maximize_scalar(
      [&](double v) { return certainty_equivalent_at(scenario, BiodiversityLevel(v), 0.0, 0.0); },
      [&](double v) { return foc_residual(scenario, BiodiversityLevel(v), 0.0, 0.0); },
      scenario.v_bounds, opts);
}

OptimizationResult joint_optimum(const ScenarioSpec& raw, double lambda, const SolverOptions& opts) {
  const ScenarioSpec scenario = validate_scenario(raw);
  if (!std::isfinite(lambda) || lambda < 0.0) throw ValidationError("lambda", "must be >= 0");
  const auto coverage = [&](double v) { return optimal_coverage(scenario, BiodiversityLevel(v), lambda); };
  // Envelope theorem: the total derivative of CE(v, alpha*(v)) equals the
  // partial derivative at fixed alpha = alpha*(v).
  auto result = maximize_scalar(
      [&](double v) { return certainty_equivalent_at(scenario, BiodiversityLevel(v), coverage(v), lambda); },
      [&](double v) { return foc_residual(scenario, BiodiversityLevel(v), coverage(v), lambda); },
      scenario.v_bounds, opts);
  result.alpha_star = coverage(result.v_star.value());
  return result;
}

}  // namespace bioinsure
