#pragma once

#include <functional>

#include "bioinsure/model.hpp"

namespace bioinsure {

enum class ActiveBound { none, lower, upper };

struct OptimizationResult {
  BiodiversityLevel v_star{0.0};
  double alpha_star = 0.0;  ///< 0 when no insurance market is considered
  double ce_star = 0.0;
  double foc_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  ActiveBound active_bound = ActiveBound::none;

  friend bool operator==(const OptimizationResult&, const OptimizationResult&) = default;
};

/// Solver tolerances.
struct SolverOptions {
  double foc_tolerance = 1e-8;
  double width_tolerance = 1e-10;
  double flat_tolerance = 1e-12;  ///< CE differences below this count as ties
  int max_iterations = 200;
  int scan_intervals = 256;  ///< derivative sign scan used to pick the strategy
};

/// CE(v, alpha) = mu - C - lambda*alpha*sigma - rho/2 * (1-alpha)^2 * sigma^2
double certainty_equivalent_at(const ScenarioSpec& scenario, BiodiversityLevel v, double alpha,
                               double lambda);

/// dCE/dv at fixed alpha: mu' - C' - lambda*alpha*sigma' - rho*(1-alpha)^2*sigma*sigma'.
/// With alpha = 0 this is mu' + V(v) - C'.
double foc_residual(const ScenarioSpec& scenario, BiodiversityLevel v, double alpha, double lambda);

/// alpha*(v) = clamp(1 - lambda / (rho*sigma(v)), 0, 1). Throws
/// IndeterminateError when rho = 0 and lambda = 0.
double optimal_coverage(const ScenarioSpec& scenario, BiodiversityLevel v, double lambda);

/// Maximizes CE(v) without financial insurance over v_bounds.
OptimizationResult optimal_biodiversity(const ScenarioSpec& scenario, const SolverOptions& opts = {});

/// Maximizes CE(v, alpha*(v)) over v_bounds for an insurance market with loading lambda.
OptimizationResult joint_optimum(const ScenarioSpec& scenario, double lambda,
                                 const SolverOptions& opts = {});

/// One-dimensional maximizer used by both regimes. `derivative` must be the
/// exact derivative of `objective`. Bisects on the derivative when it
/// changes sign once (+ to -) on the scan grid, otherwise golden-section on
/// the objective around the best scanned point.
OptimizationResult maximize_scalar(const std::function<double(double)>& objective,
                                   const std::function<double(double)>& derivative, Interval bounds,
                                   const SolverOptions& opts = {});

}  // namespace bioinsure
