#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library's valuation or optimizer code paths; every formula is
// restated from scratch so the tests compare two routes.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "bioinsure/model.hpp"
#include "bioinsure/resilience.hpp"

namespace bioinsure::testing {

/// Gauss-Hermite rule (physicists' weight exp(-x^2)). Nodes come from the
/// Jacobi matrix eigenvalues; weights from the orthonormal recurrence,
/// w_i = 1 / sum_k p_k(x_i)^2, which stays accurate in the tails.
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussHermite(int n) {
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
      jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(0.5 * k);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi, Eigen::EigenvaluesOnly);
    const double p0 = std::pow(std::numbers::pi, -0.25);
    for (int i = 0; i < n; ++i) {
      const double x = eig.eigenvalues()(i);
      double prev = 0.0;
      double cur = p0;
      double sum = cur * cur;
      for (int k = 0; k + 1 < n; ++k) {
        const double next = std::sqrt(2.0 / (k + 1)) * x * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
        prev = cur;
        cur = next;
        sum += cur * cur;
      }
      nodes.push_back(x);
      weights.push_back(1.0 / sum);
    }
  }

  /// E[g(Z)] for Z ~ N(0, 1).
  double expect_standard_normal(const std::function<double(double)>& g) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * g(std::numbers::sqrt2 * nodes[i]);
    return sum / std::sqrt(std::numbers::pi);
  }
};

/// CE under CARA utility by quadrature: E[u(y)], then invert u.
inline double quadrature_certainty_equivalent(double rho, double mean, double sd, int nodes = 80) {
  if (rho == 0.0) return mean;
  const GaussHermite gh(nodes);
  // Factor out exp(-rho*mean) to keep the integrand O(1).
  const double scaled = gh.expect_standard_normal([&](double z) { return std::exp(-rho * sd * z); });
  return mean - std::log(scaled) / rho;
}

inline double quadrature_risk_premium(double rho, double mean, double sd) {
  return mean - quadrature_certainty_equivalent(rho, mean, sd);
}

/// Closed forms restated independently of the library.
inline double ref_mu(const ServiceModel& s, double v) { return s.mu_max * (1.0 - std::exp(-s.k_mu * v)); }
inline double ref_sigma(const ServiceModel& s, double v) { return s.sigma_0 * std::exp(-s.k_sigma * v); }
inline double ref_cost(const CostModel& c, double v) { return c.c1 * v + c.c2 * v * v; }

/// Net-income CE with coinsurance (alpha, lambda) under CARA-normal.
inline double ref_ce(const ScenarioSpec& s, double v, double alpha = 0.0, double lambda = 0.0) {
  const double sigma = ref_sigma(s.service, v);
  const double mean = ref_mu(s.service, v) - ref_cost(s.cost, v) - lambda * alpha * sigma;
  const double sd = (1.0 - alpha) * sigma;
  return mean - 0.5 * s.preference.rho * sd * sd;
}

/// Argmax of f on lo, lo+step, ..., hi (first maximum wins).
inline double grid_argmax(const std::function<double(double)>& f, double lo, double hi, double step) {
  const auto n = static_cast<std::int64_t>(std::floor((hi - lo) / step + 0.5));
  double best_x = lo;
  double best = f(lo);
  for (std::int64_t i = 1; i <= n; ++i) {
    const double x = std::min(hi, lo + step * static_cast<double>(i));
    const double y = f(x);
    if (y > best) {
      best = y;
      best_x = x;
    }
  }
  return best_x;
}

/// Plain bisection for a sign change of g on [a, b].
inline double bisection_root(const std::function<double(double)>& g, double a, double b, int iterations = 200) {
  double ga = g(a);
  for (int i = 0; i < iterations; ++i) {
    const double m = 0.5 * (a + b);
    const double gm = g(m);
    if ((gm > 0.0) == (ga > 0.0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

/// Joint optimum by 2-D grid search over (v, alpha).
struct GridOptimum {
  double v;
  double alpha;
  double ce;
};

inline GridOptimum grid_argmax_2d(const ScenarioSpec& s, double lambda, double v_lo, double v_hi, double v_step,
                                  double a_step) {
  GridOptimum best{v_lo, 0.0, -std::numeric_limits<double>::infinity()};
  const auto nv = static_cast<int>(std::lround((v_hi - v_lo) / v_step));
  const auto na = static_cast<int>(std::lround(1.0 / a_step));
  for (int i = 0; i <= nv; ++i) {
    const double v = v_lo + v_step * i;
    for (int k = 0; k <= na; ++k) {
      const double a = a_step * k;
      const double ce = ref_ce(s, v, a, lambda);
      if (ce > best.ce) best = {v, a, ce};
    }
  }
  return best;
}

/// Scenario generator whose no-insurance optimum is interior on [0, 50]:
/// the marginal benefit at 0 exceeds c1 and the marginal cost at 50
/// dominates.
inline ScenarioSpec random_interior_scenario(std::mt19937_64& rng) {
  auto u = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  ScenarioSpec s;
  s.service = ServiceModel{.mu_max = u(5.0, 20.0), .k_mu = u(0.1, 1.0), .sigma_0 = u(0.5, 3.0), .k_sigma = u(0.05, 0.5)};
  s.cost = CostModel{.c1 = u(0.0, 0.4), .c2 = u(0.01, 0.2)};
  s.preference = RiskPreference{.rho = u(0.2, 3.0)};
  s.v_bounds = Interval{0.0, 50.0};
  return s;
}

/// Brute-force option value: enumerate regimes, take maxima by scanning.
inline double enumerate_option_value(const RegimeScenario& s, const SpeciesSet& retained, const SpeciesSet& reduced) {
  double with_all = 0.0;
  double with_fewer = 0.0;
  for (const auto& r : s.regimes) {
    double a = -1.0;
    double b = -1.0;
    for (auto i : retained) a = std::max(a, r.service_by_species[i]);
    for (auto i : reduced) b = std::max(b, r.service_by_species[i]);
    with_all += r.probability * a;
    with_fewer += r.probability * b;
  }
  return with_all - with_fewer;
}

/// Random PSD covariance G^T G.
inline std::vector<double> random_psd(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::MatrixXd g(n + 2, n);
  for (int r = 0; r < g.rows(); ++r)
    for (int c = 0; c < n; ++c) g(r, c) = z(rng);
  const Eigen::MatrixXd cov = g.transpose() * g;
  std::vector<double> out(static_cast<std::size_t>(n * n));
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out[static_cast<std::size_t>(r * n + c)] = cov(r, c);
  return out;
}

inline std::vector<double> random_simplex(std::mt19937_64& rng, int n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(static_cast<std::size_t>(n));
  double total = 0.0;
  for (auto& x : w) total += (x = e(rng));
  for (auto& x : w) x /= total;
  return w;
}

inline RegimeScenario random_regimes(std::mt19937_64& rng, int regimes, int species) {
  std::uniform_real_distribution<double> u(0.0, 10.0);
  const auto p = random_simplex(rng, regimes);
  RegimeScenario s;
  for (int r = 0; r < regimes; ++r) {
    Regime regime{.probability = p[static_cast<std::size_t>(r)], .service_by_species = {}};
    for (int k = 0; k < species; ++k) regime.service_by_species.push_back(u(rng));
    s.regimes.push_back(regime);
  }
  return s;
}

}  // namespace bioinsure::testing
