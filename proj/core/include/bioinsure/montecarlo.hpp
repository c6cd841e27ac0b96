#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bioinsure/model.hpp"
#include "bioinsure/random.hpp"
#include "bioinsure/valuation.hpp"

namespace bioinsure {

/// Identical (seed, stream_id, n_samples) reproduce identical output for any
/// worker count.
struct SamplerConfig {
  std::uint64_t n_samples = 1;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

/// Samples are drawn in fixed-size blocks, one RNG substream per block.
inline constexpr std::uint64_t kSamplesPerBlock = 4096;

struct SampleStatistics {
  std::uint64_t n = 0;
  double mean = 0.0;
  double sd = 0.0;  ///< unbiased (n - 1) estimator; 0 for n = 1
  double min = 0.0;
  double max = 0.0;
};

struct CertaintyEquivalentEstimate {
  double ce_hat = 0.0;
  double standard_error = 0.0;
};

/// N(mean, sd^2) draws summarized. sd = 0 yields every sample equal to mean.
SampleStatistics sample_normal(const IncomeDistribution& dist, const SamplerConfig& cfg,
                               const Execution& exec = {});

/// Draws the ecosystem service s ~ N(mu(v), sigma(v)^2).
SampleStatistics sample_service(const ScenarioSpec& scenario, BiodiversityLevel v, const SamplerConfig& cfg,
                                const Execution& exec = {});

/// CE = u^{-1}(mean u(y)) over sampled net incomes under CARA utility, with a
/// delta-method standard error. Exponentials are taken relative to the
/// smallest sample, so no draw can overflow.
CertaintyEquivalentEstimate mc_certainty_equivalent(const ScenarioSpec& scenario, BiodiversityLevel v,
                                                    const std::optional<InsuranceContract>& contract,
                                                    const SamplerConfig& cfg, const Execution& exec = {});

// ---------------------------------------------------------------------------
// Buffer pool

struct BufferPoolSpec {
  double issuance_per_period = 1.0;
  double buffer_fraction = 0.0;
  double reversal_probability = 0.0;
  double reversal_severity = 1.0;  ///< share of stored carbon destroyed per event
  std::uint64_t horizon = 1;

  friend bool operator==(const BufferPoolSpec&, const BufferPoolSpec&) = default;
};

const BufferPoolSpec& validate(const BufferPoolSpec& spec, const char* path = "buffer_pool");

/// One row of a single trial's trajectory, recorded after the period's reversal.
struct BufferPeriod {
  std::uint64_t period = 0;
  double issued = 0.0;    ///< credits issued this period
  double buffer = 0.0;    ///< buffer balance at period end
  double reversal = 0.0;  ///< carbon destroyed this period
  double deficit = 0.0;   ///< reversal not covered by the buffer this period
};

/// End-of-horizon accounting for one trial.
///   sold + buffer_terminal + absorbed = issued           (credit side)
///   stored_terminal + absorbed + deficit = issued        (carbon side)
struct TrialLedger {
  double issued = 0.0;
  double sold = 0.0;
  double buffer_terminal = 0.0;
  double absorbed = 0.0;
  double deficit = 0.0;
  double stored_terminal = 0.0;
  bool shortfall = false;

  /// Sold credits still backed by stored carbon.
  double net_credits() const noexcept { return sold - deficit; }
};

struct SimulationSummary {
  double shortfall_probability = 0.0;
  double expected_terminal_buffer = 0.0;
  double expected_net_credits = 0.0;
  std::uint64_t trials = 0;
  double stderr_shortfall = 0.0;

  friend bool operator==(const SimulationSummary&, const SimulationSummary&) = default;
};

/// Per period: issue credits, withhold the buffer fraction, sell the rest;
/// with probability p a reversal destroys `severity` of the stored carbon
/// and is debited from the buffer. A shortfall occurs when the reversal
/// exceeds the buffer; the buffer floors at 0 and deficits accumulate.
/// Events are driven by one uniform per period from substream
/// (seed, stream_id, trial), so runs with different (p, b) share random
/// numbers.
TrialLedger simulate_buffer_trial(const BufferPoolSpec& spec, const SamplerConfig& cfg, std::uint64_t trial,
                                  std::vector<BufferPeriod>* trace = nullptr);

/// Same accounting with an explicit event sequence (one flag per period).
TrialLedger replay_buffer_trial(const BufferPoolSpec& spec, const std::vector<bool>& events,
                                std::vector<BufferPeriod>* trace = nullptr);

SimulationSummary simulate_buffer_pool(const BufferPoolSpec& spec, std::uint64_t trials, const SamplerConfig& cfg,
                                       const Execution& exec = {});

/// Sum in a fixed binary tree; the result depends only on the input order.
double pairwise_sum(std::span<const double> values) noexcept;

}  // namespace bioinsure
