#include "bioinsure/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bioinsure/errors.hpp"

namespace bioinsure {

double pairwise_sum(std::span<const double> values) noexcept {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double x : values) s += x;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

// Running moments (Welford); merged with Chan's update.
struct Moments {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();

  void add(double x) noexcept {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
    min = std::min(min, x);
    max = std::max(max, x);
  }

  static Moments merge(const Moments& a, const Moments& b) noexcept {
    if (a.n == 0) return b;
    if (b.n == 0) return a;
    Moments r;
    r.n = a.n + b.n;
    const double na = static_cast<double>(a.n);
    const double nb = static_cast<double>(b.n);
    const double delta = b.mean - a.mean;
    r.mean = a.mean + delta * (nb / static_cast<double>(r.n));
    r.m2 = a.m2 + b.m2 + delta * delta * (na * nb / static_cast<double>(r.n));
    r.min = std::min(a.min, b.min);
    r.max = std::max(a.max, b.max);
    return r;
  }

  double sd() const noexcept { return n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0; }
};

Moments merge_tree(std::span<const Moments> parts) {
  if (parts.empty()) return {};
  if (parts.size() == 1) return parts.front();
  const std::size_t half = parts.size() / 2;
  return Moments::merge(merge_tree(parts.first(half)), merge_tree(parts.subspan(half)));
}

void require_samples(const SamplerConfig& cfg) {
  if (cfg.n_samples == 0) throw ValidationError("sampler.n_samples", "must be >= 1");
}

std::uint64_t block_count(std::uint64_t n) { return (n + kSamplesPerBlock - 1) / kSamplesPerBlock; }

// Visits every draw y = mean + sd * z of block `block` in order.
template <typename Visit>
void for_each_draw(const IncomeDistribution& dist, const SamplerConfig& cfg, std::uint64_t block, Visit&& visit) {
  auto engine = substream(cfg.seed, cfg.stream_id, block);
  std::normal_distribution<double> z(0.0, 1.0);
  const std::uint64_t begin = block * kSamplesPerBlock;
  const std::uint64_t end = std::min(cfg.n_samples, begin + kSamplesPerBlock);
  for (std::uint64_t i = begin; i < end; ++i) visit(dist.mean + dist.sd * z(engine));
}

template <typename Transform>
Moments blocked_moments(const IncomeDistribution& dist, const SamplerConfig& cfg, const Execution& exec,
                        Transform transform) {
  const std::uint64_t blocks = block_count(cfg.n_samples);
  std::vector<Moments> parts(blocks);
  parallel_for(blocks, exec, [&](std::size_t b) {
    Moments m;
    for_each_draw(dist, cfg, b, [&](double y) { m.add(transform(y)); });
    parts[b] = m;
  });
  return merge_tree(parts);
}

}  // namespace

SampleStatistics sample_normal(const IncomeDistribution& dist, const SamplerConfig& cfg, const Execution& exec) {
  require_samples(cfg);
  if (!std::isfinite(dist.mean) || !std::isfinite(dist.sd) || dist.sd < 0.0) {
    throw ValidationError("distribution", "must have finite mean and sd >= 0");
  }
  const Moments m = blocked_moments(dist, cfg, exec, [](double y) { return y; });
  return SampleStatistics{.n = m.n, .mean = m.mean, .sd = m.sd(), .min = m.min, .max = m.max};
}

SampleStatistics sample_service(const ScenarioSpec& scenario, BiodiversityLevel v, const SamplerConfig& cfg,
                                const Execution& exec) {
  require_in_bounds(scenario, v);
  const auto m = eval_service_moments(scenario.service, v);
  return sample_normal(IncomeDistribution{.mean = m.mu, .sd = m.sigma}, cfg, exec);
}

CertaintyEquivalentEstimate mc_certainty_equivalent(const ScenarioSpec& scenario, BiodiversityLevel v,
                                                    const std::optional<InsuranceContract>& contract,
                                                    const SamplerConfig& cfg, const Execution& exec) {
  require_samples(cfg);
  const auto dist = net_income_distribution(scenario, v, contract);
  const double rho = scenario.preference.rho;
  const double root_n = std::sqrt(static_cast<double>(cfg.n_samples));

  if (rho == 0.0) {
    const Moments y = blocked_moments(dist, cfg, exec, [](double x) { return x; });
    return {.ce_hat = y.mean, .standard_error = y.sd() / root_n};
  }

  // First pass: the smallest income anchors the exponentials.
  const double y_min = blocked_moments(dist, cfg, exec, [](double x) { return x; }).min;

  // Second pass over the same draws: e = exp(-rho (y - y_min)) - 1 lies in
  // (-1, 0], and CE = y_min - log1p(mean e) / rho.
  const Moments e = blocked_moments(dist, cfg, exec, [&](double y) { return std::expm1(-rho * (y - y_min)); });
  const double ce = y_min - std::log1p(e.mean) / rho;
  const double se = e.sd() / (root_n * rho * (1.0 + e.mean));
  if (!std::isfinite(ce) || !std::isfinite(se)) throw NumericalError("Monte Carlo certainty equivalent is not finite");
  return {.ce_hat = ce, .standard_error = se};
}

// ---------------------------------------------------------------------------

const BufferPoolSpec& validate(const BufferPoolSpec& s, const char* path) {
  const auto field = [&](const char* name) { return std::string(path) + "." + name; };
  const auto unit = [&](double x, const char* name) {
    if (!std::isfinite(x) || x < 0.0 || x > 1.0) throw ValidationError(field(name), "must lie in [0, 1]");
  };
  if (!std::isfinite(s.issuance_per_period) || !(s.issuance_per_period > 0.0)) {
    throw ValidationError(field("issuance_per_period"), "must be > 0");
  }
  unit(s.buffer_fraction, "buffer_fraction");
  unit(s.reversal_probability, "reversal_probability");
  if (!std::isfinite(s.reversal_severity) || !(s.reversal_severity > 0.0) || s.reversal_severity > 1.0) {
    throw ValidationError(field("reversal_severity"), "must lie in (0, 1]");
  }
  if (s.horizon < 1) throw ValidationError(field("horizon"), "must be >= 1");
  return s;
}

namespace {

template <typename EventSource>
TrialLedger run_trial(const BufferPoolSpec& spec, EventSource&& reversal_occurs, std::vector<BufferPeriod>* trace) {
  TrialLedger ledger;
  double buffer = 0.0;
  double stored = 0.0;
  const double withheld = spec.buffer_fraction * spec.issuance_per_period;
  const double sold = spec.issuance_per_period - withheld;
  if (trace) trace->clear();

  for (std::uint64_t t = 0; t < spec.horizon; ++t) {
    ledger.issued += spec.issuance_per_period;
    ledger.sold += sold;
    buffer += withheld;
    stored += spec.issuance_per_period;

    double reversal = 0.0;
    double deficit = 0.0;
    if (reversal_occurs(t)) {
      reversal = spec.reversal_severity * stored;
      stored -= reversal;
      const double covered = std::min(reversal, buffer);
      if (reversal > buffer) ledger.shortfall = true;
      deficit = reversal - covered;
      buffer -= covered;
      ledger.absorbed += covered;
      ledger.deficit += deficit;
    }
    if (trace) {
      trace->push_back(BufferPeriod{.period = t + 1, .issued = spec.issuance_per_period, .buffer = buffer,
                                    .reversal = reversal, .deficit = deficit});
    }
  }
  ledger.buffer_terminal = buffer;
  ledger.stored_terminal = stored;
  return ledger;
}

}  // namespace

TrialLedger simulate_buffer_trial(const BufferPoolSpec& spec, const SamplerConfig& cfg, std::uint64_t trial,
                                  std::vector<BufferPeriod>* trace) {
  validate(spec);
  auto engine = substream(cfg.seed, cfg.stream_id, trial);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double p = spec.reversal_probability;
  // One uniform per period regardless of p keeps random numbers common
  // across parameter sweeps.
  return run_trial(spec, [&](std::uint64_t) { return uniform(engine) < p; }, trace);
}

TrialLedger replay_buffer_trial(const BufferPoolSpec& spec, const std::vector<bool>& events,
                                std::vector<BufferPeriod>* trace) {
  validate(spec);
  if (events.size() != spec.horizon) throw ValidationError("events", "must hold one flag per period");
  return run_trial(spec, [&](std::uint64_t t) { return static_cast<bool>(events[t]); }, trace);
}

SimulationSummary simulate_buffer_pool(const BufferPoolSpec& spec, std::uint64_t trials, const SamplerConfig& cfg,
                                       const Execution& exec) {
  validate(spec);
  if (trials == 0) throw ValidationError("trials", "must be >= 1");

  std::vector<double> shortfall(trials);
  std::vector<double> terminal(trials);
  std::vector<double> net(trials);
  parallel_for(trials, exec, [&](std::size_t i) {
    const auto ledger = simulate_buffer_trial(spec, cfg, i);
    shortfall[i] = ledger.shortfall ? 1.0 : 0.0;
    terminal[i] = ledger.buffer_terminal;
    net[i] = ledger.net_credits();
  });

  const double n = static_cast<double>(trials);
  SimulationSummary s;
  s.trials = trials;
  s.shortfall_probability = pairwise_sum(shortfall) / n;
  s.expected_terminal_buffer = pairwise_sum(terminal) / n;
  s.expected_net_credits = pairwise_sum(net) / n;
  s.stderr_shortfall = std::sqrt(s.shortfall_probability * (1.0 - s.shortfall_probability) / n);
  return s;
}

}  // namespace bioinsure
