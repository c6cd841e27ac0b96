#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "bioinsure/model.hpp"
#include "bioinsure/montecarlo.hpp"
#include "bioinsure/optimize.hpp"
#include "bioinsure/resilience.hpp"
#include "bioinsure/valuation.hpp"

namespace bioinsure {

/// A scenario file: the core model plus optional inputs for the buffer-pool
/// simulator ("buffer_pool") and the resilience report ("resilience").
struct ScenarioDocument {
  ScenarioSpec scenario;
  std::optional<BufferPoolSpec> buffer_pool;
  std::optional<ResilienceInputs> resilience;
};

// Readers are strict: unknown keys, missing required keys and wrong types
// raise ValidationError naming the dotted field path. Parsed values are
// validated against their type invariants.

ScenarioSpec scenario_from_json(const nlohmann::json& j, const std::string& path = "");
ScenarioDocument document_from_json(const nlohmann::json& j);
/// Parses UTF-8 JSON text; syntax errors are reported as ValidationError.
ScenarioDocument parse_scenario_document(std::string_view text);

BufferPoolSpec buffer_pool_from_json(const nlohmann::json& j, const std::string& path = "buffer_pool");
ResilienceReport resilience_report_from_json(const nlohmann::json& j);
ValuationResult valuation_result_from_json(const nlohmann::json& j);
OptimizationResult optimization_result_from_json(const nlohmann::json& j);
SimulationSummary simulation_summary_from_json(const nlohmann::json& j);

void to_json(nlohmann::json& j, const ScenarioSpec& s);
void to_json(nlohmann::json& j, const ScenarioDocument& d);
void to_json(nlohmann::json& j, const BufferPoolSpec& s);
void to_json(nlohmann::json& j, const HazardDamageSpec& h);
void to_json(nlohmann::json& j, const RegimeScenario& r);
void to_json(nlohmann::json& j, const ServicePortfolio& p);
void to_json(nlohmann::json& j, const ResilienceInputs& in);
void to_json(nlohmann::json& j, const ValuationResult& r);
void to_json(nlohmann::json& j, const OptimizationResult& r);
void to_json(nlohmann::json& j, const SimulationSummary& s);
void to_json(nlohmann::json& j, const ResilienceReport& r);

const char* to_string(ActiveBound b) noexcept;

}  // namespace bioinsure
