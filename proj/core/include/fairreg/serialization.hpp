#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "fairreg/base_learners.hpp"
#include "fairreg/fair_pipeline.hpp"
#include "fairreg/isotonic.hpp"
#include "fairreg/losses.hpp"
#include "fairreg/metrics.hpp"
#include "fairreg/simulation.hpp"
#include "fairreg/splines.hpp"

namespace fairreg {

/// Version tag written into persisted FairModel documents.
inline constexpr int kModelFormatVersion = 1;

// Every reader throws SchemaError on missing or mistyped fields. LossSpec
// readers also reject unknown keys.

nlohmann::json loss_to_json(const LossSpec& spec);
LossSpec loss_from_json(const nlohmann::json& j);

nlohmann::json step_to_json(const StepFunction& f);
StepFunction step_from_json(const nlohmann::json& j);

nlohmann::json spline_to_json(const SplineFit& f);
SplineFit spline_from_json(const nlohmann::json& j);

nlohmann::json group_models_to_json(const GroupModels& m);
GroupModels group_models_from_json(const nlohmann::json& j);

nlohmann::json fair_model_to_json(const FairModel& m);
FairModel fair_model_from_json(const nlohmann::json& j);

nlohmann::json metrics_to_json(const MetricsReport& r);

nlohmann::json cv_result_to_json(const CvResult& r);
CVConfig cv_config_from_json(const nlohmann::json& j);

nlohmann::json experiment_to_json(const ExperimentResult& r);

/// Sorted keys, shortest round-trip float formatting, two-space indent and a
/// trailing newline, so write -> read -> write is byte-identical.
std::string dump_canonical(const nlohmann::json& j);

/// Parses text; SchemaError on malformed JSON.
nlohmann::json parse_json(const std::string& text);

}  // namespace fairreg
