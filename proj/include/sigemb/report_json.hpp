#pragma once

#include <json.hpp>

#include "sigemb/pipeline.hpp"
#include "sigemb/suites.hpp"

namespace sigemb {

using json = nlohmann::json;

// term-list serialization of a kernel sum
json blfunction_to_json(const BLFunction& f);
BLFunction blfunction_from_json(const json& j);

// run configuration; unknown keys are rejected
PipelineConfig config_from_json(const json& j);
json config_to_json(const PipelineConfig& c);

// deterministic report payloads (no timestamps, no runtimes)
json report_to_json(const EmbeddingReport& rep);
json audit_to_json(const std::vector<AuditLine>& audit);
json suite_to_json(const SuiteResult& r);

}  // namespace sigemb
