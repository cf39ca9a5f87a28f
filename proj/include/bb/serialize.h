#pragma once

#include <json.hpp>

#include "bb/corpus.h"
#include "bb/judge.h"
#include "bb/metrics.h"
#include "bb/pipeline.h"
#include "bb/validity.h"

namespace bb {

using nlohmann::json;

json to_json(const RetrievalHit& h);
json to_json(const JudgedHit& h);
json to_json(const StageTimings& t);
json to_json(const QueryResponse& r);
json to_json(const MetricReport& r);
json to_json(const RankAgreementReport& r);
json to_json(const FacetCoverageReport& r);
json to_json(const Benchmark& b);
json to_json(const UseCase& uc);

// Request decoding. ArgumentError for malformed fields.
QueryRequest query_request_from_json(const json& j, const Engine& engine);
// ShapeError/FormatError for family invariants, ArgumentError otherwise.
SkillFamily skill_family_from_json(const json& j, const Engine& engine);
Engine::ConvergenceRequest convergence_request_from_json(const json& j);

}  // namespace bb
