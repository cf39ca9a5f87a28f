#include "bb/serialize.h"

#include "bb/errors.h"

namespace bb {

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

const json& field(const json& j, const char* key) {
  if (!j.is_object()) throw ArgumentError("request body must be a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw ArgumentError(std::string("missing field '") + key + "'");
  return *it;
}

std::string string_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) throw ArgumentError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::optional<std::string> optional_string(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return string_field(j, key);
}

std::uint64_t unsigned_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    if (v.get<std::int64_t>() < 0) throw ArgumentError(std::string("field '") + key + "' must be >= 0");
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  throw ArgumentError(std::string("field '") + key + "' must be a non-negative integer");
}

bool bool_field(const json& j, const char* key, bool fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  if (!j.at(key).is_boolean()) throw ArgumentError(std::string("field '") + key + "' must be a boolean");
  return j.at(key).get<bool>();
}

}  // namespace

json to_json(const RetrievalHit& h) {
  return {{"item_id", h.item_id}, {"score", h.score}, {"anchor_index", h.anchor_index}, {"rank", h.rank}};
}

json to_json(const JudgedHit& h) {
  json j = to_json(h.hit);
  j["benchmark"] = h.benchmark_id;
  if (h.selection_failed) j["selection"] = "judge_failed";
  else if (h.selection) j["selection"] = static_cast<int>(*h.selection);
  else j["selection"] = nullptr;
  if (h.label_failed) j["label"] = "judge_failed";
  else if (h.label) j["label"] = relevance_label_name(*h.label);
  else j["label"] = nullptr;
  j["judge_id"] = h.judge_id;
  return j;
}

json to_json(const StageTimings& t) {
  return {{"anchor_ms", t.anchor_ms},
          {"embed_ms", t.embed_ms},
          {"search_ms", t.search_ms},
          {"filter_ms", t.filter_ms},
          {"total_ms", t.total_ms}};
}

json to_json(const UseCase& uc) {
  json j = {{"id", uc.use_case_id}, {"text", uc.text}, {"category", use_case_category_name(uc.category)}};
  j["gold_benchmark"] = uc.gold_benchmark_id ? json(*uc.gold_benchmark_id) : json(nullptr);
  if (uc.facet) {
    j["facet_family"] = uc.facet->family;
    j["facet_axis"] = uc.facet->axis;
    j["facet_value"] = uc.facet->value;
  }
  return j;
}

json to_json(const QueryResponse& r) {
  json hits = json::array();
  for (const auto& h : r.hits) hits.push_back(to_json(h));
  return {{"use_case", r.use_case.text},
          {"use_case_id", r.use_case.use_case_id},
          {"strategy", strategy_name(r.strategy)},
          {"backend", backend_name(r.backend)},
          {"k", r.k},
          {"filtered", r.filtered},
          {"anchors", r.anchors},
          {"hits", hits},
          {"removed", r.removed},
          {"selection_failures", r.selection_failures},
          {"label_failures", r.label_failures},
          {"timings", to_json(r.timings)}};
}

json to_json(const MetricReport& r) {
  const auto& d = r.denominators;
  return {{"use_case_id", r.use_case_id},
          {"strategy", r.strategy},
          {"k", r.k},
          {"method_precision", optional_number(r.method_precision)},
          {"system_precision", optional_number(r.system_precision)},
          {"recall", optional_number(r.recall)},
          {"ndcg", optional_number(r.ndcg)},
          {"intersection", optional_number(r.intersection)},
          {"denominators",
           {{"method", d.method},
            {"system", d.system},
            {"gold", d.gold},
            {"judged", d.judged},
            {"selection_failures", d.selection_failures},
            {"label_failures", d.label_failures}}}};
}

json to_json(const RankAgreementReport& r) {
  return {{"use_case_id", r.use_case_id},
          {"tau_ret", r.tau_ret},
          {"tau_gold", r.tau_gold},
          {"tau_sanity", r.tau_sanity},
          {"delta", r.delta},
          {"trials", r.trials},
          {"seed", r.seed},
          {"retrieved_size", r.retrieved_size},
          {"gold_size", r.gold_size},
          {"skipped", {{"tau_ret", r.skipped_ret}, {"tau_gold", r.skipped_gold}, {"tau_sanity", r.skipped_sanity}}},
          {"shared_subsample", r.shared_subsample}};
}

json to_json(const FacetCoverageReport& r) {
  json facets = json::array();
  json table = json::array();
  for (const auto& e : r.per_facet) {
    json f = {{"facet", e.facet},
              {"relevant_fraction", e.relevant_fraction},
              {"retrieved_count", e.retrieved_count},
              {"relevant_count", e.relevant_count}};
    f["error"] = e.error ? json(*e.error) : json(nullptr);
    facets.push_back(std::move(f));
    if (!e.error) table.push_back({{"facet", e.facet}, {"fraction", e.relevant_fraction}});
  }
  return {{"family_id", r.family_id}, {"axis", r.axis}, {"k", r.k},
          {"per_facet", facets},      {"spread", r.spread}, {"plot", table}};
}

json to_json(const Benchmark& b) {
  return {{"id", b.benchmark_id}, {"metric", metric_kind_name(b.metric_kind)}, {"items", b.item_count}};
}

QueryRequest query_request_from_json(const json& j, const Engine& engine) {
  QueryRequest q;
  if (!j.is_object()) throw ArgumentError("request body must be a JSON object");
  if (auto id = optional_string(j, "use_case_id")) {
    const UseCase* uc = engine.find_use_case(*id);
    if (!uc) throw KeyError("unknown use-case '" + *id + "'");
    q.use_case = *uc;
  } else {
    q.use_case.use_case_id = "adhoc";
    q.use_case.text = string_field(j, "use_case");
    q.use_case.category = UseCaseCategory::custom;
  }
  if (q.use_case.text.find_first_not_of(" \t\r\n") == std::string::npos)
    throw ArgumentError("use-case text is empty");
  q.k = j.contains("k") ? unsigned_field(j, "k") : engine.config().default_k;
  if (q.k < 1) throw ArgumentError("k must be >= 1");
  if (auto s = optional_string(j, "strategy")) {
    auto parsed = parse_strategy(*s);
    if (!parsed) throw ArgumentError("unknown strategy '" + *s + "'");
    q.strategy = *parsed;
  }
  q.filter = bool_field(j, "filter", true);
  if (auto b = optional_string(j, "backend")) {
    auto parsed = parse_backend(*b);
    if (!parsed) throw ArgumentError("unknown backend '" + *b + "'");
    q.backend = *parsed;
  }
  return q;
}

SkillFamily skill_family_from_json(const json& j, const Engine& engine) {
  if (!j.is_object()) throw FormatError("family must be an object", j.dump());
  SkillFamily f;
  try {
    f.family_id = string_field(j, "family_id");
    f.base_capability = optional_string(j, "base_capability").value_or("");
    f.axis = optional_string(j, "axis").value_or("");
    const json& facets = field(j, "facets");
    if (!facets.is_array()) throw FormatError("facets must be an array", facets.dump());
    for (const auto& e : facets) {
      const std::string value = string_field(e, "value");
      UseCase uc;
      if (auto id = optional_string(e, "use_case_id")) {
        const UseCase* known = engine.find_use_case(*id);
        if (!known) throw KeyError("unknown use-case '" + *id + "'");
        uc = *known;
      } else {
        uc.use_case_id = f.family_id + ":" + value;
        uc.text = string_field(e, "text");
        uc.category = UseCaseCategory::skills;
        uc.facet = Facet{f.family_id, f.axis, value};
      }
      f.facets.emplace_back(value, std::move(uc));
    }
  } catch (const ArgumentError& e) {
    throw FormatError(std::string("malformed family: ") + e.what(), j.dump());
  }
  validate_skill_family(f);
  return f;
}

Engine::ConvergenceRequest convergence_request_from_json(const json& j) {
  Engine::ConvergenceRequest r;
  r.use_case_id = string_field(j, "use_case_id");
  const json retrieved = j.value("retrieved", json::object());
  if (!retrieved.is_object()) throw ArgumentError("'retrieved' must map model ids to item id lists");
  for (const auto& [model, ids] : retrieved.items()) {
    if (!ids.is_array()) throw ArgumentError("retrieved items for '" + model + "' must be an array");
    auto& set = r.retrieved[model];
    for (const auto& id : ids) {
      if (!id.is_string()) throw ArgumentError("retrieved item ids must be strings");
      set.insert(id.get<std::string>());
    }
  }
  r.options.trials = j.contains("trials") ? unsigned_field(j, "trials") : 50;
  r.options.seed = unsigned_field(j, "seed");
  r.options.shared_subsample = bool_field(j, "shared_subsample", false);
  if (j.contains("threads")) r.options.threads = unsigned_field(j, "threads");
  if (j.contains("k")) r.k = unsigned_field(j, "k");
  if (r.k < 1) throw ArgumentError("k must be >= 1");
  if (auto s = optional_string(j, "strategy")) {
    auto parsed = parse_strategy(*s);
    if (!parsed) throw ArgumentError("unknown strategy '" + *s + "'");
    r.strategy = *parsed;
  }
  return r;
}

}  // namespace bb
