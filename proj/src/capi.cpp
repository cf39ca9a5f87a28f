#include "benchbrowser/benchbrowser.h"

#include <cstdlib>
#include <cstring>
#include <map>
#include <string>

#include "bb/anchors.h"
#include "bb/config.h"
#include "bb/errors.h"
#include "bb/metrics.h"
#include "bb/serialize.h"
#include "bb/service.h"

struct bb_engine {
  std::shared_ptr<bb::Engine> engine;
  bb::AppConfig config;
  std::unique_ptr<bb::Service> service;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

bb_status status_for(bb::ErrorKind kind) {
  switch (kind) {
    case bb::ErrorKind::argument: return BB_ERR_ARGUMENT;
    case bb::ErrorKind::io: return BB_ERR_IO;
    case bb::ErrorKind::ingest: return BB_ERR_INGEST;
    case bb::ErrorKind::key: return BB_ERR_KEY;
    case bb::ErrorKind::format: return BB_ERR_FORMAT;
    case bb::ErrorKind::range: return BB_ERR_RANGE;
    case bb::ErrorKind::coverage: return BB_ERR_COVERAGE;
    case bb::ErrorKind::capacity: return BB_ERR_CAPACITY;
    case bb::ErrorKind::dimension: return BB_ERR_DIMENSION;
    case bb::ErrorKind::state: return BB_ERR_STATE;
    case bb::ErrorKind::gateway: return BB_ERR_GATEWAY;
    case bb::ErrorKind::template_: return BB_ERR_TEMPLATE;
    case bb::ErrorKind::anchor_format: return BB_ERR_ANCHOR_FORMAT;
    case bb::ErrorKind::degenerate: return BB_ERR_DEGENERATE;
    case bb::ErrorKind::shape: return BB_ERR_SHAPE;
    case bb::ErrorKind::deadline: return BB_ERR_DEADLINE;
  }
  return BB_ERR_INTERNAL;
}

template <typename Fn>
bb_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return BB_OK;
  } catch (const bb::Error& e) {
    g_last_error = e.what();
    return status_for(e.kind());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = std::string("malformed JSON: ") + e.what();
    return BB_ERR_ARGUMENT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BB_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return BB_ERR_INTERNAL;
  }
}

template <typename T>
void clear(T** p) {
  if (p) *p = nullptr;
}

void need(const void* p, const char* what) {
  if (!p) throw bb::ArgumentError(std::string(what) + " must not be NULL");
}

nlohmann::json parse_json(const char* text, const char* what) {
  need(text, what);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw bb::ArgumentError(std::string(what) + " is not valid JSON: " + e.what());
  }
}

bb::Space space_arg(const char* space) {
  if (!space || !*space) return bb::Space::raw;
  auto s = bb::parse_space(space);
  if (!s) throw bb::ArgumentError(std::string("unknown space '") + space + "'");
  return *s;
}

bb::Corpus load_corpus(const char* corpus_path, const char* shorthand_path, bool expect_unique = true) {
  need(corpus_path, "corpus_path");
  bb::Corpus corpus = bb::ingest_corpus(corpus_path, expect_unique);
  if (shorthand_path && *shorthand_path)
    corpus = bb::attach_shorthands(corpus, bb::load_shorthand_table(shorthand_path));
  return corpus;
}

std::set<std::string> id_set(const nlohmann::json& j, const char* key) {
  const auto& arr = j.at(key);
  if (!arr.is_array()) throw bb::ArgumentError(std::string("'") + key + "' must be an array of item ids");
  std::set<std::string> out;
  for (const auto& v : arr) out.insert(v.get<std::string>());
  return out;
}

}  // namespace

extern "C" {

const char* bb_last_error(void) { return g_last_error.c_str(); }

const char* bb_status_name(bb_status status) {
  switch (status) {
    case BB_OK: return "ok";
    case BB_ERR_INTERNAL: return "InternalError";
    default: break;
  }
  const int k = static_cast<int>(status) - 1;
  if (k >= 0 && k <= static_cast<int>(bb::ErrorKind::deadline))
    return bb::error_kind_name(static_cast<bb::ErrorKind>(k));
  return "UnknownStatus";
}

void bb_string_free(char* s) { std::free(s); }

bb_status bb_engine_create(const char* config_path, bb_engine** out) {
  return guarded([&] {
    clear(out);
    need(config_path, "config_path");
    need(out, "out");
    auto e = std::make_unique<bb_engine>();
    e->config = bb::load_app_config(config_path);
    e->engine = bb::make_engine(e->config);
    e->service = std::make_unique<bb::Service>(e->engine);
    *out = e.release();
  });
}

bb_status bb_engine_create_json(const char* config_json, const char* base_dir, bb_engine** out) {
  return guarded([&] {
    clear(out);
    need(config_json, "config_json");
    need(out, "out");
    auto e = std::make_unique<bb_engine>();
    e->config = bb::parse_app_config(config_json, base_dir && *base_dir ? base_dir : ".");
    e->engine = bb::make_engine(e->config);
    e->service = std::make_unique<bb::Service>(e->engine);
    *out = e.release();
  });
}

void bb_engine_destroy(bb_engine* engine) { delete engine; }

bb_status bb_engine_query(const bb_engine* engine, const char* request_json, char** out_json) {
  return guarded([&] {
    clear(out_json);
    need(engine, "engine");
    need(out_json, "out_json");
    const auto req = bb::query_request_from_json(parse_json(request_json, "request"), *engine->engine);
    *out_json = dup_string(bb::to_json(engine->engine->query(req)).dump());
  });
}

bb_status bb_engine_audit_facets(const bb_engine* engine, const char* request_json, char** out_json) {
  return guarded([&] {
    clear(out_json);
    need(engine, "engine");
    need(out_json, "out_json");
    const auto j = parse_json(request_json, "request");
    if (!j.is_object() || !j.contains("family")) throw bb::ArgumentError("missing field 'family'");
    const auto family = bb::skill_family_from_json(j.at("family"), *engine->engine);
    const std::size_t k = j.value("k", engine->engine->config().default_k);
    auto strategy = bb::AnchorStrategy::original;
    if (j.contains("strategy")) {
      auto s = bb::parse_strategy(j.at("strategy").get<std::string>());
      if (!s) throw bb::ArgumentError("unknown strategy");
      strategy = *s;
    }
    *out_json = dup_string(bb::to_json(engine->engine->audit_facets(family, k, strategy)).dump());
  });
}

bb_status bb_engine_audit_convergence(const bb_engine* engine, const char* request_json, char** out_json) {
  return guarded([&] {
    clear(out_json);
    need(engine, "engine");
    need(out_json, "out_json");
    const auto req = bb::convergence_request_from_json(parse_json(request_json, "request"));
    *out_json = dup_string(bb::to_json(engine->engine->audit_convergence(req)).dump());
  });
}

bb_status bb_engine_benchmarks(const bb_engine* engine, char** out_json) {
  return guarded([&] {
    clear(out_json);
    need(engine, "engine");
    need(out_json, "out_json");
    auto list = nlohmann::json::array();
    for (const auto& b : engine->engine->corpus().benchmarks()) list.push_back(bb::to_json(b));
    *out_json = dup_string(nlohmann::json{{"benchmarks", list}}.dump());
  });
}

bb_status bb_engine_handle(const bb_engine* engine, const char* method, const char* path, const char* body,
                           int* out_http_status, char** out_body) {
  return guarded([&] {
    clear(out_body);
    if (out_http_status) *out_http_status = 0;
    need(engine, "engine");
    need(method, "method");
    need(path, "path");
    need(out_http_status, "out_http_status");
    need(out_body, "out_body");
    const auto r = engine->service->handle(method, path, body ? body : "");
    *out_http_status = r.status;
    *out_body = dup_string(r.body);
  });
}

bb_status bb_engine_serve(bb_engine* engine, const char* host, int port, size_t threads) {
  return guarded([&] {
    need(engine, "engine");
    engine->service->serve(host && *host ? host : engine->config.host, port > 0 ? port : engine->config.port,
                           threads > 0 ? threads : engine->config.server_threads);
  });
}

bb_status bb_ingest(const char* corpus_path, int expect_unique, const char* shorthand_path, const char* out_corpus_path,
                    char** out_json) {
  return guarded([&] {
    clear(out_json);
    need(out_json, "out_json");
    const bb::Corpus corpus = load_corpus(corpus_path, shorthand_path, expect_unique != 0);
    if (out_corpus_path && *out_corpus_path) bb::write_corpus(corpus, out_corpus_path);
    auto benches = nlohmann::json::array();
    for (const auto& b : corpus.benchmarks()) benches.push_back(bb::to_json(b));
    std::size_t with_shorthand = 0;
    for (const auto& item : corpus.items()) with_shorthand += item.shorthand ? 1 : 0;
    *out_json = dup_string(nlohmann::json{{"items", corpus.size()},
                                          {"benchmarks", benches},
                                          {"duplicates_dropped", corpus.duplicates_dropped()},
                                          {"with_shorthand", with_shorthand}}
                               .dump());
  });
}

bb_status bb_index_build(const char* corpus_path, const char* shorthand_path, const char* kind, const char* space,
                         const char* out_path, const char* gateway_json, char** out_json) {
  return guarded([&] {
    clear(out_json);
    need(kind, "kind");
    need(out_path, "out_path");
    need(out_json, "out_json");
    const bb::Corpus corpus = load_corpus(corpus_path, shorthand_path);
    const bb::Space sp = space_arg(space);
    const std::string k = kind;
    nlohmann::json summary{{"kind", k}, {"space", bb::space_name(sp)}, {"path", out_path}, {"items", corpus.size()}};
    if (k == "lexical") {
      const auto idx = bb::LexicalIndex::build(corpus, bb::kDefaultK1, bb::kDefaultB, sp);
      idx.save(out_path);
      summary["terms"] = idx.postings().size();
    } else if (k == "dense") {
      const auto cfg = bb::gateway_config_from_json(gateway_json ? gateway_json : "", bb::GatewayKind::embedding);
      auto gw = bb::make_embedding_gateway(cfg);
      const auto idx = bb::DenseIndex::build(corpus, *gw, sp);
      idx.save(out_path);
      summary["dimension"] = idx.dimension();
    } else {
      throw bb::ArgumentError("index kind must be 'lexical' or 'dense', got '" + k + "'");
    }
    *out_json = dup_string(summary.dump());
  });
}

bb_status bb_translate_shorthand(const char* corpus_path, const char* out_table_path, const char* gateway_json,
                                 size_t parallelism, char** out_json) {
  std::string gateway_failure;
  const bb_status st = guarded([&] {
    clear(out_json);
    need(out_table_path, "out_table_path");
    need(out_json, "out_json");
    const bb::Corpus corpus = load_corpus(corpus_path, nullptr);
    const auto cfg = bb::gateway_config_from_json(gateway_json ? gateway_json : "", bb::GatewayKind::completion);
    auto lm = bb::make_completion_gateway(cfg);
    const auto result = bb::translate_corpus_to_shorthand(corpus, *lm, parallelism > 0 ? parallelism : cfg.max_parallel);
    bb::write_shorthand_table(result.table, out_table_path);
    nlohmann::json summary{{"translated", result.table.size()},
                           {"rejects", result.rejects},
                           {"gateway_failures", result.gateway_failures},
                           {"path", out_table_path}};
    summary["gateway_error"] = result.gateway_error.empty() ? nlohmann::json(nullptr) : nlohmann::json(result.gateway_error);
    *out_json = dup_string(summary.dump());
    if (!result.gateway_failures.empty())
      gateway_failure = std::to_string(result.gateway_failures.size()) +
                        " items failed at the gateway: " + result.gateway_error;
  });
  if (st != BB_OK || gateway_failure.empty()) return st;
  g_last_error = gateway_failure;
  return BB_ERR_GATEWAY;
}

bb_status bb_eval_metrics(const char* judged_path, const char* request_json, char** out_json) {
  return guarded([&] {
    clear(out_json);
    need(judged_path, "judged_path");
    need(out_json, "out_json");
    const auto j = request_json ? parse_json(request_json, "request") : nlohmann::json::object();
    bb::MetricInputs in;
    in.k = j.value("k", std::size_t{20});
    in.use_case_id = j.value("use_case_id", std::string());
    in.strategy = j.value("strategy", std::string());
    if (j.contains("gold") && !j.at("gold").is_null()) in.gold = id_set(j, "gold");
    if (j.contains("union_relevant") && !j.at("union_relevant").is_null())
      in.union_relevant = id_set(j, "union_relevant");
    if (j.contains("grades")) {
      const auto& g = j.at("grades");
      in.grades.relevant = g.value("relevant", in.grades.relevant);
      in.grades.partially_relevant = g.value("partially_relevant", in.grades.partially_relevant);
      in.grades.irrelevant = g.value("irrelevant", in.grades.irrelevant);
      if (in.grades.relevant < 0 || in.grades.partially_relevant < 0 || in.grades.irrelevant < 0)
        throw bb::ArgumentError("grades must be non-negative");
    }
    const auto judged = bb::parse_judged_jsonl(bb::read_file(judged_path));
    *out_json = dup_string(bb::to_json(bb::evaluate_judged(judged, in)).dump());
  });
}

}  // extern "C"
