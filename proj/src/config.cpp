#include "bb/config.h"

#include <filesystem>

#include <json.hpp>

#include "bb/errors.h"

namespace bb {

using nlohmann::json;

namespace {

std::string resolve(const json& j, const char* key, const std::string& base_dir) {
  if (!j.contains(key) || j.at(key).is_null()) return {};
  if (!j.at(key).is_string()) throw ArgumentError(std::string("config field '") + key + "' must be a path string");
  std::filesystem::path p = j.at(key).get<std::string>();
  if (p.empty()) return {};
  if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
  return p.lexically_normal().string();
}

GatewayConfig gateway_from_json(const json& j, GatewayConfig g) {
  if (j.is_null()) return g;
  if (!j.is_object()) throw ArgumentError("gateway config must be an object");
  if (j.contains("mode")) {
    const auto m = j.at("mode").get<std::string>();
    if (m == "stub") g.mode = GatewayMode::stub;
    else if (m == "remote") g.mode = GatewayMode::remote;
    else throw ArgumentError("gateway mode must be 'stub' or 'remote'");
  }
  g.endpoint = j.value("endpoint", g.endpoint);
  g.credential = j.value("credential", g.credential);
  g.max_parallel = j.value("max_parallel", g.max_parallel);
  g.timeout = std::chrono::milliseconds(j.value("timeout_ms", static_cast<std::int64_t>(g.timeout.count())));
  g.retries = j.value("retries", g.retries);
  g.backoff = std::chrono::milliseconds(j.value("backoff_ms", static_cast<std::int64_t>(g.backoff.count())));
  g.max_tokens = j.value("max_tokens", g.max_tokens);
  g.temperature = j.value("temperature", g.temperature);
  g.dimension = j.value("dimension", g.dimension);
  g.stub_seed = j.value("stub_seed", g.stub_seed);
  return g;
}

}  // namespace

AppConfig parse_app_config(std::string_view text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ArgumentError("config must be a JSON object");
  AppConfig c;
  try {
    c.corpus_path = resolve(j, "corpus", base_dir);
    c.use_cases_path = resolve(j, "use_cases", base_dir);
    c.model_runs_path = resolve(j, "model_runs", base_dir);
    c.shorthand_path = resolve(j, "shorthand_table", base_dir);
    if (j.contains("indexes")) {
      const json& ix = j.at("indexes");
      c.lexical_index_path = resolve(ix, "lexical", base_dir);
      c.lexical_shorthand_index_path = resolve(ix, "lexical_shorthand", base_dir);
      c.dense_index_path = resolve(ix, "dense", base_dir);
      c.dense_shorthand_index_path = resolve(ix, "dense_shorthand", base_dir);
    }
    const json gw = j.value("gateways", json::object());
    c.completion = gateway_from_json(gw.value("completion", json(nullptr)), c.completion);
    c.embedding = gateway_from_json(gw.value("embedding", json(nullptr)), c.embedding);
    const json r = j.value("retrieval", json::object());
    if (r.contains("backend")) {
      const auto name = r.at("backend").get<std::string>();
      auto b = parse_backend(name);
      if (!b) throw ArgumentError("unknown backend '" + name + "'");
      c.retrieval.backend = *b;
    }
    c.retrieval.default_k = r.value("k", c.retrieval.default_k);
    c.retrieval.oversample = r.value("oversample", c.retrieval.oversample);
    c.retrieval.seed = r.value("seed", c.retrieval.seed);
    c.retrieval.k1 = r.value("k1", c.retrieval.k1);
    c.retrieval.b = r.value("b", c.retrieval.b);
    const json s = j.value("service", json::object());
    c.host = s.value("host", c.host);
    c.port = s.value("port", c.port);
    c.server_threads = s.value("threads", c.server_threads);
    c.retrieval.deadline =
        std::chrono::milliseconds(s.value("deadline_ms", static_cast<std::int64_t>(c.retrieval.deadline.count())));
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("config has a field of the wrong type: ") + e.what());
  }
  c.completion = apply_environment(c.completion, GatewayKind::completion);
  c.embedding = apply_environment(c.embedding, GatewayKind::embedding);
  c.completion.validate();
  c.embedding.validate();
  if (c.corpus_path.empty()) throw ArgumentError("config needs a 'corpus' path");
  return c;
}

GatewayConfig gateway_config_from_json(std::string_view text, GatewayKind kind) {
  GatewayConfig g;
  if (text.find_first_not_of(" \t\r\n") != std::string_view::npos) {
    try {
      g = gateway_from_json(json::parse(text), g);
    } catch (const json::exception& e) {
      throw ArgumentError(std::string("gateway config: ") + e.what());
    }
  }
  g = apply_environment(g, kind);
  g.validate();
  return g;
}

AppConfig load_app_config(const std::string& path) {
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_app_config(read_file(path), dir.empty() ? "." : dir.string());
}

std::shared_ptr<Engine> make_engine(const AppConfig& c) {
  EngineData d;
  d.corpus = ingest_corpus(c.corpus_path);
  if (!c.shorthand_path.empty()) d.corpus = attach_shorthands(d.corpus, load_shorthand_table(c.shorthand_path));
  if (!c.use_cases_path.empty()) d.use_cases = load_use_cases(c.use_cases_path);
  if (!c.model_runs_path.empty()) d.runs = load_model_runs(c.model_runs_path, d.corpus);
  if (!c.lexical_index_path.empty()) d.lexical_raw = LexicalIndex::load(c.lexical_index_path);
  if (!c.lexical_shorthand_index_path.empty()) d.lexical_shorthand = LexicalIndex::load(c.lexical_shorthand_index_path);
  if (!c.dense_index_path.empty()) d.dense_raw = DenseIndex::load(c.dense_index_path, Space::raw);
  if (!c.dense_shorthand_index_path.empty())
    d.dense_shorthand = DenseIndex::load(c.dense_shorthand_index_path, Space::shorthand);
  return std::make_shared<Engine>(std::move(d), make_completion_gateway(c.completion),
                                  make_embedding_gateway(c.embedding), c.retrieval);
}

}  // namespace bb
