#include "bb/gateway.h"

#include <cstdlib>
#include <set>
#include <thread>

#include <json.hpp>

#include "bb/errors.h"
#include "bb/text.h"

namespace bb {

using nlohmann::json;

void GatewayConfig::validate() const {
  if (max_parallel < 1) throw ArgumentError("gateway max_parallel must be >= 1");
  if (mode == GatewayMode::remote && endpoint.empty()) throw ArgumentError("remote gateway needs an endpoint");
  if (retries < 0) throw ArgumentError("gateway retries must be >= 0");
  if (timeout.count() <= 0) throw ArgumentError("gateway timeout must be positive");
}

GatewayConfig apply_environment(GatewayConfig base, GatewayKind kind) {
  auto env = [](const char* name) -> const char* {
    const char* v = std::getenv(name);
    return (v && *v) ? v : nullptr;
  };
  if (const char* mode = env("BB_MODE")) {
    const std::string m(mode);
    if (m == "remote") base.mode = GatewayMode::remote;
    else if (m == "stub") base.mode = GatewayMode::stub;
    else throw ArgumentError("BB_MODE must be 'remote' or 'stub', got '" + m + "'");
  }
  const bool lm = kind == GatewayKind::completion;
  if (const char* url = env(lm ? "BB_LM_URL" : "BB_EMBED_URL")) base.endpoint = url;
  if (const char* key = env(lm ? "BB_LM_KEY" : "BB_EMBED_KEY")) base.credential = key;
  return base;
}

// ---------------------------------------------------------------------------
// stub completion

double token_overlap(const std::string& intent, const std::string& candidate) {
  const auto a = tokenize(intent);
  const std::set<std::string> wanted(a.begin(), a.end());
  if (wanted.empty()) return 0.0;
  const auto b = tokenize(candidate);
  const std::set<std::string> have(b.begin(), b.end());
  std::size_t hit = 0;
  for (const auto& t : wanted) hit += have.count(t);
  return static_cast<double>(hit) / static_cast<double>(wanted.size());
}

namespace {

std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::string stub_shorthand(const std::string& text) {
  std::vector<std::string> tokens;
  for (auto& t : tokenize(text))
    if (is_snake_token(t)) tokens.push_back(std::move(t));
  if (tokens.empty()) return "unknown";
  std::string out = tokens.front();
  for (std::size_t i = 1; i < tokens.size() && i <= 3; ++i) out += " & " + tokens[i];
  return out;
}

}  // namespace

std::string StubCompletionGateway::complete(TemplateId id, const Variables& vars) {
  render_template(id, vars);  // placeholder check
  switch (id) {
    case TemplateId::rephrasing: {
      const std::string q = trimmed(vars.at("query"));
      return "<refinements>\n    <refinement>" + q + " fundamentals</refinement>\n    <refinement>" + q +
             " applications</refinement>\n    <refinement>" + q + " practice problems</refinement>\n</refinements>";
    }
    case TemplateId::example_synthesis: {
      const std::string q = trimmed(vars.at("query"));
      return "<testcases>\n    <testcase>Explain in detail the key ideas behind " + q +
             ".</testcase>\n    <testcase>Which of the following best describes " + q +
             "? Options: a) a core principle b) a common misconception c) an unrelated fact d) none of the "
             "above</testcase>\n    <testcase>Fill in the blank: an essential concept in " + q +
             " is ____.</testcase>\n</testcases>";
    }
    case TemplateId::shorthand_rewrite:
      return "<shorthand>" + stub_shorthand(vars.at("text")) + "</shorthand>";
    case TemplateId::selection_judge: {
      const double o = token_overlap(vars.at("user_intent"), vars.at("test_case"));
      const char* s = o >= 0.5 ? "1" : (o >= 0.2 ? "0" : "-1");
      return std::string("<score>") + s + "</score>";
    }
    case TemplateId::evaluation_judge: {
      const double o = token_overlap(vars.at("user_intent"), vars.at("test_case"));
      const char* l = o >= 0.5 ? "RELEVANT" : (o >= 0.2 ? "PARTIAL RELEVANT" : "IRRELEVANT");
      return std::string("<label>") + l + "</label>";
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// remote plumbing

namespace {

bool retryable(int status) { return status == 0 || status == 408 || status == 429 || status >= 500; }

// POSTs with retries and exponential backoff. Returns the body of a 2xx.
std::string post_with_retries(HttpTransport& transport, const GatewayConfig& cfg, Limiter& limiter,
                              const std::string& body) {
  std::vector<std::pair<std::string, std::string>> headers{{"Content-Type", "application/json"}};
  if (!cfg.credential.empty()) headers.emplace_back("Authorization", "Bearer " + cfg.credential);
  std::string last_error;
  auto delay = cfg.backoff;
  for (int attempt = 0; attempt <= cfg.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    HttpResponse resp;
    try {
      Limiter::Permit permit(limiter);
      resp = transport.post(cfg.endpoint, body, headers, cfg.timeout);
    } catch (const TransportFailure& e) {
      last_error = e.what();
      continue;
    }
    if (resp.status >= 200 && resp.status < 300) return resp.body;
    last_error = "HTTP " + std::to_string(resp.status);
    if (!retryable(resp.status)) break;
  }
  throw GatewayError("request to " + cfg.endpoint + " failed after " + std::to_string(cfg.retries) +
                     " retries: " + last_error);
}

}  // namespace

RemoteCompletionGateway::RemoteCompletionGateway(GatewayConfig config, std::shared_ptr<HttpTransport> transport)
    : config_(std::move(config)),
      transport_(transport ? std::move(transport) : make_http_transport()),
      limiter_(config_.max_parallel) {
  config_.validate();
}

std::string RemoteCompletionGateway::complete(TemplateId id, const Variables& vars) {
  const std::string prompt = render_template(id, vars);
  const json req{{"prompt", prompt}, {"max_tokens", config_.max_tokens}, {"temperature", config_.temperature}};
  const std::string body = post_with_retries(*transport_, config_, limiter_, req.dump());
  std::string text;
  try {
    const json resp = json::parse(body);
    text = resp.at("text").get<std::string>();
  } catch (const json::exception& e) {
    throw ResponseFormatError(std::string("completion response is not {text}: ") + e.what(), body);
  }
  validate_response(id, text);
  return text;
}

std::vector<EmbeddingVector> StubEmbeddingGateway::embed(const std::vector<std::string>& texts, const std::string&,
                                                         const std::vector<Demonstration>&) {
  if (texts.empty()) throw ArgumentError("embed called with no texts");
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_one(t));
  return out;
}

EmbeddingVector StubEmbeddingGateway::embed_one(const std::string& text) const {
  EmbeddingVector v;
  v.values.assign(dimension_, 0.0f);
  const auto tokens = tokenize(text);
  for (const auto& tok : tokens) {
    const std::uint64_t h = fnv1a64(tok, seed_);
    const std::size_t bucket = static_cast<std::size_t>(h % dimension_);
    const float sign = ((h >> 40) & 1U) ? -1.0f : 1.0f;
    v.values[bucket] += sign;
  }
  bool any = false;
  for (float x : v.values) any = any || x != 0.0f;
  if (!any) v.values[static_cast<std::size_t>(fnv1a64("", seed_) % dimension_)] = 1.0f;
  normalize(v);
  return v;
}

RemoteEmbeddingGateway::RemoteEmbeddingGateway(GatewayConfig config, std::shared_ptr<HttpTransport> transport)
    : config_(std::move(config)),
      transport_(transport ? std::move(transport) : make_http_transport()),
      limiter_(config_.max_parallel) {
  config_.validate();
}

std::vector<EmbeddingVector> RemoteEmbeddingGateway::embed(const std::vector<std::string>& texts,
                                                           const std::string& instruction,
                                                           const std::vector<Demonstration>& demonstrations) {
  if (texts.empty()) throw ArgumentError("embed called with no texts");
  constexpr std::size_t kBatch = 64;
  const std::size_t batches = (texts.size() + kBatch - 1) / kBatch;
  json demos = json::array();
  for (const auto& d : demonstrations) demos.push_back({{"query", d.query}, {"document", d.document}});

  std::vector<EmbeddingVector> out(texts.size());
  parallel_for(batches, config_.max_parallel, [&](std::size_t b) {
    const std::size_t lo = b * kBatch;
    const std::size_t hi = std::min(texts.size(), lo + kBatch);
    json req{{"inputs", std::vector<std::string>(texts.begin() + lo, texts.begin() + hi)},
             {"instruction", instruction},
             {"demonstrations", demos}};
    const std::string body = post_with_retries(*transport_, config_, limiter_, req.dump());
    json resp;
    try {
      resp = json::parse(body);
    } catch (const json::exception& e) {
      throw ResponseFormatError(std::string("embedding response is not JSON: ") + e.what(), body);
    }
    const auto vit = resp.find("vectors");
    if (vit == resp.end() || !vit->is_array() || vit->size() != hi - lo)
      throw ResponseFormatError("embedding response must carry one vector per input", body);
    for (std::size_t i = 0; i < hi - lo; ++i) {
      const json& row = (*vit)[i];
      if (!row.is_array() || row.empty()) throw ResponseFormatError("embedding vector is not a numeric array", body);
      EmbeddingVector v;
      v.values.reserve(row.size());
      for (const auto& x : row) {
        if (!x.is_number()) throw ResponseFormatError("embedding vector has a non-numeric entry", body);
        v.values.push_back(x.get<float>());
      }
      if (config_.dimension != 0 && v.dimension() != config_.dimension)
        throw ResponseFormatError("embedding dimension " + std::to_string(v.dimension()) + " != configured " +
                                      std::to_string(config_.dimension),
                                  body);
      try {
        normalize(v);
      } catch (const Error& e) {
        throw ResponseFormatError(e.what(), body);
      }
      out[lo + i] = std::move(v);
    }
  });
  const std::size_t dim = out.front().dimension();
  for (const auto& v : out)
    if (v.dimension() != dim) throw ResponseFormatError("embedding dimensions disagree within a response", "");
  return out;
}

std::shared_ptr<CompletionGateway> make_completion_gateway(const GatewayConfig& config,
                                                           std::shared_ptr<HttpTransport> transport) {
  config.validate();
  if (config.mode == GatewayMode::stub) return std::make_shared<StubCompletionGateway>(config.max_parallel);
  return std::make_shared<RemoteCompletionGateway>(config, std::move(transport));
}

std::shared_ptr<EmbeddingGateway> make_embedding_gateway(const GatewayConfig& config,
                                                         std::shared_ptr<HttpTransport> transport) {
  config.validate();
  if (config.mode == GatewayMode::stub)
    return std::make_shared<StubEmbeddingGateway>(config.dimension == 0 ? 256 : config.dimension, config.stub_seed,
                                                  config.max_parallel);
  return std::make_shared<RemoteEmbeddingGateway>(config, std::move(transport));
}

std::string complete(TemplateId id, const Variables& vars, const GatewayConfig& config) {
  return make_completion_gateway(config)->complete(id, vars);
}

std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts, const std::string& instruction,
                                   const std::vector<Demonstration>& demonstrations, const GatewayConfig& config) {
  return make_embedding_gateway(config)->embed(texts, instruction, demonstrations);
}

const std::string& default_embedding_instruction() {
  static const std::string s =
      "Given an activity, retrieve relevant records that have the same underlying concepts and topics as the "
      "given activity";
  return s;
}

const std::vector<Demonstration>& default_demonstrations() {
  static const std::vector<Demonstration> d{
      {"Verify scientific claims",
       "Claim: AdaBERT achieves inferior performance while significantly worsening the effiency by 12.7x. Evidence: "
       "The dataset contains 3772 word pairs. The accuracy of ConVecs 70.02% is not significantly different from the "
       "accuracy of SimDiffs (72.4%). Label: Negative/Refuted."},
      {"Blogging", "Write a blog announcing the opening of a new mall in the town of Serenity."},
      {"Unit Testing Code",
       "Question: An anagram is the result of rearranging the letters of a word to produce a new word. Note: anagrams "
       "are case insensitive Complete the function to return true if the two arguments given are anagrams of each "
       "other; return false otherwise. Examples: foefet is an anagram of toffee. ut_id: 0 code - import unittest "
       "class TestAreAnagramsFunction(unittest.TestCase): This class contains unit tests for the are_anagrams "
       "function. def test_anagram(self): Test that two anagrams return True. "
       "self.assertTrue(are_anagrams(\"foefet\", \"toffee\")) def test_not_anagram(self): Test that two non-anagrams "
       "return False."},
      {"Star Gazing", "The Big Dipper is a ______ constellation."},
      {"Resume for Machine Learning Engineer",
       "I am a software engineer with 5 years of experience in the industry. Can you help me write a resume?"},
  };
  return d;
}

}  // namespace bb
