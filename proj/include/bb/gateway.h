#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "bb/concurrency.h"
#include "bb/embedding.h"
#include "bb/templates.h"

namespace bb {

enum class GatewayMode { remote, stub };

struct GatewayConfig {
  GatewayMode mode = GatewayMode::stub;
  std::string endpoint;    // full URL of the POST target; required in remote mode
  std::string credential;  // bearer token, empty for none
  std::size_t max_parallel = 4;
  std::chrono::milliseconds timeout{30000};
  int retries = 3;
  std::chrono::milliseconds backoff{250};  // first retry delay, doubled per attempt
  int max_tokens = 512;
  double temperature = 0.0;
  std::size_t dimension = 256;  // embedding width (stub) / expected width (remote, 0 = any)
  std::uint64_t stub_seed = 0;

  void validate() const;  // ArgumentError
};

enum class GatewayKind { completion, embedding };

// Applies BB_MODE and BB_LM_URL/BB_LM_KEY or BB_EMBED_URL/BB_EMBED_KEY on top
// of `base`.
GatewayConfig apply_environment(GatewayConfig base, GatewayKind kind);

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Thrown by transports when no HTTP response was obtained.
struct TransportFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post(const std::string& url, const std::string& json_body,
                            const std::vector<std::pair<std::string, std::string>>& headers,
                            std::chrono::milliseconds timeout) = 0;
};

std::shared_ptr<HttpTransport> make_http_transport();

class CompletionGateway {
 public:
  virtual ~CompletionGateway() = default;
  // TemplateError for unbound placeholders, GatewayError on transport
  // exhaustion, ResponseFormatError for malformed remote answers.
  virtual std::string complete(TemplateId id, const Variables& vars) = 0;
  virtual std::size_t max_parallel() const = 0;
  virtual std::string id() const = 0;
};

struct Demonstration {
  std::string query;
  std::string document;
};

class EmbeddingGateway {
 public:
  virtual ~EmbeddingGateway() = default;
  // ArgumentError on empty input; every returned vector is L2-normalised.
  virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts, const std::string& instruction,
                                             const std::vector<Demonstration>& demonstrations) = 0;
  virtual std::size_t dimension() const = 0;
  virtual std::size_t max_parallel() const = 0;
};

// Deterministic offline completion. Judges score by the share of distinct
// user-intent tokens found in the test case: >= 0.5 positive, >= 0.2
// partial, otherwise negative.
class StubCompletionGateway final : public CompletionGateway {
 public:
  explicit StubCompletionGateway(std::size_t max_parallel = 4) : max_parallel_(max_parallel) {}
  std::string complete(TemplateId id, const Variables& vars) override;
  std::size_t max_parallel() const override { return max_parallel_; }
  std::string id() const override { return "stub"; }

 private:
  std::size_t max_parallel_;
};

double token_overlap(const std::string& intent, const std::string& candidate);

class RemoteCompletionGateway final : public CompletionGateway {
 public:
  RemoteCompletionGateway(GatewayConfig config, std::shared_ptr<HttpTransport> transport);
  std::string complete(TemplateId id, const Variables& vars) override;
  std::size_t max_parallel() const override { return config_.max_parallel; }
  std::string id() const override { return "remote:" + config_.endpoint; }

 private:
  GatewayConfig config_;
  std::shared_ptr<HttpTransport> transport_;
  Limiter limiter_;
};

// Signed feature hashing of lowercase word tokens, then L2 normalisation.
// Texts without tokens map to a fixed unit vector.
class StubEmbeddingGateway final : public EmbeddingGateway {
 public:
  explicit StubEmbeddingGateway(std::size_t dimension = 256, std::uint64_t seed = 0, std::size_t max_parallel = 4)
      : dimension_(dimension), seed_(seed), max_parallel_(max_parallel) {}
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts, const std::string& instruction,
                                     const std::vector<Demonstration>& demonstrations) override;
  std::size_t dimension() const override { return dimension_; }
  std::size_t max_parallel() const override { return max_parallel_; }

  EmbeddingVector embed_one(const std::string& text) const;

 private:
  std::size_t dimension_;
  std::uint64_t seed_;
  std::size_t max_parallel_;
};

class RemoteEmbeddingGateway final : public EmbeddingGateway {
 public:
  RemoteEmbeddingGateway(GatewayConfig config, std::shared_ptr<HttpTransport> transport);
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts, const std::string& instruction,
                                     const std::vector<Demonstration>& demonstrations) override;
  std::size_t dimension() const override { return config_.dimension; }
  std::size_t max_parallel() const override { return config_.max_parallel; }

 private:
  GatewayConfig config_;
  std::shared_ptr<HttpTransport> transport_;
  Limiter limiter_;
};

std::shared_ptr<CompletionGateway> make_completion_gateway(const GatewayConfig& config,
                                                           std::shared_ptr<HttpTransport> transport = nullptr);
std::shared_ptr<EmbeddingGateway> make_embedding_gateway(const GatewayConfig& config,
                                                         std::shared_ptr<HttpTransport> transport = nullptr);

// One-shot helpers mirroring the gateway operations.
std::string complete(TemplateId id, const Variables& vars, const GatewayConfig& config);
std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts, const std::string& instruction,
                                   const std::vector<Demonstration>& demonstrations, const GatewayConfig& config);

// Instruction and in-context demonstrations used when embedding queries.
const std::string& default_embedding_instruction();
const std::vector<Demonstration>& default_demonstrations();

}  // namespace bb
