#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bb/anchors.h"
#include "bb/corpus.h"
#include "bb/gateway.h"
#include "bb/judge.h"
#include "bb/retrieval.h"
#include "bb/validity.h"

namespace bb {

enum class Backend { dense, lexical, random };

const char* backend_name(Backend b);
std::optional<Backend> parse_backend(std::string_view name);

struct RetrievalConfig {
  Backend backend = Backend::dense;
  std::size_t default_k = 20;
  double oversample = 1.0;  // per-anchor depth = ceil(k * oversample)
  std::uint64_t seed = 0;   // random baseline
  std::chrono::milliseconds deadline{120000};
  double k1 = kDefaultK1;
  double b = kDefaultB;
};

struct StageTimings {
  double anchor_ms = 0.0;
  double embed_ms = 0.0;
  double search_ms = 0.0;
  double filter_ms = 0.0;
  double total_ms = 0.0;
};

struct QueryRequest {
  UseCase use_case;
  std::size_t k = 20;
  AnchorStrategy strategy = AnchorStrategy::original;
  bool filter = true;  // run the relatedness filter and the relevance judge
  std::optional<Backend> backend;
};

struct QueryResponse {
  UseCase use_case;
  AnchorStrategy strategy = AnchorStrategy::original;
  Backend backend = Backend::dense;
  std::size_t k = 0;
  bool filtered = false;
  std::vector<std::string> anchors;
  // Merged top-k in rank order. With filtering on, each entry carries its
  // selection and, when it survived, its label.
  std::vector<JudgedHit> hits;
  std::size_t removed = 0;
  std::size_t selection_failures = 0;
  std::size_t label_failures = 0;
  StageTimings timings;
};

struct EngineData {
  Corpus corpus;
  std::vector<UseCase> use_cases;
  std::optional<ModelRunSet> runs;
  std::optional<LexicalIndex> lexical_raw;
  std::optional<LexicalIndex> lexical_shorthand;
  std::optional<DenseIndex> dense_raw;
  std::optional<DenseIndex> dense_shorthand;
};

// Shared, read-only query engine. Indexes that are not supplied are built
// from the corpus on construction (shorthand ones only when every item has a
// shorthand).
class Engine {
 public:
  Engine(EngineData data, std::shared_ptr<CompletionGateway> lm, std::shared_ptr<EmbeddingGateway> embedder,
         RetrievalConfig config = {});

  QueryResponse query(const QueryRequest& request) const;

  FacetCoverageReport audit_facets(const SkillFamily& family, std::size_t k,
                                   AnchorStrategy strategy = AnchorStrategy::original) const;

  struct ConvergenceRequest {
    std::string use_case_id;
    std::map<std::string, std::set<std::string>> retrieved;  // model -> item ids
    MonteCarloOptions options;
    // Used when `retrieved` is empty: the use-case is run through the
    // pipeline and every model gets the surviving hits it has scores for.
    std::size_t k = 20;
    AnchorStrategy strategy = AnchorStrategy::original;
  };
  // StateError when the use-case has no gold benchmark or no model runs are
  // loaded; KeyError on unknown ids.
  RankAgreementReport audit_convergence(const ConvergenceRequest& request) const;

  const Corpus& corpus() const { return data_.corpus; }
  const std::vector<UseCase>& use_cases() const { return data_.use_cases; }
  const UseCase* find_use_case(std::string_view id) const;
  const RetrievalConfig& config() const { return config_; }
  const EngineData& data() const { return data_; }

 private:
  std::vector<std::vector<RetrievalHit>> retrieve(const AnchorSet& anchors, Backend backend, std::size_t depth,
                                                  StageTimings& t) const;

  EngineData data_;
  std::shared_ptr<CompletionGateway> lm_;
  std::shared_ptr<EmbeddingGateway> embedder_;
  RetrievalConfig config_;
};

}  // namespace bb
