#include "bb/pipeline.h"

#include <cmath>

#include "bb/errors.h"

namespace bb {

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::dense: return "dense";
    case Backend::lexical: return "lexical";
    case Backend::random: return "random";
  }
  return "dense";
}

std::optional<Backend> parse_backend(std::string_view name) {
  for (auto b : {Backend::dense, Backend::lexical, Backend::random})
    if (name == backend_name(b)) return b;
  return std::nullopt;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

bool all_have_shorthand(const Corpus& corpus) {
  if (corpus.empty()) return false;
  for (const auto& item : corpus.items())
    if (!item.shorthand) return false;
  return true;
}

class Deadline {
 public:
  Deadline(Clock::time_point start, std::chrono::milliseconds budget) : start_(start), budget_(budget) {}
  void check(const char* stage) const {
    if (budget_.count() > 0 && Clock::now() - start_ > budget_)
      throw DeadlineError(std::string("request exceeded its ") + std::to_string(budget_.count()) +
                          " ms deadline during " + stage);
  }

 private:
  Clock::time_point start_;
  std::chrono::milliseconds budget_;
};

}  // namespace

Engine::Engine(EngineData data, std::shared_ptr<CompletionGateway> lm, std::shared_ptr<EmbeddingGateway> embedder,
               RetrievalConfig config)
    : data_(std::move(data)), lm_(std::move(lm)), embedder_(std::move(embedder)), config_(config) {
  if (!lm_ || !embedder_) throw ArgumentError("engine needs a completion and an embedding gateway");
  if (config_.default_k < 1) throw ArgumentError("default k must be >= 1");
  if (!(config_.oversample >= 1.0)) throw ArgumentError("oversample factor must be >= 1");
  for (const auto& uc : data_.use_cases) validate_use_case(uc);
  if (data_.corpus.empty()) return;
  const bool shorthand = all_have_shorthand(data_.corpus);
  if (!data_.lexical_raw) data_.lexical_raw = LexicalIndex::build(data_.corpus, config_.k1, config_.b, Space::raw);
  if (shorthand && !data_.lexical_shorthand)
    data_.lexical_shorthand = LexicalIndex::build(data_.corpus, config_.k1, config_.b, Space::shorthand);
  if (config_.backend == Backend::dense) {
    if (!data_.dense_raw) data_.dense_raw = DenseIndex::build(data_.corpus, *embedder_, Space::raw);
    if (shorthand && !data_.dense_shorthand)
      data_.dense_shorthand = DenseIndex::build(data_.corpus, *embedder_, Space::shorthand);
  }
  for (const auto* idx : {&data_.dense_raw, &data_.dense_shorthand}) {
    if (*idx && (*idx)->size() > 0 && (*idx)->dimension() != embedder_->dimension())
      throw DimensionError("dense index width " + std::to_string((*idx)->dimension()) +
                           " differs from the embedding gateway's " + std::to_string(embedder_->dimension()));
  }
}

const UseCase* Engine::find_use_case(std::string_view id) const {
  for (const auto& uc : data_.use_cases)
    if (uc.use_case_id == id) return &uc;
  return nullptr;
}

std::vector<std::vector<RetrievalHit>> Engine::retrieve(const AnchorSet& anchors, Backend backend,
                                                        std::size_t depth, StageTimings& t) const {
  std::vector<std::vector<RetrievalHit>> per_anchor;
  const bool shorthand = anchors.target_space == Space::shorthand;
  if (backend == Backend::random) {
    const auto s = Clock::now();
    per_anchor.push_back(random_baseline(data_.corpus, std::min(depth, data_.corpus.size()), config_.seed));
    t.search_ms += ms_since(s);
    return per_anchor;
  }
  if (backend == Backend::lexical) {
    const auto& idx = shorthand ? data_.lexical_shorthand : data_.lexical_raw;
    if (!idx) throw StateError(std::string("no lexical index for the ") + (shorthand ? "shorthand" : "raw") + " space");
    const auto s = Clock::now();
    for (std::size_t a = 0; a < anchors.anchors.size(); ++a) {
      auto hits = idx->search(anchors.anchors[a], depth);
      for (auto& h : hits) h.anchor_index = a;
      per_anchor.push_back(std::move(hits));
    }
    t.search_ms += ms_since(s);
    return per_anchor;
  }
  const auto& idx = shorthand ? data_.dense_shorthand : data_.dense_raw;
  if (!idx) throw StateError(std::string("no dense index for the ") + (shorthand ? "shorthand" : "raw") + " space");
  auto s = Clock::now();
  const auto vectors = embedder_->embed(anchors.anchors, default_embedding_instruction(), default_demonstrations());
  t.embed_ms += ms_since(s);
  if (vectors.size() != anchors.anchors.size())
    throw GatewayError("embedding gateway returned " + std::to_string(vectors.size()) + " vectors for " +
                       std::to_string(anchors.anchors.size()) + " anchors");
  s = Clock::now();
  for (std::size_t a = 0; a < vectors.size(); ++a) {
    auto hits = idx->search(vectors[a].values, depth);
    for (auto& h : hits) h.anchor_index = a;
    per_anchor.push_back(std::move(hits));
  }
  t.search_ms += ms_since(s);
  return per_anchor;
}

QueryResponse Engine::query(const QueryRequest& request) const {
  const auto start = Clock::now();
  const Deadline deadline(start, config_.deadline);
  if (request.k < 1) throw ArgumentError("k must be >= 1");
  if (request.use_case.text.empty()) throw ArgumentError("use-case text is empty");
  if (data_.corpus.empty()) throw StateError("no corpus loaded");

  QueryResponse r;
  r.use_case = request.use_case;
  r.strategy = request.strategy;
  r.backend = request.backend.value_or(config_.backend);
  r.k = request.k;
  r.filtered = request.filter;

  auto s = Clock::now();
  const AnchorSet anchors = generate_anchors(request.use_case, request.strategy, *lm_);
  r.timings.anchor_ms = ms_since(s);
  r.anchors = anchors.anchors;
  deadline.check("anchor generation");

  const auto depth = static_cast<std::size_t>(std::ceil(static_cast<double>(request.k) * config_.oversample));
  const auto per_anchor = retrieve(anchors, r.backend, depth, r.timings);
  s = Clock::now();
  const auto merged = merge_anchor_hits(per_anchor, request.k);
  r.timings.search_ms += ms_since(s);
  deadline.check("retrieval");

  if (request.filter) {
    s = Clock::now();
    FilterResult f = filter_hits(request.use_case, merged, data_.corpus, *lm_);
    deadline.check("filtering");
    JudgeResult j = judge_relevance(request.use_case, f.kept, data_.corpus, *lm_);
    r.timings.filter_ms = ms_since(s);
    r.removed = f.removed;
    r.selection_failures = f.failures;
    r.label_failures = j.failures;
    // Put the labels back in rank order next to the removed entries.
    std::size_t next = 0;
    for (auto& h : f.judged) {
      if (next < j.hits.size() && j.hits[next].hit.item_id == h.hit.item_id) h = j.hits[next++];
    }
    r.hits = std::move(f.judged);
    deadline.check("judging");
  } else {
    for (const auto& h : merged) {
      JudgedHit jh;
      jh.hit = h;
      jh.benchmark_id = data_.corpus.at(h.item_id).benchmark_id;
      r.hits.push_back(std::move(jh));
    }
  }
  r.timings.total_ms = ms_since(start);
  return r;
}

FacetCoverageReport Engine::audit_facets(const SkillFamily& family, std::size_t k, AnchorStrategy strategy) const {
  return facet_coverage(
      family,
      [&](const UseCase& uc, std::size_t depth) {
        QueryRequest q;
        q.use_case = uc;
        q.k = depth;
        q.strategy = strategy;
        q.filter = true;
        const auto resp = query(q);
        FacetCounts c;
        c.retrieved_count = resp.hits.size();
        for (const auto& h : resp.hits)
          c.relevant_count += (h.label && *h.label == RelevanceLabel::relevant) ? 1 : 0;
        return c;
      },
      k);
}

RankAgreementReport Engine::audit_convergence(const ConvergenceRequest& request) const {
  const UseCase* uc = find_use_case(request.use_case_id);
  if (!uc) throw KeyError("unknown use-case '" + request.use_case_id + "'");
  if (!uc->gold_benchmark_id) throw StateError("use-case '" + uc->use_case_id + "' has no gold benchmark");
  if (!data_.runs) throw StateError("no model runs are loaded");
  if (!data_.corpus.benchmark(*uc->gold_benchmark_id))
    throw KeyError("gold benchmark '" + *uc->gold_benchmark_id + "' is not in the corpus");
  std::set<std::string> gold;
  for (std::size_t i : data_.corpus.items_of(*uc->gold_benchmark_id)) gold.insert(data_.corpus.items()[i].item_id);
  std::map<std::string, std::set<std::string>> retrieved = request.retrieved;
  if (retrieved.empty()) {
    QueryRequest q;
    q.use_case = *uc;
    q.k = request.k;
    q.strategy = request.strategy;
    const auto resp = query(q);
    for (const auto& model : data_.runs->model_ids()) {
      std::set<std::string> items;
      for (const auto& h : resp.hits)
        if (h.label && *h.label != RelevanceLabel::irrelevant && data_.runs->has(model, h.hit.item_id))
          items.insert(h.hit.item_id);
      if (!items.empty()) retrieved.emplace(model, std::move(items));
    }
    if (retrieved.size() < 2)
      throw StateError("fewer than 2 models have scores on the relevant items retrieved for '" + uc->use_case_id + "'");
  }
  for (const auto& [model, items] : retrieved) {
    if (!data_.runs->has_model(model)) throw KeyError("no scores for model '" + model + "'");
    for (const auto& id : items)
      if (!data_.runs->has(model, id))
        throw KeyError("no score for model '" + model + "' on retrieved item '" + id + "'");
  }
  return convergence_report(uc->use_case_id, *data_.runs, retrieved, gold, request.options);
}

}  // namespace bb
