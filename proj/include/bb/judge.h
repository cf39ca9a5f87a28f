#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bb/corpus.h"
#include "bb/gateway.h"
#include "bb/retrieval.h"

namespace bb {

enum class SelectionScore : int { negative = -1, maybe = 0, positive = 1 };

enum class RelevanceLabel { relevant, partially_relevant, irrelevant };

// relevant 1.0, partially_relevant 0.5, irrelevant 0.0
double relevance_value(RelevanceLabel label);
const char* relevance_label_name(RelevanceLabel label);
std::optional<RelevanceLabel> parse_relevance_label(std::string_view name);

struct JudgedHit {
  RetrievalHit hit;
  std::string benchmark_id;
  std::optional<SelectionScore> selection;
  std::optional<RelevanceLabel> label;
  bool selection_failed = false;  // score tag unparseable after one re-ask
  bool label_failed = false;      // label tag unparseable after one re-ask
  std::string judge_id;

  bool operator==(const JudgedHit&) const = default;
};

struct FilterResult {
  std::vector<JudgedHit> judged;  // every input hit, in input order
  std::vector<JudgedHit> kept;    // selection in {1, 0}, in input order
  std::size_t removed = 0;        // selection -1
  std::size_t failures = 0;       // judge_failed, also excluded from `kept`
};

// Coarse relatedness filter. Per-hit calls run concurrently up to the
// gateway's limit; results come back in input order.
FilterResult filter_hits(const UseCase& use_case, const std::vector<RetrievalHit>& hits, const Corpus& corpus,
                         CompletionGateway& lm);

struct JudgeResult {
  std::vector<JudgedHit> hits;  // input order, failures carry label_failed
  std::size_t failures = 0;
};

JudgeResult judge_relevance(const UseCase& use_case, std::vector<JudgedHit> hits, const Corpus& corpus,
                            CompletionGateway& lm);

// ArgumentError on an empty list.
double mean_relevance(const std::vector<RelevanceLabel>& labels);

// One JSON object per line: {item_id, benchmark, score, selection, label,
// judge_id}. selection is 1/0/-1/null/"judge_failed"; label is a label name,
// null or "judge_failed".
std::string judged_to_jsonl(const std::vector<JudgedHit>& hits);
std::vector<JudgedHit> parse_judged_jsonl(std::string_view data);

}  // namespace bb
