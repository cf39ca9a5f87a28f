#include "bb/metrics.h"

#include <algorithm>
#include <cmath>
#include <functional>

#include "bb/errors.h"

namespace bb {

namespace {

void check_k(std::size_t k) {
  if (k < 1) throw ArgumentError("k must be >= 1");
}

double dcg(const std::vector<int>& grades, std::size_t k) {
  double sum = 0.0;
  const std::size_t n = std::min(k, grades.size());
  for (std::size_t i = 0; i < n; ++i)
    sum += (std::exp2(static_cast<double>(grades[i])) - 1.0) / std::log2(static_cast<double>(i) + 2.0);
  return sum;
}

}  // namespace

int GradeMap::grade(RelevanceLabel l) const {
  switch (l) {
    case RelevanceLabel::relevant: return relevant;
    case RelevanceLabel::partially_relevant: return partially_relevant;
    case RelevanceLabel::irrelevant: return irrelevant;
  }
  return 0;
}

double method_precision_at_k(const std::vector<SelectionScore>& selections, std::size_t k) {
  check_k(k);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < std::min(k, selections.size()); ++i)
    pos += selections[i] != SelectionScore::negative ? 1 : 0;
  return static_cast<double>(pos) / static_cast<double>(k);
}

double system_precision_at_k(const std::vector<RelevanceLabel>& labels, std::size_t k) {
  check_k(k);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < std::min(k, labels.size()); ++i)
    pos += labels[i] != RelevanceLabel::irrelevant ? 1 : 0;
  return static_cast<double>(pos) / static_cast<double>(k);
}

double recall_at_k(const std::vector<RetrievalHit>& hits, const std::set<std::string>& gold, std::size_t k) {
  if (gold.empty()) throw ArgumentError("recall needs a non-empty gold set");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < std::min(k, hits.size()); ++i)
    if (gold.count(hits[i].item_id)) seen.insert(hits[i].item_id);
  return static_cast<double>(seen.size()) / static_cast<double>(gold.size());
}

double ndcg_at_k(const std::vector<RelevanceLabel>& labels, std::size_t k, const GradeMap& grades) {
  check_k(k);
  if (labels.empty()) return 0.0;
  std::vector<int> g;
  g.reserve(labels.size());
  for (auto l : labels) g.push_back(grades.grade(l));
  std::vector<int> ideal = g;
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  const double idcg = dcg(ideal, k);
  if (idcg == 0.0) return 0.0;
  return dcg(g, k) / idcg;
}

double intersection_at_k(const std::vector<RetrievalHit>& hits, const std::set<std::string>& union_relevant,
                         std::size_t k) {
  check_k(k);
  std::size_t n = 0;
  for (std::size_t i = 0; i < std::min(k, hits.size()); ++i) n += union_relevant.count(hits[i].item_id);
  return static_cast<double>(n) / static_cast<double>(k);
}

double support_fraction(const std::vector<std::size_t>& list_lengths, const std::vector<bool>& gold_nonempty,
                        std::size_t k, std::size_t total_queries) {
  if (total_queries < 1) throw ArgumentError("total_queries must be >= 1");
  if (list_lengths.size() != gold_nonempty.size())
    throw ArgumentError("list_lengths and gold_nonempty differ in length");
  std::size_t s = 0;
  for (std::size_t q = 0; q < list_lengths.size(); ++q) s += (gold_nonempty[q] && list_lengths[q] >= k) ? 1 : 0;
  return static_cast<double>(s) / static_cast<double>(total_queries);
}

std::size_t common_cutoff(const std::vector<std::size_t>& list_lengths, const std::vector<bool>& gold_nonempty,
                          double threshold, std::size_t total_queries) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw ArgumentError("threshold must lie in (0, 1]");
  // support_fraction is non-increasing in k, so scan until it drops.
  const std::size_t longest = list_lengths.empty() ? 0 : *std::max_element(list_lengths.begin(), list_lengths.end());
  std::size_t best = 0;
  for (std::size_t k = 1; k <= longest; ++k) {
    if (support_fraction(list_lengths, gold_nonempty, k, total_queries) >= threshold) best = k;
    else break;
  }
  return best;
}

MetricReport evaluate_judged(const std::vector<JudgedHit>& judged, const MetricInputs& in) {
  check_k(in.k);
  MetricReport r;
  r.use_case_id = in.use_case_id;
  r.strategy = in.strategy;
  r.k = in.k;
  r.denominators.judged = judged.size();

  // Method precision over the unfiltered top k.
  std::size_t pos = 0, failed = 0, with_selection = 0;
  for (std::size_t i = 0; i < std::min(in.k, judged.size()); ++i) {
    const auto& j = judged[i];
    if (j.selection_failed) {
      ++failed;
    } else if (j.selection) {
      ++with_selection;
      pos += *j.selection != SelectionScore::negative ? 1 : 0;
    }
  }
  for (const auto& j : judged) r.denominators.selection_failures += j.selection_failed ? 1 : 0;
  r.denominators.method = in.k - failed;
  if (with_selection > 0 && r.denominators.method > 0)
    r.method_precision = static_cast<double>(pos) / static_cast<double>(r.denominators.method);

  std::vector<const JudgedHit*> survivors;
  for (const auto& j : judged) {
    if (j.selection_failed) continue;
    if (j.selection && *j.selection == SelectionScore::negative) continue;
    survivors.push_back(&j);
  }
  const std::size_t top = std::min(in.k, survivors.size());

  std::vector<RelevanceLabel> labels;
  std::size_t label_failed = 0;
  for (std::size_t i = 0; i < top; ++i) {
    if (survivors[i]->label_failed) ++label_failed;
    else if (survivors[i]->label) labels.push_back(*survivors[i]->label);
  }
  for (const auto& j : judged) r.denominators.label_failures += j.label_failed ? 1 : 0;
  r.denominators.system = in.k - label_failed;
  if (!labels.empty() && r.denominators.system > 0) {
    std::size_t p = 0;
    for (auto l : labels) p += l != RelevanceLabel::irrelevant ? 1 : 0;
    r.system_precision = static_cast<double>(p) / static_cast<double>(r.denominators.system);
    r.ndcg = ndcg_at_k(labels, in.k, in.grades);
  }

  std::vector<RetrievalHit> final_hits;
  for (std::size_t i = 0; i < top; ++i) final_hits.push_back(survivors[i]->hit);
  if (in.gold && !in.gold->empty()) {
    r.denominators.gold = in.gold->size();
    r.recall = recall_at_k(final_hits, *in.gold, in.k);
  }
  if (in.union_relevant) r.intersection = intersection_at_k(final_hits, *in.union_relevant, in.k);
  return r;
}

}  // namespace bb
