#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bb/judge.h"
#include "bb/retrieval.h"

namespace bb {

// Exponential-gain grades for NDCG.
struct GradeMap {
  int relevant = 2;
  int partially_relevant = 1;
  int irrelevant = 0;
  int grade(RelevanceLabel l) const;
};

// Share of the first k selections in {1, 0}; the denominator is always k.
double method_precision_at_k(const std::vector<SelectionScore>& selections, std::size_t k);

// Share of the first k labels that are relevant or partially relevant; the
// denominator is always k.
double system_precision_at_k(const std::vector<RelevanceLabel>& labels, std::size_t k);

// |top-k ∩ gold| / |gold|. ArgumentError on an empty gold set.
double recall_at_k(const std::vector<RetrievalHit>& hits, const std::set<std::string>& gold, std::size_t k);

// DCG@k / IDCG@k with gain 2^grade - 1 and discount log2(i + 1). IDCG is
// taken over the same labels sorted by grade; 0 when IDCG is 0.
double ndcg_at_k(const std::vector<RelevanceLabel>& labels, std::size_t k, const GradeMap& grades = {});

// |top-k ∩ union_relevant| / k.
double intersection_at_k(const std::vector<RetrievalHit>& hits, const std::set<std::string>& union_relevant,
                         std::size_t k);

// Fraction of the total_queries whose gold set is non-empty and whose result
// list holds at least k entries.
double support_fraction(const std::vector<std::size_t>& list_lengths, const std::vector<bool>& gold_nonempty,
                        std::size_t k, std::size_t total_queries);

// Largest k whose support fraction reaches `threshold`; 0 if none.
std::size_t common_cutoff(const std::vector<std::size_t>& list_lengths, const std::vector<bool>& gold_nonempty,
                          double threshold, std::size_t total_queries);

struct MetricDenominators {
  std::size_t method = 0;  // k minus selection failures in the top k
  std::size_t system = 0;  // k minus label failures in the top k of the survivors
  std::size_t gold = 0;
  std::size_t judged = 0;  // entries in the input list
  std::size_t selection_failures = 0;
  std::size_t label_failures = 0;
};

struct MetricReport {
  std::string use_case_id;
  std::string strategy;
  std::size_t k = 0;
  std::optional<double> method_precision;
  std::optional<double> system_precision;
  std::optional<double> recall;
  std::optional<double> ndcg;
  std::optional<double> intersection;
  MetricDenominators denominators;
};

struct MetricInputs {
  std::string use_case_id;
  std::string strategy;
  std::size_t k = 20;
  std::optional<std::set<std::string>> gold;
  std::optional<std::set<std::string>> union_relevant;
  GradeMap grades;
};

// Scores a ranked, judged hit list (unfiltered, selection -1 entries
// included). Method precision reads selections of the top k. System
// precision, NDCG, recall and intersection read the top k of the entries that
// survive the filter. Judge failures leave the denominators.
MetricReport evaluate_judged(const std::vector<JudgedHit>& judged, const MetricInputs& in);

}  // namespace bb
