#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bb/corpus.h"

namespace bb {

// Mean of the model's per-item scores. ArgumentError on an empty set,
// KeyError on a missing score.
double aggregate_model_score(const ModelRunSet& run, const std::string& model, const std::set<std::string>& items);

using PromptVariant = std::pair<std::string, std::set<std::string>>;

// Variant with the highest aggregate score for `model`; ties go to the
// smaller prompt id.
std::string select_best_prompt(const std::vector<PromptVariant>& variants, const ModelRunSet& run,
                               const std::string& model);

double rank_divergence(double tau_gold_value, double tau_ret_value);

struct MonteCarloOptions {
  std::size_t trials = 50;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  // Draw one item order per trial and let every model read a prefix of it,
  // instead of independent draws per model.
  bool shared_subsample = false;
};

struct TauEstimate {
  std::optional<double> mean;  // empty when every trial was degenerate
  double stddev = 0.0;         // sample standard deviation over used trials
  std::size_t used = 0;
  std::size_t skipped = 0;
  std::vector<std::optional<double>> per_trial;
};

// Models are taken in the order of `retrieved` (sorted by model id). Each
// trial draws |R_m| gold items per model and correlates the retrieved-set
// ranking with the subsampled gold ranking.
TauEstimate tau_ret(const ModelRunSet& run, const std::map<std::string, std::set<std::string>>& retrieved,
                    const std::set<std::string>& gold, const MonteCarloOptions& opt);

// Full-gold ranking vs per-model subsamples of `subsample_size`.
TauEstimate tau_gold(const ModelRunSet& run, const std::vector<std::string>& models,
                     const std::set<std::string>& gold, std::size_t subsample_size, const MonteCarloOptions& opt);

// Two independent subsamples per trial, correlated with each other.
TauEstimate tau_sanity(const ModelRunSet& run, const std::vector<std::string>& models,
                       const std::set<std::string>& gold, std::size_t subsample_size, const MonteCarloOptions& opt);

struct RankAgreementReport {
  std::string use_case_id;
  double tau_ret = 0.0;
  double tau_gold = 0.0;
  double tau_sanity = 0.0;
  double delta = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::size_t retrieved_size = 0;  // floor of the mean per-model retrieved size
  std::size_t gold_size = 0;
  std::size_t skipped_ret = 0;
  std::size_t skipped_gold = 0;
  std::size_t skipped_sanity = 0;
  bool shared_subsample = false;
};

// Runs all three estimators. DegenerateError if any of them has no usable
// trial.
RankAgreementReport convergence_report(const std::string& use_case_id, const ModelRunSet& run,
                                       const std::map<std::string, std::set<std::string>>& retrieved,
                                       const std::set<std::string>& gold, const MonteCarloOptions& opt);

struct SkillFamily {
  std::string family_id;
  std::string base_capability;
  std::string axis;
  std::vector<std::pair<std::string, UseCase>> facets;  // (facet value, use-case)
};

inline constexpr std::size_t kMinFacets = 2;
inline constexpr std::size_t kMaxFacets = 6;

// ShapeError on facet count or duplicate values; FormatError on use-cases
// that are invalid or disagree with the family.
void validate_skill_family(const SkillFamily& family);

struct FacetCounts {
  std::size_t retrieved_count = 0;
  std::size_t relevant_count = 0;
};

struct FacetEntry {
  std::string facet;
  double relevant_fraction = 0.0;
  std::size_t retrieved_count = 0;
  std::size_t relevant_count = 0;
  std::optional<std::string> error;
};

struct FacetCoverageReport {
  std::string family_id;
  std::string axis;
  std::size_t k = 0;
  std::vector<FacetEntry> per_facet;  // family order
  double spread = 0.0;                // over facets without errors
};

// Runs retrieve, filter and judge for one use-case and reports its counts.
using FacetRunner = std::function<FacetCounts(const UseCase&, std::size_t k)>;

// A runner exception marks that facet with an error and leaves it out of the
// spread.
FacetCoverageReport facet_coverage(const SkillFamily& family, const FacetRunner& runner, std::size_t k);

// max - min of the fractions; 0 for an empty list.
double facet_spread(const std::vector<double>& fractions);

// "facet\tfraction" lines with a header row, for charts.
std::string facet_plot_table(const FacetCoverageReport& report);

}  // namespace bb
