#include "bb/validity.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bb/concurrency.h"
#include "bb/errors.h"
#include "bb/rng.h"
#include "bb/stats.h"

namespace bb {

double aggregate_model_score(const ModelRunSet& run, const std::string& model, const std::set<std::string>& items) {
  if (items.empty()) throw ArgumentError("aggregate_model_score over an empty item set");
  double sum = 0.0;
  for (const auto& id : items) sum += run.score(model, id);
  return sum / static_cast<double>(items.size());
}

std::string select_best_prompt(const std::vector<PromptVariant>& variants, const ModelRunSet& run,
                               const std::string& model) {
  if (variants.empty()) throw ArgumentError("select_best_prompt needs at least one variant");
  const PromptVariant* best = nullptr;
  double best_score = 0.0;
  for (const auto& v : variants) {
    const double s = aggregate_model_score(run, model, v.second);
    if (!best || s > best_score || (s == best_score && v.first < best->first)) {
      best = &v;
      best_score = s;
    }
  }
  return best->first;
}

double rank_divergence(double tau_gold_value, double tau_ret_value) { return tau_gold_value - tau_ret_value; }

namespace {

// scores[m][g]: model m on the g-th gold item (gold in sorted order).
struct GoldMatrix {
  std::vector<std::vector<double>> scores;
  std::vector<double> full_mean;
};

GoldMatrix gold_matrix(const ModelRunSet& run, const std::vector<std::string>& models,
                       const std::set<std::string>& gold) {
  GoldMatrix g;
  g.scores.reserve(models.size());
  for (const auto& m : models) {
    std::vector<double> row;
    row.reserve(gold.size());
    double sum = 0.0;
    for (const auto& id : gold) {
      row.push_back(run.score(m, id));
      sum += row.back();
    }
    g.full_mean.push_back(gold.empty() ? 0.0 : sum / static_cast<double>(gold.size()));
    g.scores.push_back(std::move(row));
  }
  return g;
}

// Per-model subsample means for one draw. `sizes[m]` items for model m.
std::vector<double> subsample_means(const GoldMatrix& g, const std::vector<std::size_t>& sizes, bool shared,
                                    Rng& rng) {
  const std::size_t pool = g.scores.empty() ? 0 : g.scores.front().size();
  std::vector<double> out(sizes.size());
  if (shared) {
    const std::size_t most = *std::max_element(sizes.begin(), sizes.end());
    const auto picks = sample_without_replacement(pool, most, rng);
    for (std::size_t m = 0; m < sizes.size(); ++m) {
      double sum = 0.0;
      for (std::size_t i = 0; i < sizes[m]; ++i) sum += g.scores[m][picks[i]];
      out[m] = sum / static_cast<double>(sizes[m]);
    }
    return out;
  }
  for (std::size_t m = 0; m < sizes.size(); ++m) {
    const auto picks = sample_without_replacement(pool, sizes[m], rng);
    double sum = 0.0;
    for (std::size_t p : picks) sum += g.scores[m][p];
    out[m] = sum / static_cast<double>(sizes[m]);
  }
  return out;
}

void check_common(std::size_t models, const MonteCarloOptions& opt) {
  if (opt.trials < 1) throw ArgumentError("trials must be >= 1");
  if (models < 2) throw ArgumentError("rank agreement needs at least 2 models");
}

template <typename Trial>
TauEstimate run_trials(const MonteCarloOptions& opt, Trial&& trial) {
  TauEstimate est;
  est.per_trial.resize(opt.trials);
  parallel_for(opt.trials, opt.threads, [&](std::size_t t) {
    Rng rng = Rng::stream(opt.seed, t);
    try {
      est.per_trial[t] = trial(rng);
    } catch (const DegenerateError&) {
      est.per_trial[t].reset();
    }
  });
  double sum = 0.0;
  for (const auto& v : est.per_trial) {
    if (v) {
      sum += *v;
      ++est.used;
    } else {
      ++est.skipped;
    }
  }
  if (est.used > 0) {
    const double mean = sum / static_cast<double>(est.used);
    est.mean = mean;
    if (est.used > 1) {
      double ss = 0.0;
      for (const auto& v : est.per_trial)
        if (v) ss += (*v - mean) * (*v - mean);
      est.stddev = std::sqrt(ss / static_cast<double>(est.used - 1));
    }
  }
  return est;
}

void check_subsample(std::size_t size, std::size_t gold) {
  if (size < 2 || size > gold)
    throw ArgumentError("subsample size " + std::to_string(size) + " must lie in [2, " + std::to_string(gold) + "]");
}

}  // namespace

TauEstimate tau_ret(const ModelRunSet& run, const std::map<std::string, std::set<std::string>>& retrieved,
                    const std::set<std::string>& gold, const MonteCarloOptions& opt) {
  check_common(retrieved.size(), opt);
  std::vector<std::string> models;
  std::vector<double> ret_scores;
  std::vector<std::size_t> sizes;
  for (const auto& [m, items] : retrieved) {
    models.push_back(m);
    ret_scores.push_back(aggregate_model_score(run, m, items));
    sizes.push_back(items.size());
  }
  const std::size_t most = *std::max_element(sizes.begin(), sizes.end());
  if (most > gold.size())
    throw CapacityError("retrieved set of " + std::to_string(most) + " items exceeds the gold pool of " +
                        std::to_string(gold.size()));
  const GoldMatrix g = gold_matrix(run, models, gold);
  return run_trials(opt, [&](Rng& rng) {
    return kendall_tau(ret_scores, subsample_means(g, sizes, opt.shared_subsample, rng));
  });
}

TauEstimate tau_gold(const ModelRunSet& run, const std::vector<std::string>& models,
                     const std::set<std::string>& gold, std::size_t subsample_size, const MonteCarloOptions& opt) {
  check_common(models.size(), opt);
  check_subsample(subsample_size, gold.size());
  const GoldMatrix g = gold_matrix(run, models, gold);
  const std::vector<std::size_t> sizes(models.size(), subsample_size);
  return run_trials(opt, [&](Rng& rng) {
    return kendall_tau(g.full_mean, subsample_means(g, sizes, opt.shared_subsample, rng));
  });
}

TauEstimate tau_sanity(const ModelRunSet& run, const std::vector<std::string>& models,
                       const std::set<std::string>& gold, std::size_t subsample_size, const MonteCarloOptions& opt) {
  check_common(models.size(), opt);
  check_subsample(subsample_size, gold.size());
  const GoldMatrix g = gold_matrix(run, models, gold);
  const std::vector<std::size_t> sizes(models.size(), subsample_size);
  return run_trials(opt, [&](Rng& rng) {
    const auto a = subsample_means(g, sizes, opt.shared_subsample, rng);
    const auto b = subsample_means(g, sizes, opt.shared_subsample, rng);
    return kendall_tau(a, b);
  });
}

RankAgreementReport convergence_report(const std::string& use_case_id, const ModelRunSet& run,
                                       const std::map<std::string, std::set<std::string>>& retrieved,
                                       const std::set<std::string>& gold, const MonteCarloOptions& opt) {
  check_common(retrieved.size(), opt);
  std::vector<std::string> models;
  std::size_t total = 0;
  for (const auto& [m, items] : retrieved) {
    if (items.empty()) throw ArgumentError("model '" + m + "' has an empty retrieved set");
    models.push_back(m);
    total += items.size();
  }
  const std::size_t n = total / models.size();

  const auto ret = tau_ret(run, retrieved, gold, opt);
  const auto gold_est = tau_gold(run, models, gold, n, opt);
  const auto sanity = tau_sanity(run, models, gold, n, opt);
  auto need = [](const TauEstimate& e, const char* name) {
    if (!e.mean) throw DegenerateError(std::string(name) + ": every trial was degenerate (all-tied ranking)");
    return *e.mean;
  };

  RankAgreementReport r;
  r.use_case_id = use_case_id;
  r.tau_ret = need(ret, "tau_ret");
  r.tau_gold = need(gold_est, "tau_gold");
  r.tau_sanity = need(sanity, "tau_sanity");
  r.delta = rank_divergence(r.tau_gold, r.tau_ret);
  r.trials = opt.trials;
  r.seed = opt.seed;
  r.retrieved_size = n;
  r.gold_size = gold.size();
  r.skipped_ret = ret.skipped;
  r.skipped_gold = gold_est.skipped;
  r.skipped_sanity = sanity.skipped;
  r.shared_subsample = opt.shared_subsample;
  return r;
}

void validate_skill_family(const SkillFamily& family) {
  if (family.family_id.empty()) throw FormatError("skill family needs a family_id");
  const std::size_t n = family.facets.size();
  if (n < kMinFacets || n > kMaxFacets)
    throw ShapeError("skill family '" + family.family_id + "' has " + std::to_string(n) + " facets; expected " +
                     std::to_string(kMinFacets) + " to " + std::to_string(kMaxFacets));
  std::set<std::string> seen;
  for (const auto& [value, uc] : family.facets) {
    if (value.empty()) throw FormatError("empty facet value in family '" + family.family_id + "'");
    if (!seen.insert(value).second)
      throw ShapeError("duplicate facet value '" + value + "' in family '" + family.family_id + "'");
    validate_use_case(uc);
    if (uc.facet && (uc.facet->family != family.family_id || uc.facet->axis != family.axis))
      throw FormatError("use-case '" + uc.use_case_id + "' names family/axis (" + uc.facet->family + ", " +
                        uc.facet->axis + ") but belongs to (" + family.family_id + ", " + family.axis + ")");
  }
}

double facet_spread(const std::vector<double>& fractions) {
  if (fractions.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(fractions.begin(), fractions.end());
  return *hi - *lo;
}

FacetCoverageReport facet_coverage(const SkillFamily& family, const FacetRunner& runner, std::size_t k) {
  if (k < 1) throw ArgumentError("k must be >= 1");
  validate_skill_family(family);
  FacetCoverageReport report;
  report.family_id = family.family_id;
  report.axis = family.axis;
  report.k = k;
  std::vector<double> fractions;
  for (const auto& [value, uc] : family.facets) {
    FacetEntry e;
    e.facet = value;
    try {
      const FacetCounts c = runner(uc, k);
      if (c.relevant_count > c.retrieved_count)
        throw StateError("relevant count exceeds retrieved count for facet '" + value + "'");
      e.retrieved_count = c.retrieved_count;
      e.relevant_count = c.relevant_count;
      e.relevant_fraction = c.retrieved_count == 0 ? 0.0
                                                    : static_cast<double>(c.relevant_count) /
                                                          static_cast<double>(c.retrieved_count);
      fractions.push_back(e.relevant_fraction);
    } catch (const std::exception& ex) {
      e.error = ex.what();
    }
    report.per_facet.push_back(std::move(e));
  }
  report.spread = facet_spread(fractions);
  return report;
}

std::string facet_plot_table(const FacetCoverageReport& report) {
  std::ostringstream out;
  out << "facet\tfraction\n";
  for (const auto& e : report.per_facet) {
    if (e.error) continue;
    out << e.facet << '\t' << e.relevant_fraction << '\n';
  }
  return out.str();
}

}  // namespace bb
