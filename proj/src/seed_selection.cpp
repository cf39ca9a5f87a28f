#include <algorithm>
#include <limits>
#include <set>

#include "bb/errors.h"
#include "bb/rng.h"
#include "bb/seed_selection.h"

namespace bb {

namespace {

double sq_dist(std::span<const float> v, const std::vector<double>& c) {
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = static_cast<double>(v[i]) - c[i];
    acc += d * d;
  }
  return acc;
}

std::vector<double> as_point(const EmbeddingVector& v) { return {v.values.begin(), v.values.end()}; }

void check_shape(std::span<const EmbeddingVector> vectors) {
  if (vectors.empty()) return;
  const std::size_t dim = vectors.front().dimension();
  if (dim == 0) throw DimensionError("zero-dimension vectors");
  for (const auto& v : vectors)
    if (v.dimension() != dim) throw DimensionError("vectors differ in dimension");
}

}  // namespace

KMeansResult kmeans(std::span<const EmbeddingVector> vectors, std::size_t clusters, std::uint64_t seed,
                    std::size_t max_iterations) {
  check_shape(vectors);
  if (clusters == 0) throw ArgumentError("clusters must be >= 1");
  if (clusters > vectors.size())
    throw CapacityError(std::to_string(clusters) + " clusters requested from " + std::to_string(vectors.size()) +
                        " vectors");
  const std::size_t n = vectors.size();
  const std::size_t dim = vectors.front().dimension();
  Rng rng(seed);

  KMeansResult r;
  r.centroids.push_back(as_point(vectors[rng.below(n)]));
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  while (r.centroids.size() < clusters) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], sq_dist(vectors[i].values, r.centroids.back()));
      total += d2[i];
    }
    std::size_t pick = n - 1;
    if (total <= 0.0) {
      pick = rng.below(n);
    } else {
      double target = rng.unit() * total;
      for (std::size_t i = 0; i < n; ++i) {
        target -= d2[i];
        if (target < 0.0) {
          pick = i;
          break;
        }
      }
    }
    r.centroids.push_back(as_point(vectors[pick]));
  }

  r.assignment.assign(n, std::numeric_limits<std::size_t>::max());
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < clusters; ++c) {
        const double d = sq_dist(vectors[i].values, r.centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (r.assignment[i] != best) {
        r.assignment[i] = best;
        changed = true;
      }
    }
    r.iterations = iter + 1;
    if (!changed) break;

    std::vector<std::vector<double>> sums(clusters, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(clusters, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto& s = sums[r.assignment[i]];
      for (std::size_t k = 0; k < dim; ++k) s[k] += vectors[i].values[k];
      ++counts[r.assignment[i]];
    }
    for (std::size_t c = 0; c < clusters; ++c) {
      if (counts[c] == 0) {
        // Empty cluster: re-seed on the point worst served by its centroid.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = sq_dist(vectors[i].values, r.centroids[r.assignment[i]]);
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        r.centroids[c] = as_point(vectors[far]);
        continue;
      }
      for (std::size_t k = 0; k < dim; ++k) r.centroids[c][k] = sums[c][k] / static_cast<double>(counts[c]);
    }
  }
  return r;
}

std::vector<std::size_t> select_seed_examples(std::span<const EmbeddingVector> vectors, std::size_t clusters,
                                              std::size_t near_per_cluster, std::size_t far_per_cluster,
                                              std::uint64_t seed) {
  check_shape(vectors);
  if (clusters == 0) throw ArgumentError("clusters must be >= 1");
  const std::size_t requested = clusters * (near_per_cluster + far_per_cluster);
  if (requested > vectors.size() || near_per_cluster > vectors.size() || far_per_cluster > vectors.size())
    throw CapacityError("requested " + std::to_string(requested) + " examples from a population of " +
                        std::to_string(vectors.size()));
  if (vectors.empty()) return {};
  const KMeansResult km = kmeans(vectors, clusters, seed);

  std::vector<std::size_t> out;
  std::set<std::size_t> taken;
  auto take = [&](std::size_t idx) {
    if (taken.insert(idx).second) out.push_back(idx);
  };
  for (std::size_t c = 0; c < clusters; ++c) {
    std::vector<std::pair<double, std::size_t>> members;
    for (std::size_t i = 0; i < vectors.size(); ++i)
      if (km.assignment[i] == c) members.emplace_back(sq_dist(vectors[i].values, km.centroids[c]), i);
    std::sort(members.begin(), members.end());
    const std::size_t near = std::min(near_per_cluster, members.size());
    for (std::size_t j = 0; j < near; ++j) take(members[j].second);
    std::stable_sort(members.begin(), members.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    const std::size_t far = std::min(far_per_cluster, members.size());
    for (std::size_t j = 0; j < far; ++j) take(members[j].second);
  }
  return out;
}

}  // namespace bb
