#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bb/embedding.h"

namespace bb {

struct KMeansResult {
  std::vector<std::vector<double>> centroids;
  std::vector<std::size_t> assignment;  // cluster per input vector
  std::size_t iterations = 0;
};

// Seeded Lloyd iterations with k-means++ initialisation, Euclidean distance.
// Stops after max_iterations or when no assignment changes.
KMeansResult kmeans(std::span<const EmbeddingVector> vectors, std::size_t clusters, std::uint64_t seed,
                    std::size_t max_iterations = 50);

// Picks prototypical (nearest-to-centroid) and outlying (farthest) members of
// every cluster. Output is ordered by cluster, nearest members first, and is
// de-duplicated.
std::vector<std::size_t> select_seed_examples(std::span<const EmbeddingVector> vectors, std::size_t clusters,
                                              std::size_t near_per_cluster, std::size_t far_per_cluster,
                                              std::uint64_t seed);

}  // namespace bb
