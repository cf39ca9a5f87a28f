#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace bb {

struct EmbeddingVector {
  std::vector<float> values;

  std::size_t dimension() const { return values.size(); }
  bool operator==(const EmbeddingVector&) const = default;
};

// Inner product accumulated in double, left to right.
inline double dot(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += static_cast<double>(a[i]) * b[i];
  return acc;
}

inline double l2_norm(std::span<const float> v) { return std::sqrt(dot(v, v)); }

// Scales to unit length; zero and non-finite vectors throw ArgumentError.
void normalize(EmbeddingVector& v);
bool is_normalized(const EmbeddingVector& v, double tol = 1e-6);

}  // namespace bb
