#include "bb/embedding.h"

#include "bb/errors.h"

namespace bb {

void normalize(EmbeddingVector& v) {
  if (v.values.empty()) throw DimensionError("empty embedding vector");
  for (float x : v.values)
    if (!std::isfinite(x)) throw ArgumentError("embedding has a non-finite entry");
  const double n = l2_norm(v.values);
  if (n == 0.0) throw ArgumentError("cannot normalize a zero vector");
  for (float& x : v.values) x = static_cast<float>(x / n);
}

bool is_normalized(const EmbeddingVector& v, double tol) {
  return std::abs(l2_norm(v.values) - 1.0) <= tol;
}

}  // namespace bb
