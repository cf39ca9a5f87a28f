#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bb/corpus.h"
#include "bb/embedding.h"
#include "bb/gateway.h"

namespace bb {

struct RetrievalHit {
  std::string item_id;
  double score = 0.0;
  std::size_t anchor_index = 0;
  std::size_t rank = 0;  // 1-based

  bool operator==(const RetrievalHit&) const = default;
};

// Ranks consecutive from 1 and scores non-increasing.
bool hits_well_ordered(const std::vector<RetrievalHit>& hits);

inline constexpr double kDefaultK1 = 1.2;
inline constexpr double kDefaultB = 0.75;

struct Posting {
  std::uint32_t doc;
  std::uint32_t tf;
  bool operator==(const Posting&) const = default;
};

// Okapi BM25 over lowercased word tokens.
class LexicalIndex {
 public:
  LexicalIndex() = default;

  // ArgumentError on an empty corpus or k1 <= 0 or b outside [0, 1].
  static LexicalIndex build(const Corpus& corpus, double k1 = kDefaultK1, double b = kDefaultB,
                            Space space = Space::raw);

  // Top-k by BM25 with IDF(t) = ln((N - df + 0.5) / (df + 0.5) + 1). Zero
  // scores are dropped; ties go to the smaller item_id.
  std::vector<RetrievalHit> search(std::string_view query, std::size_t k) const;

  const std::unordered_map<std::string, std::vector<Posting>>& postings() const { return postings_; }
  const std::vector<std::uint32_t>& doc_lengths() const { return doc_lengths_; }
  const std::vector<std::string>& ids() const { return ids_; }
  double avg_doc_length() const { return avg_doc_length_; }
  double k1() const { return k1_; }
  double b() const { return b_; }
  Space space() const { return space_; }
  std::size_t size() const { return ids_.size(); }
  double idf(std::string_view term) const;

  // "BBLI" binary format.
  std::string serialize() const;
  static LexicalIndex deserialize(std::string_view data);
  void save(const std::string& path) const;
  static LexicalIndex load(const std::string& path);

 private:
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  std::vector<std::uint32_t> doc_lengths_;
  std::vector<std::string> ids_;
  double avg_doc_length_ = 0.0;
  double k1_ = kDefaultK1;
  double b_ = kDefaultB;
  Space space_ = Space::raw;
};

LexicalIndex build_lexical_index(const Corpus& corpus, double k1 = kDefaultK1, double b = kDefaultB);
std::vector<RetrievalHit> search_lexical(const LexicalIndex& index, std::string_view query, std::size_t k);

// Exact inner-product search over L2-normalised vectors.
class DenseIndex {
 public:
  DenseIndex() = default;

  // Vectors are normalised on the way in. DimensionError on mixed widths.
  static DenseIndex from_vectors(std::vector<std::string> ids, const std::vector<EmbeddingVector>& vectors,
                                 Space space = Space::raw);

  // StateError when space is shorthand and an item lacks one.
  static DenseIndex build(const Corpus& corpus, EmbeddingGateway& embed, Space space = Space::raw);

  // Full scan with a bounded best-k heap; ties go to the smaller item_id.
  std::vector<RetrievalHit> search(std::span<const float> query, std::size_t k) const;

  std::size_t size() const { return ids_.size(); }
  std::size_t dimension() const { return dimension_; }
  Space space() const { return space_; }
  const std::vector<std::string>& ids() const { return ids_; }
  std::span<const float> vector(std::size_t i) const {
    return {data_.data() + i * dimension_, dimension_};
  }

  // "BBDI" binary format. The file does not record the space.
  std::string serialize() const;
  static DenseIndex deserialize(std::string_view data, Space space = Space::raw);
  void save(const std::string& path) const;
  static DenseIndex load(const std::string& path, Space space = Space::raw);

 private:
  std::vector<std::string> ids_;
  std::vector<float> data_;
  std::size_t dimension_ = 0;
  Space space_ = Space::raw;
};

DenseIndex build_dense_index(const Corpus& corpus, EmbeddingGateway& embed, Space space);
std::vector<RetrievalHit> search_dense(const DenseIndex& index, const EmbeddingVector& query, std::size_t k);

// Union of per-anchor hits keeping each item's best score, sorted by score
// then item_id, truncated to k and re-ranked.
std::vector<RetrievalHit> merge_anchor_hits(const std::vector<std::vector<RetrievalHit>>& per_anchor, std::size_t k);

// Seeded uniform sample without replacement; scores 0, ranked in draw order.
std::vector<RetrievalHit> random_baseline(const Corpus& corpus, std::size_t k, std::uint64_t seed);

}  // namespace bb
