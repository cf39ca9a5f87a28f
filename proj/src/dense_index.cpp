#include <algorithm>
#include <map>

#include "bb/binary_io.h"
#include "bb/errors.h"
#include "bb/retrieval.h"
#include "bb/rng.h"

namespace bb {

namespace {

constexpr std::uint32_t kDenseVersion = 1;

struct Candidate {
  double score;
  std::uint32_t doc;
};

}  // namespace

DenseIndex DenseIndex::from_vectors(std::vector<std::string> ids, const std::vector<EmbeddingVector>& vectors,
                                    Space space) {
  if (ids.size() != vectors.size()) throw ArgumentError("ids and vectors differ in length");
  DenseIndex idx;
  idx.space_ = space;
  idx.ids_ = std::move(ids);
  if (vectors.empty()) return idx;
  idx.dimension_ = vectors.front().dimension();
  if (idx.dimension_ == 0) throw DimensionError("zero-dimension embeddings");
  idx.data_.reserve(vectors.size() * idx.dimension_);
  for (const auto& v : vectors) {
    if (v.dimension() != idx.dimension_) throw DimensionError("embedding widths disagree within the index");
    EmbeddingVector copy = v;
    normalize(copy);
    idx.data_.insert(idx.data_.end(), copy.values.begin(), copy.values.end());
  }
  return idx;
}

DenseIndex DenseIndex::build(const Corpus& corpus, EmbeddingGateway& embed, Space space) {
  std::vector<std::string> ids;
  std::vector<std::string> texts;
  ids.reserve(corpus.size());
  texts.reserve(corpus.size());
  for (const auto& item : corpus.items()) {
    ids.push_back(item.item_id);
    texts.push_back(item_text(item, space));
  }
  if (texts.empty()) {
    DenseIndex idx;
    idx.space_ = space;
    idx.dimension_ = embed.dimension();
    return idx;
  }
  return from_vectors(std::move(ids), embed.embed(texts, "", {}), space);
}

std::vector<RetrievalHit> DenseIndex::search(std::span<const float> query, std::size_t k) const {
  if (k < 1) throw ArgumentError("k must be >= 1");
  if (query.size() != dimension_)
    throw DimensionError("query dimension " + std::to_string(query.size()) + " != index dimension " +
                         std::to_string(dimension_));
  const std::size_t take = std::min(k, ids_.size());
  // Heap top holds the worst of the current best-k.
  auto better = [&](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return ids_[a.doc] < ids_[b.doc];
  };
  std::vector<Candidate> heap;
  heap.reserve(take + 1);
  for (std::size_t d = 0; d < ids_.size(); ++d) {
    const Candidate c{dot(query, vector(d)), static_cast<std::uint32_t>(d)};
    if (heap.size() < take) {
      heap.push_back(c);
      std::push_heap(heap.begin(), heap.end(), better);
    } else if (take > 0 && better(c, heap.front())) {
      std::pop_heap(heap.begin(), heap.end(), better);
      heap.back() = c;
      std::push_heap(heap.begin(), heap.end(), better);
    }
  }
  std::sort_heap(heap.begin(), heap.end(), better);
  std::vector<RetrievalHit> out;
  out.reserve(heap.size());
  for (std::size_t i = 0; i < heap.size(); ++i) out.push_back({ids_[heap[i].doc], heap[i].score, 0, i + 1});
  return out;
}

std::string DenseIndex::serialize() const {
  ByteWriter w;
  w.bytes("BBDI");
  w.u32(kDenseVersion);
  w.u32(static_cast<std::uint32_t>(dimension_));
  w.u64(ids_.size());
  for (float x : data_) w.f32(x);
  for (const auto& id : ids_) w.str(id);
  return w.take();
}

DenseIndex DenseIndex::deserialize(std::string_view data, Space space) {
  ByteReader r(data, "dense index");
  if (r.bytes(4) != "BBDI") throw IoError("dense index: bad magic");
  const std::uint32_t version = r.u32();
  if (version != kDenseVersion) throw IoError("dense index: unsupported version " + std::to_string(version));
  DenseIndex idx;
  idx.space_ = space;
  idx.dimension_ = r.u32();
  const std::uint64_t count = r.u64();
  if (count > 0 && idx.dimension_ == 0) throw IoError("dense index: zero dimension");
  if (idx.dimension_ != 0 && count > r.remaining() / (4ULL * idx.dimension_)) throw IoError("dense index: truncated file");
  idx.data_.resize(count * idx.dimension_);
  for (auto& x : idx.data_) x = r.f32();
  idx.ids_.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) idx.ids_.push_back(r.str());
  if (r.remaining() != 0) throw IoError("dense index: trailing bytes");
  return idx;
}

void DenseIndex::save(const std::string& path) const { write_file(path, serialize()); }

DenseIndex DenseIndex::load(const std::string& path, Space space) { return deserialize(read_file(path), space); }

DenseIndex build_dense_index(const Corpus& corpus, EmbeddingGateway& embed, Space space) {
  return DenseIndex::build(corpus, embed, space);
}

std::vector<RetrievalHit> search_dense(const DenseIndex& index, const EmbeddingVector& query, std::size_t k) {
  return index.search(query.values, k);
}

std::vector<RetrievalHit> merge_anchor_hits(const std::vector<std::vector<RetrievalHit>>& per_anchor, std::size_t k) {
  if (k < 1) throw ArgumentError("k must be >= 1");
  std::map<std::string, RetrievalHit> best;
  for (const auto& list : per_anchor) {
    for (const auto& h : list) {
      auto [it, fresh] = best.try_emplace(h.item_id, h);
      if (fresh) continue;
      RetrievalHit& cur = it->second;
      if (h.score > cur.score || (h.score == cur.score && h.anchor_index < cur.anchor_index)) cur = h;
    }
  }
  std::vector<RetrievalHit> out;
  out.reserve(best.size());
  for (auto& [id, h] : best) out.push_back(std::move(h));
  std::sort(out.begin(), out.end(), [](const RetrievalHit& a, const RetrievalHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.item_id < b.item_id;
  });
  if (out.size() > k) out.resize(k);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = i + 1;
  return out;
}

std::vector<RetrievalHit> random_baseline(const Corpus& corpus, std::size_t k, std::uint64_t seed) {
  if (k > corpus.size())
    throw CapacityError("random baseline asked for " + std::to_string(k) + " of " + std::to_string(corpus.size()) +
                        " items");
  Rng rng(seed);
  const auto picks = sample_without_replacement(corpus.size(), k, rng);
  std::vector<RetrievalHit> out;
  out.reserve(k);
  for (std::size_t i = 0; i < picks.size(); ++i) out.push_back({corpus.items()[picks[i]].item_id, 0.0, 0, i + 1});
  return out;
}

}  // namespace bb
