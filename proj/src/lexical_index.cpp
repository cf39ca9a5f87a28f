#include <algorithm>
#include <cmath>
#include <map>

#include "bb/binary_io.h"
#include "bb/errors.h"
#include "bb/retrieval.h"
#include "bb/text.h"

namespace bb {

namespace {

constexpr std::uint32_t kLexicalVersion = 1;

}  // namespace

bool hits_well_ordered(const std::vector<RetrievalHit>& hits) {
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (hits[i].rank != i + 1) return false;
    if (i > 0 && hits[i].score > hits[i - 1].score) return false;
  }
  return true;
}

LexicalIndex LexicalIndex::build(const Corpus& corpus, double k1, double b, Space space) {
  if (corpus.empty()) throw ArgumentError("cannot build a lexical index over an empty corpus");
  if (!(k1 > 0.0)) throw ArgumentError("BM25 k1 must be > 0");
  if (!(b >= 0.0 && b <= 1.0)) throw ArgumentError("BM25 b must lie in [0, 1]");
  LexicalIndex idx;
  idx.k1_ = k1;
  idx.b_ = b;
  idx.space_ = space;
  idx.ids_.reserve(corpus.size());
  idx.doc_lengths_.reserve(corpus.size());
  double total = 0.0;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const auto& item = corpus.items()[d];
    const auto tokens = tokenize(item_text(item, space));
    std::map<std::string, std::uint32_t> tf;
    for (const auto& t : tokens) ++tf[t];
    for (auto& [term, count] : tf) idx.postings_[term].push_back({static_cast<std::uint32_t>(d), count});
    idx.ids_.push_back(item.item_id);
    idx.doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
    total += static_cast<double>(tokens.size());
  }
  idx.avg_doc_length_ = total / static_cast<double>(corpus.size());
  return idx;
}

double LexicalIndex::idf(std::string_view term) const {
  auto it = postings_.find(std::string(term));
  const double df = it == postings_.end() ? 0.0 : static_cast<double>(it->second.size());
  const double n = static_cast<double>(ids_.size());
  return std::log((n - df + 0.5) / (df + 0.5) + 1.0);
}

std::vector<RetrievalHit> LexicalIndex::search(std::string_view query, std::size_t k) const {
  if (k < 1) throw ArgumentError("k must be >= 1");
  std::vector<std::string> terms;
  for (auto& t : tokenize(query))
    if (std::find(terms.begin(), terms.end(), t) == terms.end()) terms.push_back(std::move(t));

  std::vector<double> scores(ids_.size(), 0.0);
  std::vector<std::uint32_t> touched;
  for (const auto& term : terms) {
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    const double w = idf(term);
    for (const Posting& p : it->second) {
      const double tf = p.tf;
      const double norm = avg_doc_length_ > 0.0 ? doc_lengths_[p.doc] / avg_doc_length_ : 0.0;
      if (scores[p.doc] == 0.0) touched.push_back(p.doc);
      scores[p.doc] += w * tf * (k1_ + 1.0) / (tf + k1_ * (1.0 - b_ + b_ * norm));
    }
  }

  auto better = [&](std::uint32_t a, std::uint32_t c) {
    if (scores[a] != scores[c]) return scores[a] > scores[c];
    return ids_[a] < ids_[c];
  };
  touched.erase(std::remove_if(touched.begin(), touched.end(), [&](std::uint32_t d) { return !(scores[d] > 0.0); }),
                touched.end());
  const std::size_t take = std::min(k, touched.size());
  std::partial_sort(touched.begin(), touched.begin() + static_cast<std::ptrdiff_t>(take), touched.end(), better);

  std::vector<RetrievalHit> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back({ids_[touched[i]], scores[touched[i]], 0, i + 1});
  return out;
}

std::string LexicalIndex::serialize() const {
  ByteWriter w;
  w.bytes("BBLI");
  w.u32(kLexicalVersion);
  w.u32(space_ == Space::raw ? 0 : 1);
  w.f64(k1_);
  w.f64(b_);
  w.u64(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    w.str(ids_[i]);
    w.u32(doc_lengths_[i]);
  }
  std::vector<const std::string*> terms;
  terms.reserve(postings_.size());
  for (const auto& [t, p] : postings_) terms.push_back(&t);
  std::sort(terms.begin(), terms.end(), [](const std::string* a, const std::string* b) { return *a < *b; });
  w.u64(terms.size());
  for (const std::string* t : terms) {
    const auto& plist = postings_.at(*t);
    w.str(*t);
    w.u32(static_cast<std::uint32_t>(plist.size()));
    for (const Posting& p : plist) {
      w.u32(p.doc);
      w.u32(p.tf);
    }
  }
  return w.take();
}

LexicalIndex LexicalIndex::deserialize(std::string_view data) {
  ByteReader r(data, "lexical index");
  if (r.bytes(4) != "BBLI") throw IoError("lexical index: bad magic");
  const std::uint32_t version = r.u32();
  if (version != kLexicalVersion) throw IoError("lexical index: unsupported version " + std::to_string(version));
  LexicalIndex idx;
  idx.space_ = r.u32() == 0 ? Space::raw : Space::shorthand;
  idx.k1_ = r.f64();
  idx.b_ = r.f64();
  const std::uint64_t n = r.u64();
  double total = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    idx.ids_.push_back(r.str());
    idx.doc_lengths_.push_back(r.u32());
    total += idx.doc_lengths_.back();
  }
  idx.avg_doc_length_ = n ? total / static_cast<double>(n) : 0.0;
  const std::uint64_t terms = r.u64();
  for (std::uint64_t t = 0; t < terms; ++t) {
    std::string term = r.str();
    const std::uint32_t count = r.u32();
    auto& plist = idx.postings_[std::move(term)];
    plist.reserve(count);
    for (std::uint32_t j = 0; j < count; ++j) {
      const std::uint32_t doc = r.u32();
      const std::uint32_t tf = r.u32();
      if (doc >= n) throw IoError("lexical index: posting references doc " + std::to_string(doc));
      plist.push_back({doc, tf});
    }
  }
  if (r.remaining() != 0) throw IoError("lexical index: trailing bytes");
  return idx;
}

void LexicalIndex::save(const std::string& path) const { write_file(path, serialize()); }

LexicalIndex LexicalIndex::load(const std::string& path) { return deserialize(read_file(path)); }

LexicalIndex build_lexical_index(const Corpus& corpus, double k1, double b) { return LexicalIndex::build(corpus, k1, b); }

std::vector<RetrievalHit> search_lexical(const LexicalIndex& index, std::string_view query, std::size_t k) {
  return index.search(query, k);
}

}  // namespace bb
