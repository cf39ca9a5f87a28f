#pragma once

// Brute-force reference implementations. Deliberately naive: they share no
// code with the library and favour obviousness over speed.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bb/corpus.h"
#include "bb/validity.h"

namespace oracle {

inline std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    const unsigned char u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      cur.push_back(static_cast<char>(std::tolower(u)));
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// Scores every document against every distinct query term.
inline std::vector<double> bm25(const std::vector<std::string>& docs, const std::string& query, double k1 = 1.2,
                                double b = 0.75) {
  std::vector<std::vector<std::string>> toks;
  double total = 0;
  for (const auto& d : docs) {
    toks.push_back(words(d));
    total += static_cast<double>(toks.back().size());
  }
  const double n = static_cast<double>(docs.size());
  const double avgdl = total / n;
  auto q = words(query);
  std::sort(q.begin(), q.end());
  q.erase(std::unique(q.begin(), q.end()), q.end());
  std::vector<double> scores(docs.size(), 0.0);
  for (const auto& term : q) {
    double df = 0;
    for (const auto& t : toks) df += std::count(t.begin(), t.end(), term) > 0 ? 1 : 0;
    const double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
    for (std::size_t d = 0; d < docs.size(); ++d) {
      const double tf = static_cast<double>(std::count(toks[d].begin(), toks[d].end(), term));
      if (tf == 0) continue;
      const double len = static_cast<double>(toks[d].size());
      scores[d] += idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * len / avgdl));
    }
  }
  return scores;
}

// Kendall tau-b by enumerating every pair.
inline double kendall(const std::vector<double>& x, const std::vector<double>& y) {
  long long c = 0, d = 0, tx = 0, ty = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j], dy = y[i] - y[j];
      if (dx == 0 && dy == 0) continue;
      if (dx == 0) {
        ++tx;
      } else if (dy == 0) {
        ++ty;
      } else if ((dx > 0) == (dy > 0)) {
        ++c;
      } else {
        ++d;
      }
    }
  }
  return static_cast<double>(c - d) / std::sqrt(static_cast<double>((c + d + tx) * (c + d + ty)));
}

inline double dcg(const std::vector<int>& grades, std::size_t k) {
  double s = 0;
  for (std::size_t i = 0; i < std::min(k, grades.size()); ++i)
    s += (std::pow(2.0, grades[i]) - 1.0) / std::log2(static_cast<double>(i) + 2.0);
  return s;
}

// DCG over the best of all orderings of the same grades.
inline double ndcg(std::vector<int> grades, std::size_t k) {
  const double actual = dcg(grades, k);
  std::sort(grades.begin(), grades.end());
  double best = 0;
  do {
    best = std::max(best, dcg(grades, k));
  } while (std::next_permutation(grades.begin(), grades.end()));
  return best == 0 ? 0.0 : actual / best;
}

inline double support_fraction(const std::vector<std::size_t>& lengths, const std::vector<bool>& nonempty,
                               std::size_t k, std::size_t total) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < lengths.size(); ++i) ok += (nonempty[i] && lengths[i] >= k) ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(total);
}

// Student-t density integrated numerically (composite Simpson after the
// substitution t = tan(u)), giving the two-sided tail P(|T| >= |t|).
inline double t_two_sided(double t, double dof) {
  const double pi = std::acos(-1.0);
  const double c = std::exp(std::lgamma((dof + 1) / 2) - std::lgamma(dof / 2)) / std::sqrt(dof * pi);
  auto f = [&](double u) {
    const double x = std::tan(u);
    return c * std::pow(1 + x * x / dof, -(dof + 1) / 2) * (1 + x * x);
  };
  const double a = std::atan(std::fabs(t)), hi = pi / 2;
  const int n = 200000;
  const double h = (hi - a) / n;
  double s = f(a) + f(hi - 1e-15);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
  return 2 * s * h / 3;
}

// Two planted models over a gold benchmark and an optional separate
// "retrieved" benchmark whose success rates may be swapped.
struct Planted {
  bb::Corpus corpus;
  bb::ModelRunSet run;
  std::set<std::string> gold;
  std::set<std::string> other;
};

template <typename Rng>
Planted planted(std::size_t gold_size, std::size_t other_size, double strong, double weak, bool invert_other,
                Rng& rng) {
  Planted p;
  std::vector<bb::BenchmarkItem> items;
  auto add = [&](const std::string& bench, std::size_t n, std::set<std::string>& into) {
    for (std::size_t i = 0; i < n; ++i) {
      bb::BenchmarkItem it;
      it.item_id = bench + "-" + std::to_string(i);
      it.benchmark_id = bench;
      it.text = "item " + std::to_string(i) + " of " + bench;
      it.answer = "a";
      items.push_back(it);
      into.insert(it.item_id);
    }
  };
  add("gold", gold_size, p.gold);
  add("other", other_size, p.other);
  p.corpus = bb::Corpus::from_items(items);
  std::vector<bb::RunRecord> recs;
  for (const auto& it : items) {
    const bool flip = invert_other && it.benchmark_id == "other";
    const double rs = flip ? weak : strong, rw = flip ? strong : weak;
    recs.push_back({"strong", it.benchmark_id, it.item_id, rng.unit() < rs ? 1.0 : 0.0});
    recs.push_back({"weak", it.benchmark_id, it.item_id, rng.unit() < rw ? 1.0 : 0.0});
  }
  p.run = bb::ModelRunSet::from_records(recs, p.corpus);
  return p;
}

}  // namespace oracle
