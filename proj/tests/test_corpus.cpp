#include <doctest.h>

#include <filesystem>

#include "bb/corpus.h"
#include "bb/embedding.h"
#include "bb/errors.h"
#include "bb/rng.h"
#include "bb/seed_selection.h"

using namespace bb;

namespace {

const char* kTwo =
    R"({"id":"a1","benchmark":"A","text":"first item","answer":"x","metric":"accuracy","tags":["t"]}
{"id":"b1","benchmark":"B","text":"second item","answer":"y","metric":"f1","tags":[]}
)";

}  // namespace

TEST_CASE("ingest derives benchmark summaries") {
  const auto c = parse_corpus(kTwo);
  REQUIRE(c.size() == 2);
  CHECK(c.benchmarks().size() == 2);
  CHECK(c.benchmark("A")->item_count == 1);
  CHECK(c.benchmark("B")->metric_kind == MetricKind::f1);
  CHECK(c.at("b1").text == "second item");
  CHECK_THROWS_AS(c.at("zz"), KeyError);
  CHECK(c.items_of("A") == std::vector<std::size_t>{0});
}

TEST_CASE("ingest rejects duplicates, bad metrics and bad json") {
  const std::string dup = std::string(kTwo) +
                          R"({"id":"a1","benchmark":"A","text":"again","answer":"x","metric":"accuracy","tags":[]})";
  CHECK_THROWS_AS(parse_corpus(dup), IngestError);
  const auto lenient = parse_corpus(dup, false);
  CHECK(lenient.size() == 2);
  CHECK(lenient.duplicates_dropped() == 1);
  CHECK(lenient.at("a1").text == "first item");

  try {
    parse_corpus(R"({"id":"a1","benchmark":"A","text":"t","answer":"x","metric":"accuracy","tags":[]}
{"id":"a2","benchmark":"A","text":"t","answer":"x","metric":"f1","tags":[]})");
    FAIL("expected IngestError");
  } catch (const IngestError& e) {
    CHECK(e.failure == IngestFailure::metric);
  }
  try {
    parse_corpus("{not json}\n");
    FAIL("expected IngestError");
  } catch (const IngestError& e) {
    CHECK(e.failure == IngestFailure::parse);
    CHECK(e.line == 1);
  }
  CHECK_THROWS_AS(ingest_corpus("/nonexistent/corpus.jsonl"), IoError);
}

TEST_CASE("ingest, serialize, ingest is the identity") {
  const auto c = ingest_corpus(BB_TEST_DATA "/fixture_corpus.jsonl");
  CHECK(c.size() == 200);
  std::size_t total = 0;
  for (const auto& b : c.benchmarks()) total += b.item_count;
  CHECK(total == c.size());
  const auto again = parse_corpus(serialize_corpus(c));
  CHECK(again == c);
  CHECK(again.benchmarks() == c.benchmarks());
}

TEST_CASE("shorthand tables attach and validate") {
  const auto c = parse_corpus(kTwo);
  const auto with = attach_shorthands(c, {{"a1", "skill & key"}});
  CHECK(with.at("a1").shorthand == "skill & key");
  CHECK_FALSE(with.at("b1").shorthand.has_value());
  CHECK(item_text(with.at("a1"), Space::shorthand) == "skill & key");
  CHECK_THROWS_AS(item_text(with.at("b1"), Space::shorthand), StateError);
  CHECK_THROWS_AS(attach_shorthands(c, {{"zz", "a"}}), KeyError);
  CHECK_THROWS_AS(attach_shorthands(c, {{"a1", "a & b & c & d & e"}}), FormatError);

  const auto path = (std::filesystem::temp_directory_path() / "bb_test_sh.jsonl").string();
  write_shorthand_table({{"a1", "x & y"}}, path);
  CHECK(load_shorthand_table(path) == ShorthandTable{{"a1", "x & y"}});
  std::filesystem::remove(path);
}

TEST_CASE("use-cases") {
  const auto ucs = load_use_cases(BB_TEST_DATA "/fixture_use_cases.jsonl");
  REQUIRE(ucs.size() == 5);
  CHECK(ucs[0].gold_benchmark_id == "chess_tactics");
  CHECK(ucs[2].facet->value == "python");
  UseCase bad;
  bad.use_case_id = "x";
  CHECK_THROWS_AS(validate_use_case(bad), FormatError);
}

TEST_CASE("model runs enforce range, key and coverage") {
  const auto c = parse_corpus(R"({"id":"a1","benchmark":"A","text":"t","answer":"x","metric":"accuracy","tags":[]}
{"id":"a2","benchmark":"A","text":"u","answer":"x","metric":"accuracy","tags":[]})");
  auto run = parse_model_runs(R"({"model":"m","benchmark":"A","item_id":"a1","score":1}
{"model":"m","benchmark":"A","item_id":"a2","score":0.5})",
                              c);
  CHECK(run.score("m", "a2") == 0.5);
  CHECK(run.has_model("m"));
  CHECK_THROWS_AS(run.score("m", "zz"), KeyError);
  CHECK_THROWS_AS(parse_model_runs(R"({"model":"m","benchmark":"A","item_id":"a1","score":1.5})", c), RangeError);
  CHECK_THROWS_AS(parse_model_runs(R"({"model":"m","benchmark":"A","item_id":"zz","score":1})", c), KeyError);
  CHECK_THROWS_AS(parse_model_runs(R"({"model":"m","benchmark":"A","item_id":"a1","score":1}
{"model":"m","benchmark":"A","item_id":"a2","score":1}
{"model":"n","benchmark":"A","item_id":"a1","score":1})",
                                   c),
                  CoverageError);
}

namespace {

EmbeddingVector vec(std::initializer_list<float> v) { return EmbeddingVector{std::vector<float>(v)}; }

double sq(const EmbeddingVector& a, const std::vector<double>& c) {
  double s = 0;
  for (std::size_t i = 0; i < c.size(); ++i) s += (a.values[i] - c[i]) * (a.values[i] - c[i]);
  return s;
}

// Best split of the points into two non-empty groups by total within-group
// squared distance, by trying every bipartition.
std::vector<int> best_bipartition(const std::vector<EmbeddingVector>& pts) {
  const std::size_t n = pts.size(), d = pts[0].dimension();
  double best = 1e300;
  std::vector<int> out;
  for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
    double cost = 0;
    for (int g = 0; g < 2; ++g) {
      std::vector<double> c(d, 0.0);
      int cnt = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (((mask >> i) & 1u) == static_cast<unsigned>(g)) {
          for (std::size_t j = 0; j < d; ++j) c[j] += pts[i].values[j];
          ++cnt;
        }
      for (auto& x : c) x /= cnt;
      for (std::size_t i = 0; i < n; ++i)
        if (((mask >> i) & 1u) == static_cast<unsigned>(g)) cost += sq(pts[i], c);
    }
    if (cost < best) {
      best = cost;
      out.assign(n, 0);
      for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<int>((mask >> i) & 1u);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("seed selection covers both clouds of a well separated pair") {
  Rng r(3);
  std::vector<EmbeddingVector> pts;
  for (int i = 0; i < 12; ++i) {
    const float base = i < 6 ? 0.0f : 10.0f;
    pts.push_back(vec({base + static_cast<float>(r.unit()), base + static_cast<float>(r.unit())}));
  }
  const auto split = best_bipartition(pts);
  const auto km = kmeans(pts, 2, 11);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j)
      CHECK((split[i] == split[j]) == (km.assignment[i] == km.assignment[j]));

  const auto sel = select_seed_examples(pts, 2, 2, 1, 11);
  CHECK(sel.size() <= 6);
  bool low = false, high = false;
  for (auto i : sel) (split[i] == split[0] ? low : high) = true;
  CHECK(low);
  CHECK(high);
  CHECK(select_seed_examples(pts, 2, 2, 1, 11) == sel);
}

TEST_CASE("seed selection degenerate and error cases") {
  std::vector<EmbeddingVector> same(5, vec({1.0f, 1.0f}));
  CHECK(select_seed_examples(same, 1, 2, 0, 1).size() == 2);
  std::vector<EmbeddingVector> three(3, vec({1.0f}));
  CHECK_THROWS_AS(select_seed_examples(three, 1, 5, 0, 1), CapacityError);
  std::vector<EmbeddingVector> empty_dim(3, EmbeddingVector{});
  CHECK_THROWS_AS(select_seed_examples(empty_dim, 1, 1, 0, 1), DimensionError);
}
