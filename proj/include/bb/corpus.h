#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace bb {

enum class MetricKind { accuracy, exact_match, f1, win_rate, precomputed };

const char* metric_kind_name(MetricKind kind);
std::optional<MetricKind> parse_metric_kind(std::string_view name);

struct BenchmarkItem {
  std::string item_id;
  std::string benchmark_id;
  std::string text;
  std::string answer;
  MetricKind metric_kind = MetricKind::accuracy;
  std::optional<std::string> shorthand;
  std::vector<std::string> tags;

  bool operator==(const BenchmarkItem&) const = default;
};

struct Benchmark {
  std::string benchmark_id;
  std::string name;
  MetricKind metric_kind = MetricKind::accuracy;
  std::size_t item_count = 0;

  bool operator==(const Benchmark&) const = default;
};

// Immutable after construction; share freely across threads.
class Corpus {
 public:
  Corpus() = default;

  // Validates invariants and derives benchmark summaries. Throws IngestError
  // on duplicate ids (when expect_unique), empty text, or metric disagreement
  // within one benchmark. With expect_unique=false later duplicates are
  // dropped.
  static Corpus from_items(std::vector<BenchmarkItem> items, bool expect_unique = true);

  const std::vector<BenchmarkItem>& items() const { return items_; }
  const std::vector<Benchmark>& benchmarks() const { return benchmarks_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

  std::optional<std::size_t> index_of(std::string_view item_id) const;
  const BenchmarkItem& at(std::string_view item_id) const;  // KeyError
  const Benchmark* benchmark(std::string_view benchmark_id) const;
  // Item indices of one benchmark, in ingestion order.
  std::vector<std::size_t> items_of(std::string_view benchmark_id) const;

  std::size_t duplicates_dropped() const { return duplicates_dropped_; }

  bool operator==(const Corpus& o) const { return items_ == o.items_; }

 private:
  std::vector<BenchmarkItem> items_;
  std::vector<Benchmark> benchmarks_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::size_t duplicates_dropped_ = 0;
};

Corpus ingest_corpus(const std::string& path, bool expect_unique = true);
Corpus parse_corpus(std::string_view jsonl, bool expect_unique = true);
std::string serialize_corpus(const Corpus& corpus);
void write_corpus(const Corpus& corpus, const std::string& path);

// Which representation of an item an index covers.
enum class Space { raw, shorthand };

const char* space_name(Space s);
std::optional<Space> parse_space(std::string_view name);

// item.text or item.shorthand; StateError when the shorthand is missing.
const std::string& item_text(const BenchmarkItem& item, Space space);

using ShorthandTable = std::map<std::string, std::string>;

ShorthandTable load_shorthand_table(const std::string& path);
void write_shorthand_table(const ShorthandTable& table, const std::string& path);

// Returns a new corpus; KeyError for unknown ids, FormatError for grammar
// violations.
Corpus attach_shorthands(const Corpus& corpus, const ShorthandTable& table);

enum class UseCaseCategory { topics, skills, applications, known_validation, novel, custom };

const char* use_case_category_name(UseCaseCategory c);
std::optional<UseCaseCategory> parse_use_case_category(std::string_view name);

struct Facet {
  std::string family;
  std::string axis;
  std::string value;
  bool operator==(const Facet&) const = default;
};

struct UseCase {
  std::string use_case_id;
  std::string text;
  UseCaseCategory category = UseCaseCategory::custom;
  std::optional<std::string> gold_benchmark_id;
  std::optional<Facet> facet;
  bool operator==(const UseCase&) const = default;
};

void validate_use_case(const UseCase& uc);  // FormatError
std::vector<UseCase> load_use_cases(const std::string& path);
std::vector<UseCase> parse_use_cases(std::string_view jsonl);

struct RunRecord {
  std::string model_id;
  std::string benchmark_id;
  std::string item_id;
  double score = 0.0;
};

// Per-(model, item) success scores in [0, 1].
class ModelRunSet {
 public:
  ModelRunSet() = default;

  // RangeError / KeyError / CoverageError per the invariants. Records whose
  // benchmark disagrees with the item's benchmark raise IngestError.
  static ModelRunSet from_records(const std::vector<RunRecord>& records, const Corpus& corpus);

  const std::vector<std::string>& model_ids() const { return model_ids_; }
  bool has_model(std::string_view model) const;
  bool has(std::string_view model, std::string_view item_id) const;
  double score(std::string_view model, std::string_view item_id) const;  // KeyError
  std::size_t size() const;

 private:
  std::vector<std::string> model_ids_;
  std::unordered_map<std::string, std::unordered_map<std::string, double>> scores_;
};

ModelRunSet load_model_runs(const std::string& path, const Corpus& corpus);
ModelRunSet parse_model_runs(std::string_view jsonl, const Corpus& corpus);

std::string read_file(const std::string& path);  // IoError
void write_file(const std::string& path, std::string_view data);

}  // namespace bb
