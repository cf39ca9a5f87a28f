#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bb/corpus.h"
#include "bb/errors.h"
#include "bb/shorthand.h"

namespace bb {

using nlohmann::json;

namespace {

template <typename Fn>
void for_each_line(std::string_view data, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < data.size()) {
    std::size_t end = data.find('\n', pos);
    if (end == std::string_view::npos) end = data.size();
    std::string_view line = data.substr(pos, end - pos);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    bool blank = true;
    for (char c : line) {
      if (c != ' ' && c != '\t') {
        blank = false;
        break;
      }
    }
    if (!blank) fn(line, line_no);
    pos = end + 1;
  }
}

json parse_line(std::string_view line, std::size_t line_no) {
  try {
    json j = json::parse(line);
    if (!j.is_object()) throw IngestError(IngestFailure::parse, "line " + std::to_string(line_no) + ": record is not an object", line_no);
    return j;
  } catch (const json::exception& e) {
    throw IngestError(IngestFailure::parse, "line " + std::to_string(line_no) + ": " + e.what(), line_no);
  }
}

std::string required_string(const json& j, const char* key, std::size_t line_no) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string())
    throw IngestError(IngestFailure::parse,
                      "line " + std::to_string(line_no) + ": missing string field '" + key + "'", line_no);
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& j, const char* key, std::size_t line_no) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string())
    throw IngestError(IngestFailure::parse,
                      "line " + std::to_string(line_no) + ": field '" + key + "' must be a string", line_no);
  return it->get<std::string>();
}

}  // namespace

const char* metric_kind_name(MetricKind kind) {
  switch (kind) {
    case MetricKind::accuracy: return "accuracy";
    case MetricKind::exact_match: return "exact_match";
    case MetricKind::f1: return "f1";
    case MetricKind::win_rate: return "win_rate";
    case MetricKind::precomputed: return "precomputed";
  }
  return "accuracy";
}

std::optional<MetricKind> parse_metric_kind(std::string_view name) {
  if (name == "accuracy") return MetricKind::accuracy;
  if (name == "exact_match") return MetricKind::exact_match;
  if (name == "f1") return MetricKind::f1;
  if (name == "win_rate") return MetricKind::win_rate;
  if (name == "precomputed") return MetricKind::precomputed;
  return std::nullopt;
}

Corpus Corpus::from_items(std::vector<BenchmarkItem> items, bool expect_unique) {
  Corpus c;
  c.items_.reserve(items.size());
  std::map<std::string, std::size_t> bench_pos;
  for (auto& item : items) {
    if (item.item_id.empty()) throw IngestError(IngestFailure::parse, "item with empty id");
    if (item.text.empty())
      throw IngestError(IngestFailure::parse, "item '" + item.item_id + "' has empty text");
    if (c.by_id_.count(item.item_id)) {
      if (expect_unique)
        throw IngestError(IngestFailure::duplicate, "duplicate item_id '" + item.item_id + "'");
      ++c.duplicates_dropped_;
      continue;
    }
    auto [it, fresh] = bench_pos.try_emplace(item.benchmark_id, c.benchmarks_.size());
    if (fresh) {
      c.benchmarks_.push_back({item.benchmark_id, item.benchmark_id, item.metric_kind, 0});
    } else if (c.benchmarks_[it->second].metric_kind != item.metric_kind) {
      throw IngestError(IngestFailure::metric, "benchmark '" + item.benchmark_id +
                                                   "' mixes metric kinds (item '" + item.item_id + "')");
    }
    ++c.benchmarks_[it->second].item_count;
    c.by_id_.emplace(item.item_id, c.items_.size());
    c.items_.push_back(std::move(item));
  }
  return c;
}

std::optional<std::size_t> Corpus::index_of(std::string_view item_id) const {
  auto it = by_id_.find(std::string(item_id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

const BenchmarkItem& Corpus::at(std::string_view item_id) const {
  auto idx = index_of(item_id);
  if (!idx) throw KeyError("unknown item_id '" + std::string(item_id) + "'");
  return items_[*idx];
}

const Benchmark* Corpus::benchmark(std::string_view benchmark_id) const {
  for (const auto& b : benchmarks_)
    if (b.benchmark_id == benchmark_id) return &b;
  return nullptr;
}

std::vector<std::size_t> Corpus::items_of(std::string_view benchmark_id) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < items_.size(); ++i)
    if (items_[i].benchmark_id == benchmark_id) out.push_back(i);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("short write to '" + path + "'");
}

Corpus parse_corpus(std::string_view jsonl, bool expect_unique) {
  std::vector<BenchmarkItem> items;
  std::set<std::string> seen;
  for_each_line(jsonl, [&](std::string_view line, std::size_t line_no) {
    json j = parse_line(line, line_no);
    BenchmarkItem item;
    item.item_id = required_string(j, "id", line_no);
    item.benchmark_id = required_string(j, "benchmark", line_no);
    item.text = required_string(j, "text", line_no);
    item.answer = optional_string(j, "answer", line_no).value_or("");
    const std::string metric = required_string(j, "metric", line_no);
    auto kind = parse_metric_kind(metric);
    if (!kind)
      throw IngestError(IngestFailure::metric,
                        "line " + std::to_string(line_no) + ": unknown metric kind '" + metric + "'", line_no);
    item.metric_kind = *kind;
    if (auto tags = j.find("tags"); tags != j.end() && !tags->is_null()) {
      if (!tags->is_array())
        throw IngestError(IngestFailure::parse, "line " + std::to_string(line_no) + ": tags must be an array", line_no);
      for (const auto& t : *tags) {
        if (!t.is_string())
          throw IngestError(IngestFailure::parse, "line " + std::to_string(line_no) + ": tag must be a string", line_no);
        item.tags.push_back(t.get<std::string>());
      }
    }
    if (auto sh = optional_string(j, "shorthand", line_no)) {
      try {
        item.shorthand = render_shorthand(parse_shorthand(*sh));
      } catch (const FormatError& e) {
        throw IngestError(IngestFailure::parse, "line " + std::to_string(line_no) + ": " + e.what(), line_no);
      }
    }
    if (item.text.empty())
      throw IngestError(IngestFailure::parse, "line " + std::to_string(line_no) + ": empty text", line_no);
    if (!seen.insert(item.item_id).second && expect_unique)
      throw IngestError(IngestFailure::duplicate,
                        "line " + std::to_string(line_no) + ": duplicate item_id '" + item.item_id + "'", line_no);
    items.push_back(std::move(item));
  });
  return Corpus::from_items(std::move(items), expect_unique);
}

Corpus ingest_corpus(const std::string& path, bool expect_unique) {
  return parse_corpus(read_file(path), expect_unique);
}

std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& item : corpus.items()) {
    json j;
    j["id"] = item.item_id;
    j["benchmark"] = item.benchmark_id;
    j["text"] = item.text;
    j["answer"] = item.answer;
    j["metric"] = metric_kind_name(item.metric_kind);
    j["tags"] = item.tags;
    if (item.shorthand) j["shorthand"] = *item.shorthand;
    out += j.dump();
    out += '\n';
  }
  return out;
}

void write_corpus(const Corpus& corpus, const std::string& path) {
  write_file(path, serialize_corpus(corpus));
}

const char* space_name(Space s) { return s == Space::raw ? "raw" : "shorthand"; }

std::optional<Space> parse_space(std::string_view name) {
  if (name == "raw") return Space::raw;
  if (name == "shorthand") return Space::shorthand;
  return std::nullopt;
}

const std::string& item_text(const BenchmarkItem& item, Space space) {
  if (space == Space::raw) return item.text;
  if (!item.shorthand) throw StateError("item '" + item.item_id + "' has no shorthand");
  return *item.shorthand;
}

ShorthandTable load_shorthand_table(const std::string& path) {
  ShorthandTable table;
  for_each_line(read_file(path), [&](std::string_view line, std::size_t line_no) {
    json j = parse_line(line, line_no);
    table[required_string(j, "id", line_no)] = required_string(j, "shorthand", line_no);
  });
  return table;
}

void write_shorthand_table(const ShorthandTable& table, const std::string& path) {
  std::string out;
  for (const auto& [id, sh] : table) {
    out += json{{"id", id}, {"shorthand", sh}}.dump();
    out += '\n';
  }
  write_file(path, out);
}

Corpus attach_shorthands(const Corpus& corpus, const ShorthandTable& table) {
  if (table.empty()) return corpus;
  std::vector<BenchmarkItem> items = corpus.items();
  for (const auto& [id, sh] : table) {
    auto idx = corpus.index_of(id);
    if (!idx) throw KeyError("shorthand table references unknown item_id '" + id + "'");
    items[*idx].shorthand = render_shorthand(parse_shorthand(sh));
  }
  return Corpus::from_items(std::move(items), true);
}

const char* use_case_category_name(UseCaseCategory c) {
  switch (c) {
    case UseCaseCategory::topics: return "topics";
    case UseCaseCategory::skills: return "skills";
    case UseCaseCategory::applications: return "applications";
    case UseCaseCategory::known_validation: return "known_validation";
    case UseCaseCategory::novel: return "novel";
    case UseCaseCategory::custom: return "custom";
  }
  return "custom";
}

std::optional<UseCaseCategory> parse_use_case_category(std::string_view name) {
  if (name == "topics") return UseCaseCategory::topics;
  if (name == "skills") return UseCaseCategory::skills;
  if (name == "applications") return UseCaseCategory::applications;
  if (name == "known_validation") return UseCaseCategory::known_validation;
  if (name == "novel") return UseCaseCategory::novel;
  if (name == "custom") return UseCaseCategory::custom;
  return std::nullopt;
}

void validate_use_case(const UseCase& uc) {
  if (uc.text.empty()) throw FormatError("use-case '" + uc.use_case_id + "' has empty text", uc.use_case_id);
  if (uc.category == UseCaseCategory::known_validation && !uc.gold_benchmark_id)
    throw FormatError("known_validation use-case '" + uc.use_case_id + "' needs a gold benchmark", uc.use_case_id);
}

std::vector<UseCase> parse_use_cases(std::string_view jsonl) {
  std::vector<UseCase> out;
  std::set<std::string> seen;
  for_each_line(jsonl, [&](std::string_view line, std::size_t line_no) {
    json j = parse_line(line, line_no);
    UseCase uc;
    uc.use_case_id = required_string(j, "id", line_no);
    uc.text = required_string(j, "text", line_no);
    const std::string cat = optional_string(j, "category", line_no).value_or("custom");
    auto parsed = parse_use_case_category(cat);
    if (!parsed)
      throw IngestError(IngestFailure::parse, "line " + std::to_string(line_no) + ": unknown category '" + cat + "'", line_no);
    uc.category = *parsed;
    uc.gold_benchmark_id = optional_string(j, "gold_benchmark", line_no);
    auto fam = optional_string(j, "facet_family", line_no);
    auto axis = optional_string(j, "facet_axis", line_no);
    auto value = optional_string(j, "facet_value", line_no);
    const int present = int(fam.has_value()) + int(axis.has_value()) + int(value.has_value());
    if (present == 3) {
      uc.facet = Facet{*fam, *axis, *value};
    } else if (present != 0) {
      throw IngestError(IngestFailure::parse,
                        "line " + std::to_string(line_no) + ": facet fields must be all present or all absent", line_no);
    }
    try {
      validate_use_case(uc);
    } catch (const FormatError& e) {
      throw IngestError(IngestFailure::parse, "line " + std::to_string(line_no) + ": " + e.what(), line_no);
    }
    if (!seen.insert(uc.use_case_id).second)
      throw IngestError(IngestFailure::duplicate, "line " + std::to_string(line_no) + ": duplicate use-case id '" + uc.use_case_id + "'", line_no);
    out.push_back(std::move(uc));
  });
  return out;
}

std::vector<UseCase> load_use_cases(const std::string& path) { return parse_use_cases(read_file(path)); }

ModelRunSet ModelRunSet::from_records(const std::vector<RunRecord>& records, const Corpus& corpus) {
  ModelRunSet set;
  // benchmark -> model -> covered items
  std::map<std::string, std::map<std::string, std::set<std::string>>> coverage;
  for (const auto& r : records) {
    if (!(r.score >= 0.0 && r.score <= 1.0))
      throw RangeError("score " + std::to_string(r.score) + " for (" + r.model_id + ", " + r.item_id +
                       ") outside [0,1]");
    auto idx = corpus.index_of(r.item_id);
    if (!idx) throw KeyError("model run references unknown item_id '" + r.item_id + "'");
    const auto& item = corpus.items()[*idx];
    if (!r.benchmark_id.empty() && r.benchmark_id != item.benchmark_id)
      throw IngestError(IngestFailure::parse, "model run for '" + r.item_id + "' names benchmark '" +
                                                  r.benchmark_id + "' but the item belongs to '" +
                                                  item.benchmark_id + "'");
    if (!set.scores_.count(r.model_id)) set.model_ids_.push_back(r.model_id);
    set.scores_[r.model_id][r.item_id] = r.score;
    coverage[item.benchmark_id][r.model_id].insert(r.item_id);
  }
  for (const auto& [bench, per_model] : coverage) {
    const auto& [first_model, first_items] = *per_model.begin();
    for (const auto& [model, items] : per_model) {
      if (items != first_items)
        throw CoverageError("models '" + first_model + "' and '" + model +
                            "' cover different item sets in benchmark '" + bench + "'");
    }
  }
  return set;
}

bool ModelRunSet::has_model(std::string_view model) const { return scores_.count(std::string(model)) > 0; }

bool ModelRunSet::has(std::string_view model, std::string_view item_id) const {
  auto m = scores_.find(std::string(model));
  return m != scores_.end() && m->second.count(std::string(item_id)) > 0;
}

double ModelRunSet::score(std::string_view model, std::string_view item_id) const {
  auto m = scores_.find(std::string(model));
  if (m == scores_.end()) throw KeyError("unknown model '" + std::string(model) + "'");
  auto s = m->second.find(std::string(item_id));
  if (s == m->second.end())
    throw KeyError("no score for model '" + std::string(model) + "' on item '" + std::string(item_id) + "'");
  return s->second;
}

std::size_t ModelRunSet::size() const {
  std::size_t n = 0;
  for (const auto& [m, s] : scores_) n += s.size();
  return n;
}

ModelRunSet parse_model_runs(std::string_view jsonl, const Corpus& corpus) {
  std::vector<RunRecord> records;
  for_each_line(jsonl, [&](std::string_view line, std::size_t line_no) {
    json j = parse_line(line, line_no);
    RunRecord r;
    r.model_id = required_string(j, "model", line_no);
    r.benchmark_id = optional_string(j, "benchmark", line_no).value_or("");
    r.item_id = required_string(j, "item_id", line_no);
    auto s = j.find("score");
    if (s == j.end() || !s->is_number())
      throw IngestError(IngestFailure::parse, "line " + std::to_string(line_no) + ": missing numeric field 'score'", line_no);
    r.score = s->get<double>();
    records.push_back(std::move(r));
  });
  return ModelRunSet::from_records(records, corpus);
}

ModelRunSet load_model_runs(const std::string& path, const Corpus& corpus) {
  return parse_model_runs(read_file(path), corpus);
}

}  // namespace bb
