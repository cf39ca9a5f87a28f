#include "bb/judge.h"

#include <json.hpp>

#include "bb/concurrency.h"
#include "bb/errors.h"

namespace bb {

using nlohmann::json;

double relevance_value(RelevanceLabel label) {
  switch (label) {
    case RelevanceLabel::relevant: return 1.0;
    case RelevanceLabel::partially_relevant: return 0.5;
    case RelevanceLabel::irrelevant: return 0.0;
  }
  return 0.0;
}

const char* relevance_label_name(RelevanceLabel label) {
  switch (label) {
    case RelevanceLabel::relevant: return "relevant";
    case RelevanceLabel::partially_relevant: return "partially_relevant";
    case RelevanceLabel::irrelevant: return "irrelevant";
  }
  return "irrelevant";
}

std::optional<RelevanceLabel> parse_relevance_label(std::string_view name) {
  if (name == "relevant") return RelevanceLabel::relevant;
  if (name == "partially_relevant") return RelevanceLabel::partially_relevant;
  if (name == "irrelevant") return RelevanceLabel::irrelevant;
  return std::nullopt;
}

namespace {

// Asks once, re-asks once on a malformed answer. nullopt after two failures.
template <typename Parse>
std::optional<int> ask(CompletionGateway& lm, TemplateId id, const Variables& vars, Parse&& parse) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    try {
      if (auto v = parse(lm.complete(id, vars))) return v;
    } catch (const ResponseFormatError&) {
    }
  }
  return std::nullopt;
}

}  // namespace

FilterResult filter_hits(const UseCase& use_case, const std::vector<RetrievalHit>& hits, const Corpus& corpus,
                         CompletionGateway& lm) {
  FilterResult out;
  out.judged.resize(hits.size());
  parallel_for(hits.size(), lm.max_parallel(), [&](std::size_t i) {
    const auto& item = corpus.at(hits[i].item_id);
    JudgedHit& j = out.judged[i];
    j.hit = hits[i];
    j.benchmark_id = item.benchmark_id;
    j.judge_id = lm.id();
    const auto score = ask(lm, TemplateId::selection_judge, {{"user_intent", use_case.text}, {"test_case", item.text}},
                           [](const std::string& t) { return parse_score_tag(t); });
    if (score) j.selection = static_cast<SelectionScore>(*score);
    else j.selection_failed = true;
  });
  for (const auto& j : out.judged) {
    if (j.selection_failed) ++out.failures;
    else if (*j.selection == SelectionScore::negative) ++out.removed;
    else out.kept.push_back(j);
  }
  return out;
}

JudgeResult judge_relevance(const UseCase& use_case, std::vector<JudgedHit> hits, const Corpus& corpus,
                            CompletionGateway& lm) {
  JudgeResult out;
  parallel_for(hits.size(), lm.max_parallel(), [&](std::size_t i) {
    JudgedHit& j = hits[i];
    const auto& item = corpus.at(j.hit.item_id);
    if (j.benchmark_id.empty()) j.benchmark_id = item.benchmark_id;
    if (j.judge_id.empty()) j.judge_id = lm.id();
    const auto code = ask(lm, TemplateId::evaluation_judge, {{"user_intent", use_case.text}, {"test_case", item.text}},
                          [](const std::string& t) { return parse_label_tag(t); });
    if (!code) {
      j.label.reset();
      j.label_failed = true;
      return;
    }
    j.label = *code == 2 ? RelevanceLabel::relevant
                         : (*code == 1 ? RelevanceLabel::partially_relevant : RelevanceLabel::irrelevant);
  });
  for (const auto& j : hits) out.failures += j.label_failed ? 1 : 0;
  out.hits = std::move(hits);
  return out;
}

double mean_relevance(const std::vector<RelevanceLabel>& labels) {
  if (labels.empty()) throw ArgumentError("mean_relevance of an empty list");
  double sum = 0.0;
  for (auto l : labels) sum += relevance_value(l);
  return sum / static_cast<double>(labels.size());
}

std::string judged_to_jsonl(const std::vector<JudgedHit>& hits) {
  std::string out;
  for (const auto& h : hits) {
    json j;
    j["item_id"] = h.hit.item_id;
    j["benchmark"] = h.benchmark_id;
    j["score"] = h.hit.score;
    if (h.selection_failed) j["selection"] = "judge_failed";
    else if (h.selection) j["selection"] = static_cast<int>(*h.selection);
    else j["selection"] = nullptr;
    if (h.label_failed) j["label"] = "judge_failed";
    else if (h.label) j["label"] = relevance_label_name(*h.label);
    else j["label"] = nullptr;
    j["judge_id"] = h.judge_id;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<JudgedHit> parse_judged_jsonl(std::string_view data) {
  std::vector<JudgedHit> out;
  std::size_t line_no = 0, pos = 0;
  while (pos < data.size()) {
    std::size_t end = data.find('\n', pos);
    if (end == std::string_view::npos) end = data.size();
    const std::string_view line = data.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = "judged line " + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw IngestError(IngestFailure::parse, where + ": " + e.what(), line_no);
    }
    JudgedHit h;
    try {
      h.hit.item_id = j.at("item_id").get<std::string>();
      h.benchmark_id = j.value("benchmark", std::string());
      h.hit.score = j.value("score", 0.0);
      h.judge_id = j.value("judge_id", std::string());
      const json sel = j.value("selection", json(nullptr));
      if (sel.is_string() && sel.get<std::string>() == "judge_failed") {
        h.selection_failed = true;
      } else if (sel.is_number_integer()) {
        const int s = sel.get<int>();
        if (s < -1 || s > 1) throw IngestError(IngestFailure::parse, where + ": selection must be 1, 0 or -1", line_no);
        h.selection = static_cast<SelectionScore>(s);
      } else if (!sel.is_null()) {
        throw IngestError(IngestFailure::parse, where + ": bad selection value", line_no);
      }
      const json lab = j.value("label", json(nullptr));
      if (lab.is_string()) {
        const auto name = lab.get<std::string>();
        if (name == "judge_failed") {
          h.label_failed = true;
        } else if (auto l = parse_relevance_label(name)) {
          h.label = *l;
        } else {
          throw IngestError(IngestFailure::parse, where + ": unknown label '" + name + "'", line_no);
        }
      } else if (!lab.is_null()) {
        throw IngestError(IngestFailure::parse, where + ": bad label value", line_no);
      }
    } catch (const json::exception& e) {
      throw IngestError(IngestFailure::parse, where + ": " + e.what(), line_no);
    }
    h.hit.rank = out.size() + 1;
    out.push_back(std::move(h));
  }
  return out;
}

}  // namespace bb
