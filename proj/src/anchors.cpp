#include "bb/anchors.h"

#include <mutex>

#include "bb/concurrency.h"
#include "bb/errors.h"
#include "bb/shorthand.h"

namespace bb {

const char* strategy_name(AnchorStrategy s) {
  switch (s) {
    case AnchorStrategy::original: return "original";
    case AnchorStrategy::rephrasing: return "rephrasing";
    case AnchorStrategy::example_synthesis: return "example_synthesis";
    case AnchorStrategy::shorthand: return "shorthand";
  }
  return "original";
}

std::optional<AnchorStrategy> parse_strategy(std::string_view name) {
  for (auto s : {AnchorStrategy::original, AnchorStrategy::rephrasing, AnchorStrategy::example_synthesis,
                 AnchorStrategy::shorthand})
    if (name == strategy_name(s)) return s;
  return std::nullopt;
}

std::size_t expected_anchor_count(AnchorStrategy s) {
  return (s == AnchorStrategy::rephrasing || s == AnchorStrategy::example_synthesis) ? 3 : 1;
}

namespace {

// Returns parsed anchors or nullopt when the text is malformed.
std::optional<std::vector<std::string>> parse_anchor_response(AnchorStrategy s, const std::string& text) {
  if (s == AnchorStrategy::shorthand) {
    const auto tags = extract_tags(text, "shorthand");
    if (tags.size() != 1) return std::nullopt;
    try {
      return std::vector<std::string>{render_shorthand(parse_shorthand(tags[0]))};
    } catch (const FormatError&) {
      return std::nullopt;
    }
  }
  const auto parts = extract_tags(text, s == AnchorStrategy::rephrasing ? "refinement" : "testcase");
  if (parts.size() != 3) return std::nullopt;
  for (const auto& p : parts)
    if (p.empty()) return std::nullopt;
  return parts;
}

// One call plus one re-ask. nullopt when both answers were malformed.
template <typename Parse>
auto ask_twice(CompletionGateway& lm, TemplateId id, const Variables& vars, Parse&& parse)
    -> decltype(parse(std::string())) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::string text;
    try {
      text = lm.complete(id, vars);
    } catch (const ResponseFormatError&) {
      continue;
    }
    if (auto parsed = parse(text)) return parsed;
  }
  return std::nullopt;
}

}  // namespace

AnchorSet generate_anchors(const UseCase& use_case, AnchorStrategy strategy, CompletionGateway& lm) {
  if (use_case.text.empty()) throw ArgumentError("use-case text is empty");
  AnchorSet set;
  set.use_case_id = use_case.use_case_id;
  set.strategy = strategy;
  set.target_space = strategy == AnchorStrategy::shorthand ? Space::shorthand : Space::raw;

  if (strategy == AnchorStrategy::original) {
    set.anchors = {use_case.text};
    return set;
  }
  TemplateId tid = TemplateId::rephrasing;
  Variables vars{{"query", use_case.text}};
  if (strategy == AnchorStrategy::example_synthesis) tid = TemplateId::example_synthesis;
  if (strategy == AnchorStrategy::shorthand) {
    tid = TemplateId::shorthand_rewrite;
    vars = {{"text", use_case.text}};
  }
  auto anchors = ask_twice(lm, tid, vars, [&](const std::string& t) { return parse_anchor_response(strategy, t); });
  if (!anchors)
    throw AnchorFormatError(std::string(strategy_name(strategy)) + " output for use-case '" + use_case.use_case_id +
                            "' was malformed after one re-ask");
  set.anchors = std::move(*anchors);
  return set;
}

ShorthandTranslation translate_corpus_to_shorthand(const Corpus& corpus, CompletionGateway& lm,
                                                   std::size_t parallelism) {
  enum class Outcome { ok, rejected, gateway };
  const std::size_t n = corpus.size();
  std::vector<std::string> shorthands(n);
  std::vector<Outcome> outcome(n, Outcome::ok);
  std::string first_error;
  std::mutex mu;

  parallel_for(n, std::min(parallelism, lm.max_parallel()), [&](std::size_t i) {
    const auto& item = corpus.items()[i];
    try {
      auto sh = ask_twice(lm, TemplateId::shorthand_rewrite, {{"text", item.text}},
                          [](const std::string& t) -> std::optional<std::string> {
                            const auto tags = extract_tags(t, "shorthand");
                            if (tags.size() != 1) return std::nullopt;
                            try {
                              return render_shorthand(parse_shorthand(tags[0]));
                            } catch (const FormatError&) {
                              return std::nullopt;
                            }
                          });
      if (sh) shorthands[i] = std::move(*sh);
      else outcome[i] = Outcome::rejected;
    } catch (const GatewayError& e) {
      outcome[i] = Outcome::gateway;
      std::lock_guard lock(mu);
      if (first_error.empty()) first_error = e.what();
    }
  });

  ShorthandTranslation out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& id = corpus.items()[i].item_id;
    switch (outcome[i]) {
      case Outcome::ok: out.table.emplace(id, std::move(shorthands[i])); break;
      case Outcome::rejected: out.rejects.push_back(id); break;
      case Outcome::gateway: out.gateway_failures.push_back(id); break;
    }
  }
  out.gateway_error = std::move(first_error);
  return out;
}

}  // namespace bb
