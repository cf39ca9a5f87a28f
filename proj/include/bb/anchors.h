#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bb/corpus.h"
#include "bb/gateway.h"

namespace bb {

enum class AnchorStrategy { original, rephrasing, example_synthesis, shorthand };

const char* strategy_name(AnchorStrategy s);
std::optional<AnchorStrategy> parse_strategy(std::string_view name);

// Number of anchors a strategy must produce.
std::size_t expected_anchor_count(AnchorStrategy s);

struct AnchorSet {
  std::string use_case_id;
  AnchorStrategy strategy = AnchorStrategy::original;
  std::vector<std::string> anchors;
  Space target_space = Space::raw;  // shorthand iff strategy is shorthand
};

// Throws GatewayError if the gateway fails, AnchorFormatError if the answer is
// still malformed after one re-ask.
AnchorSet generate_anchors(const UseCase& use_case, AnchorStrategy strategy, CompletionGateway& lm);

struct ShorthandTranslation {
  ShorthandTable table;
  std::vector<std::string> rejects;           // malformed twice
  std::vector<std::string> gateway_failures;  // transport exhausted
  std::string gateway_error;                  // first failure message, empty if none
};

// Rewrites every item through the shorthand template, fanning out up to
// `parallelism` concurrent requests. Never drops items silently.
ShorthandTranslation translate_corpus_to_shorthand(const Corpus& corpus, CompletionGateway& lm,
                                                   std::size_t parallelism);

}  // namespace bb
