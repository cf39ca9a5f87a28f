#include "bb/templates.h"

#include <algorithm>

#include "bb/errors.h"
#include "bb/shorthand.h"

namespace bb {

namespace {

const std::string kRephrasing = R"PROMPT("""Given a user query, create **three brief refinements** of that query that are appropriate for retrieving examples representing the interest highlighted in the query. Use the following rules:

- If the query is compositional, i.e., it contains multiple concepts, make different operationalizations of each concept. For example: if the query is `scientific visualizations for scientific papers` - each refinement should focus on a different sub-part of this query: like scientific visualizations, visualizations for scientific papers and tools for visualizations.
- If the query is about some broad capability, enlist different sub-topics that test for that capability. For example: if the query is `trivia` - each refinement can include common topics included in trivia questions like `celebrity history`, `geography`, `world history`, etc.
- If the query is about some broad topic, enlist different related domains and sub-topics that are related to that topic. For example: if the query is `biology` - each refinement can include different related domains like `genetics`, `ecology`, `dermatology`, etc.
- If the query is about a specific task, generate different contextual forms of that task. For example: if the query is `Creative Writing` - each refinement can include different types of creative writing like `poetry`, `short stories`, `novels`, etc.
- If the query describes a scenario - `Cooking indian food` - list different activities that can be performed in that scenario. For example: `indian spices`, `indian food recipes` and `indian desserts`.
- If the query is a proper Noun - `Harry Potter` - generate at least one query that highlights the broad task associated with that proper noun, for example: `fantasy literature` or `magic`, and one that lists the most popular form of that proper noun, for example, `Harry Potter Books`.
- If the query is a question - `What is the Capital of France ?` - generate at least one query that highlights the topic of that question. For example: `Capitals of different countries`, `Facts about France` and `Paris`.
- If it falls under neither of these categories, for example: `Can Elephants fly ?` - generate queries that cover reasonable aspects of that query: For example: `Animals that can fly`, `Elephant facts` and `Flying facts`.

* Make sure that one refinement is not a subset of another refinement.
* Make sure that at least one refinement highlights the broad domain of the query. For example, if the query is `chess` - one refinement should include `board games`.
* Avoid making overly complicated refinements by using simple words and phrases.
* Focus on what would attract different types of relevant test cases or documents from existing test benchmarks.
ALWAYS Return your responses in the following XML format; each refinement should be in a separate <refinement> tag:
<refinements>
    <refinement> </refinement>
</refinements>
DO NOT INCLUDE ANY OTHER TEXT IN YOUR RESPONSE or any reasoning in your response.
The user query is: {query})PROMPT";

const std::string kExampleSynthesis = R"PROMPT("""Given a user query, generate 3 testcases that is representative of the user's interest that can help evaluate an AI Model on its competence on the users intent. The rules for generating the testcases are as follows:
- The testcase should be STRICTLY between 1-2 lines and not very verbose.
- Each testcase can be of a different format (Long Form, MCQ, Fill in the blank, etc.)
- Only include the question/input for a testcase and not the expected output.
- Return each testcase wrapped in a separate <testcase> </testcase> tag. Your final outputs should be of the form:
<testcases>
    <testcase> Some question related to the query </testcase>
    <testcase> Some question related to the query </testcase>
    <testcase> Some question related to the query </testcase>
</testcases>
DO NOT INCLUDE ANY OTHER TEXT IN YOUR RESPONSE or any reasoning in your response.
- The user query is: {query}
""")PROMPT";

const std::string kShorthandRewrite = R"PROMPT("""You are tasked with converting natural language text into a concise shorthand format which can be used to identify other datapoints having similar capabilities.
The format for creating this shorthand is: <skill> & <key1> & <key2> & <key3> where:

- <skill> encodes the primary cognitive/technical ability needed to accomplish the task underlying the text. Ask yourself: "What is the primary cognitive/technical ability needed to accomplish the task underlying the text?"
Some examples (NOT EXHAUSTIVE): creative_writing, coding, equation_solving, coreference_resolution, strategy_planning, logical_reasoning, factual_recall, reading_comprehension, scientific_visualization, graphics, social_interaction, movie_trivia, statistical_analysis, etc.

- <key1>,<key2>, <key3> are 1-3 SPECIFIC and DISTINCTIVE features that maximize retrieval precision; For adding each feature/key, ask yourself:
  - "What are the specific document types, topics, and/or entities in this text" that need to be preserved for retrieving similar datapoints?
  - Is there any specific topic underlying being asked by the user query: "machine learning" "statistics" "poetry" etc - include that as a key.
  - Is there any specific output format mentioned in the query: "research papers", "clinical cases", "financial reports" "emails" etc - include that as a key.
  - Is the the query about a specific person, organization, or entity - include that as a key. If there are multiple entities, or placeholders like "X", "Y", "Z" - include the broad category of the entity (e.g., "actor", "writer", "sportsperson" "female") and number of entitites as a key.
  - Is the user looking for a specific task like: "sorting_ascending", "counting_3_objects", "implementing_neural_network"- include that as a key.  - If the text includes a mathematical formula: include the concept type of the formula (e.g., "differential_equations", "linear_algebra", "probability_distribution")
  - If the user has only specificed a single topic - use that as the key. DO NOT ADD A SKILL UNLESS ITS SPECIFIED.
  - If the user has only specified a single skill/task - use that skill/task as the key. DO NOT ADD A DIFFERENT TASK UNLESS ITS SPECIFIED.
  - Use underscores for multi-word concepts (e.g., "machine_learning", "social_skills", "new_york")
  - Make sure that no key adds a new generic domain/skill/topic to the query. STRICTLY FOLLOW THIS RULE.
  - Separate each key with an ampersand.
  - Return exactly 1 shorthand for a user query wrapped in XML tags: <shorthand></shorthand>.
- IMPORTANT: Only include keys, if they add unique, searchable value. If there are no more distinctive features, USE FEWER KEYS rather than padding with generic terms.Your final outputs should be of the form:
    <shorthand> </shorthand>
  Here are some examples of shorthands:
  <shorthand>equation_solving & quadratic_equations & solution_id</shorthand>
  <shorthand>factual_recall & historical_figures & mongols</shorthand>
  <shorthand>equation_solving & sequence_formula & nth_term</shorthand>
  <shorthand>reading_comp & analysis & scientific_conclusions</shorthand>
"""
Text: {text})PROMPT";

const std::string kSelectionJudge = R"PROMPT(SELECTION PROMPT: You are evaluating whether a test case is relevant for assessing an AI model's ability to help with a specific user task. You are given:
- <user_intent> Some topic, a description of some scenario, a capability or an application that some user is interested in <user_intent>
- <test_case> Some question/test case that might be used to evaluate that system. </test_case>.

A test case is RELEVANT if correctly answering it would demonstrate capabilities that directly support the user's intent. Consider the following:
- Knowledge Overlap: Does the test require knowledge domains that overlap with what the user needs?
- Skill Transfer: Would the reasoning, analysis, or problem-solving skills needed for this test directly apply to the user's task?
- Practical Utility  If an AI can handle this test case well, would that increase confidence it can help the user with their specific goal?
Rate the relevance as one of the following:
- 1: Test case is relevant to the user's intent.
- 0: Test case maybe relevant to the user's intent but not directly relevant.
- -1: Test case is not relevant to the user's intent
Provide your rating (only 1,0 or -1) wrapped in the <score> and </score> tags.

<user_intent>{user_intent}</user_intent>
<test_case>{test_case}</test_case>)PROMPT";

const std::string kEvaluationJudge = R"PROMPT(EVALUATION PROMPT: """You are evaluating whether a test case is relevant for assessing an AI model's ability to help with a specific user task. You are given:
- <user_intent> Some topic, a description of some scenario, a capability or an application that some user is interested in </user_intent>
- <test_case> Some question/test case that might be used to evaluate that system. </test_case>
Your evaluation criteria is:
A test case is RELEVANT if successfully answering it would demonstrate capabilities that directly support the user's intent. Consider the following:
- Knowledge Overlap: Does the test require knowledge domains that overlap with what the user needs?
- Skill Transfer: Would the reasoning, analysis, or problem-solving skills needed for this test directly apply to the user's task?
- Practical Utility  If an AI can handle this test case well, would that increase confidence it can help the user with their specific goal?
Rate the relevance as one of the following:
- RELEVANT: If an AI can answer this test case correctly, it would strongly imply that it can help the user with their specific goal.
- PARTIAL RELEVANT: If an AI can answer this test case correctly, it would somewhat imply that it can help the user with their broad goal i.e., with the topic or the skill needed by the user.
- IRRELEVANT: Answering this question, would not provide any useful indication about if the AI can fulfill the user's intent.
Provide your rating and wrapped in the <label> and </label> tags.

<user_intent>{user_intent}</user_intent>
<test_case>{test_case}</test_case>)PROMPT";

bool is_name_char(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::string upper_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  return out;
}

// Calls fn(name) for each {name} placeholder; returns the text with each
// replaced by fn's result.
template <typename Fn>
std::string substitute(const std::string& body, Fn&& fn) {
  std::string out;
  out.reserve(body.size());
  std::size_t i = 0;
  while (i < body.size()) {
    if (body[i] == '{') {
      std::size_t j = i + 1;
      while (j < body.size() && is_name_char(body[j])) ++j;
      if (j < body.size() && body[j] == '}' && j > i + 1) {
        out += fn(body.substr(i + 1, j - i - 1));
        i = j + 1;
        continue;
      }
    }
    out.push_back(body[i++]);
  }
  return out;
}

}  // namespace

const char* template_name(TemplateId id) {
  switch (id) {
    case TemplateId::rephrasing: return "rephrasing";
    case TemplateId::example_synthesis: return "example_synthesis";
    case TemplateId::shorthand_rewrite: return "shorthand_rewrite";
    case TemplateId::selection_judge: return "selection_judge";
    case TemplateId::evaluation_judge: return "evaluation_judge";
  }
  return "rephrasing";
}

std::optional<TemplateId> parse_template_id(std::string_view name) {
  for (auto id : {TemplateId::rephrasing, TemplateId::example_synthesis, TemplateId::shorthand_rewrite,
                  TemplateId::selection_judge, TemplateId::evaluation_judge})
    if (name == template_name(id)) return id;
  return std::nullopt;
}

const std::string& template_body(TemplateId id) {
  switch (id) {
    case TemplateId::rephrasing: return kRephrasing;
    case TemplateId::example_synthesis: return kExampleSynthesis;
    case TemplateId::shorthand_rewrite: return kShorthandRewrite;
    case TemplateId::selection_judge: return kSelectionJudge;
    case TemplateId::evaluation_judge: return kEvaluationJudge;
  }
  return kRephrasing;
}

std::vector<std::string> template_placeholders(TemplateId id) {
  std::vector<std::string> names;
  substitute(template_body(id), [&](const std::string& name) {
    if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
    return std::string();
  });
  return names;
}

std::string render_template(TemplateId id, const Variables& vars) {
  return substitute(template_body(id), [&](const std::string& name) -> std::string {
    auto it = vars.find(name);
    if (it == vars.end())
      throw TemplateError(std::string("template '") + template_name(id) + "' placeholder '{" + name + "}' is unbound");
    return it->second;
  });
}

std::vector<std::string> extract_tags(std::string_view text, std::string_view tag) {
  const std::string open = "<" + std::string(tag) + ">";
  const std::string close = "</" + std::string(tag) + ">";
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto b = text.find(open, pos);
    if (b == std::string_view::npos) break;
    const auto start = b + open.size();
    const auto e = text.find(close, start);
    if (e == std::string_view::npos) break;
    out.emplace_back(trim(text.substr(start, e - start)));
    pos = e + close.size();
  }
  return out;
}

std::optional<int> parse_score_tag(std::string_view text) {
  const auto tags = extract_tags(text, "score");
  if (tags.size() != 1) return std::nullopt;
  if (tags[0] == "1" || tags[0] == "+1") return 1;
  if (tags[0] == "0") return 0;
  if (tags[0] == "-1") return -1;
  return std::nullopt;
}

std::optional<int> parse_label_tag(std::string_view text) {
  const auto tags = extract_tags(text, "label");
  if (tags.size() != 1) return std::nullopt;
  std::string v = upper_ascii(tags[0]);
  for (char& c : v)
    if (c == '_' || c == '-') c = ' ';
  if (v == "RELEVANT") return 2;
  if (v == "PARTIAL RELEVANT" || v == "PARTIALLY RELEVANT") return 1;
  if (v == "IRRELEVANT" || v == "NOT RELEVANT") return 0;
  return std::nullopt;
}

void validate_response(TemplateId id, std::string_view text) {
  auto fail = [&](const std::string& why) {
    throw ResponseFormatError(std::string(template_name(id)) + " response: " + why, std::string(text));
  };
  switch (id) {
    case TemplateId::rephrasing:
    case TemplateId::example_synthesis: {
      const char* tag = id == TemplateId::rephrasing ? "refinement" : "testcase";
      const auto parts = extract_tags(text, tag);
      if (parts.size() != 3) fail("expected 3 <" + std::string(tag) + "> segments, got " + std::to_string(parts.size()));
      for (const auto& p : parts)
        if (p.empty()) fail("empty <" + std::string(tag) + "> segment");
      return;
    }
    case TemplateId::shorthand_rewrite: {
      const auto parts = extract_tags(text, "shorthand");
      if (parts.size() != 1) fail("expected exactly one <shorthand> tag");
      try {
        parse_shorthand(parts[0]);
      } catch (const FormatError& e) {
        fail(e.what());
      }
      return;
    }
    case TemplateId::selection_judge:
      if (!parse_score_tag(text)) fail("missing or invalid <score> tag");
      return;
    case TemplateId::evaluation_judge:
      if (!parse_label_tag(text)) fail("missing or invalid <label> tag");
      return;
  }
}

}  // namespace bb
