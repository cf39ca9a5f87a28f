#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bb {

enum class TemplateId { rephrasing, example_synthesis, shorthand_rewrite, selection_judge, evaluation_judge };

using Variables = std::map<std::string, std::string>;

const char* template_name(TemplateId id);
std::optional<TemplateId> parse_template_id(std::string_view name);

// Raw body with `{name}` placeholders.
const std::string& template_body(TemplateId id);

// Placeholder names in order of first appearance.
std::vector<std::string> template_placeholders(TemplateId id);

// Fills every placeholder; TemplateError if one is unbound.
std::string render_template(TemplateId id, const Variables& vars);

// Contents of every <tag>...</tag> in order, trimmed.
std::vector<std::string> extract_tags(std::string_view text, std::string_view tag);

// The single <score> value in {1, 0, -1}, or nullopt.
std::optional<int> parse_score_tag(std::string_view text);

// The single <label> value: 2 relevant, 1 partially relevant, 0 irrelevant.
std::optional<int> parse_label_tag(std::string_view text);

// Throws ResponseFormatError when `text` is not a well-formed answer for the
// template (wrong tag count, bad score, unknown label, grammar violation).
void validate_response(TemplateId id, std::string_view text);

}  // namespace bb
