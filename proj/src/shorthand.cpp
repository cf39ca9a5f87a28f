#include "bb/shorthand.h"

#include "bb/errors.h"
#include "bb/text.h"

namespace bb {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::string normalize_token(std::string_view part, std::string_view whole) {
  std::size_t b = 0, e = part.size();
  while (b < e && is_space(part[b])) ++b;
  while (e > b && is_space(part[e - 1])) --e;
  std::string out;
  bool pending_gap = false;
  for (std::size_t i = b; i < e; ++i) {
    char c = part[i];
    if (is_space(c)) {
      pending_gap = true;
      continue;
    }
    if (pending_gap) {
      out.push_back('_');
      pending_gap = false;
    }
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    out.push_back(c);
  }
  if (out.empty()) throw FormatError("shorthand has an empty component: '" + std::string(whole) + "'", std::string(whole));
  if (!is_snake_token(out))
    throw FormatError("shorthand component '" + out + "' has illegal characters", std::string(whole));
  return out;
}

}  // namespace

Shorthand parse_shorthand(std::string_view text) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t amp = text.find('&', pos);
    const std::string_view part = text.substr(pos, amp == std::string_view::npos ? std::string_view::npos : amp - pos);
    parts.push_back(normalize_token(part, text));
    if (amp == std::string_view::npos) break;
    pos = amp + 1;
  }
  if (parts.size() - 1 > kMaxShorthandKeys)
    throw FormatError("shorthand has " + std::to_string(parts.size() - 1) + " keys (max 3): '" + std::string(text) + "'",
                      std::string(text));
  Shorthand sh;
  sh.skill = std::move(parts.front());
  sh.keys.assign(std::make_move_iterator(parts.begin() + 1), std::make_move_iterator(parts.end()));
  return sh;
}

std::string render_shorthand(const Shorthand& sh) {
  std::string out = sh.skill;
  for (const auto& k : sh.keys) {
    out += " & ";
    out += k;
  }
  return out;
}

}  // namespace bb
