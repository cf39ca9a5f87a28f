#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace bb {

// `skill & key1 & key2 & key3`, trailing keys optional.
struct Shorthand {
  std::string skill;
  std::vector<std::string> keys;  // 0..3

  bool operator==(const Shorthand&) const = default;
};

inline constexpr std::size_t kMaxShorthandKeys = 3;

// Tokens are lowercased and inner whitespace runs become underscores; after
// that every token must match [a-z0-9_]+. FormatError otherwise, or when the
// skill is empty or there are more than three keys.
Shorthand parse_shorthand(std::string_view text);

// Canonical form with single spaces around each ampersand.
std::string render_shorthand(const Shorthand& sh);

}  // namespace bb
