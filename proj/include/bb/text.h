#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bb {

// Lowercased word tokens. Words are maximal runs of alphanumeric code points;
// everything else (ASCII punctuation, whitespace, Unicode punctuation blocks)
// separates. Invalid UTF-8 bytes are treated as separators.
std::vector<std::string> tokenize(std::string_view text);

// Lowercase a UTF-8 string (ASCII, Latin-1, Greek, Cyrillic).
std::string to_lower_utf8(std::string_view text);

bool is_snake_token(std::string_view token);

// FNV-1a, 64 bit, with an extra seed folded into the offset basis.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0);

}  // namespace bb
