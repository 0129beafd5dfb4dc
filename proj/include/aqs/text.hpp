#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace aqs::text {

// Normalizes text for lexical metrics and mock backends: ASCII letters and
// digits are lowercased, ASCII punctuation is removed without breaking the
// token, bytes >= 0x80 pass through unchanged, and whitespace separates
// tokens. "It's 5pm." -> {"its", "5pm"}.
std::vector<std::string> norm_tokens(std::string_view text);

// Splits on '.', '!', '?' keeping the delimiter with its sentence; trims
// surrounding whitespace; drops empty pieces. Trailing text without a
// terminal mark forms a final sentence.
std::vector<std::string> split_sentences(std::string_view text);

// Plain whitespace split, no normalization.
std::vector<std::string> ws_split(std::string_view text);

// True when the text, ignoring trailing whitespace, ends with '.', '!' or '?'.
bool has_terminal_punct(std::string_view text);

// Joins member texts for a merged answer group: inserts ". " after a member
// lacking terminal punctuation and a single space otherwise.
std::string join_group(const std::vector<std::string>& texts);

}  // namespace aqs::text
