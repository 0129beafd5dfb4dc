#include "aqs/text.hpp"

#include <cctype>

namespace aqs::text {

namespace {

bool is_ascii_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_ascii_alnum(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z');
}

}  // namespace

std::vector<std::string> norm_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (c < 0x80) {
      if (is_ascii_alnum(c)) {
        cur.push_back(static_cast<char>(std::tolower(c)));
      } else if (is_ascii_space(c)) {
        if (!cur.empty()) {
          out.push_back(std::move(cur));
          cur.clear();
        }
      }
      // ASCII punctuation is dropped without ending the token.
    } else {
      cur.push_back(static_cast<char>(c));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && is_ascii_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_ascii_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> sents;
  size_t start = 0;
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '.' || c == '!' || c == '?') {
      std::string_view piece = trim(text.substr(start, i + 1 - start));
      if (!piece.empty()) sents.emplace_back(piece);
      start = i + 1;
    }
  }
  std::string_view tail = trim(text.substr(start));
  if (!tail.empty()) sents.emplace_back(tail);
  return sents;
}

std::vector<std::string> ws_split(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (c < 0x80 && is_ascii_space(c)) {
      if (!cur.empty()) {
        out.push_back(std::move(cur));
        cur.clear();
      }
    } else {
      cur.push_back(static_cast<char>(c));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool has_terminal_punct(std::string_view text) {
  std::string_view t = trim(text);
  if (t.empty()) return false;
  char c = t.back();
  return c == '.' || c == '!' || c == '?';
}

std::string join_group(const std::vector<std::string>& texts) {
  std::string out;
  for (size_t i = 0; i < texts.size(); ++i) {
    if (i > 0) out += has_terminal_punct(texts[i - 1]) ? " " : ". ";
    out += texts[i];
  }
  return out;
}

}  // namespace aqs::text
