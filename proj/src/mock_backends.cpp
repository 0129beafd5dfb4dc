#include "aqs/mock_backends.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <set>
#include <unordered_set>

#include "aqs/text.hpp"

namespace aqs {

MockScorer::MockScorer() {
  vocab_[0] = kEosSurface;
  eos_id_ = 0;
}

MockScorer::MockScorer(std::vector<Token> vocab, Table table)
    : table_(std::move(table)) {
  int eos_count = 0;
  for (const Token& t : vocab) {
    if (!vocab_.emplace(t.id, t.surface).second) {
      throw VocabularyMismatch("duplicate token id " + std::to_string(t.id));
    }
    if (t.surface == kEosSurface) {
      eos_id_ = t.id;
      ++eos_count;
    }
  }
  if (eos_count != 1) {
    throw VocabularyMismatch("vocabulary must contain exactly one " +
                             std::string(kEosSurface) + " token, found " +
                             std::to_string(eos_count));
  }
  for (const auto& [key, dist] : table_) {
    double sum = 0.0;
    for (const auto& [id, p] : dist) {
      if (!vocab_.count(id)) {
        throw VocabularyMismatch("table distribution references unknown id " +
                                 std::to_string(id));
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw VocabularyMismatch("table distribution sums to " +
                               std::to_string(sum));
    }
  }
}

TokenDistribution MockScorer::score_next_tokens(const std::string& query,
                                                const std::vector<int>& prefix) {
  if (query.empty()) throw EmptyInput("score_next_tokens: empty query");
  for (int id : prefix) {
    if (!vocab_.count(id)) {
      throw VocabularyMismatch("prefix token id " + std::to_string(id) +
                               " not in vocabulary");
    }
    if (id == eos_id_) {
      throw VocabularyMismatch("prefix contains the end-of-sequence token");
    }
  }
  auto it = table_.find(Key(query, prefix));
  if (it != table_.end()) return it->second;
  return TokenDistribution{{eos_id_, 1.0}};
}

std::string MockScorer::surface(int token_id) const {
  auto it = vocab_.find(token_id);
  if (it == vocab_.end()) {
    throw VocabularyMismatch("unknown token id " + std::to_string(token_id));
  }
  return it->second;
}

Answer MockQa::answer_question(const std::string& query,
                               const std::string& context) {
  if (query.empty()) throw EmptyInput("answer_question: empty query");
  if (context.empty()) throw EmptyInput("answer_question: empty context");
  std::set<std::string> query_tokens;
  for (auto& t : text::norm_tokens(query)) query_tokens.insert(std::move(t));

  Answer best;
  long best_overlap = -1;
  for (const std::string& sentence : text::split_sentences(context)) {
    std::set<std::string> seen;
    long overlap = 0;
    for (const std::string& t : text::norm_tokens(sentence)) {
      if (query_tokens.count(t) && seen.insert(t).second) ++overlap;
    }
    if (overlap > best_overlap) {
      best.text = sentence;
      best.raw_score = static_cast<double>(overlap);
      best_overlap = overlap;
    }
  }
  // No sentences at all: abstain with empty text.
  return best;
}

int MockEmbedder::bucket(const std::string& token) {
  constexpr uint64_t kOffset = 14695981039346656037ull;
  constexpr uint64_t kPrime = 1099511628211ull;
  uint64_t h = kOffset;
  for (unsigned char b : token) {
    h ^= b;
    h *= kPrime;
  }
  return static_cast<int>(h % kDim);
}

Embedding MockEmbedder::embed_text(const std::string& text_in) {
  std::vector<std::string> toks = text::norm_tokens(text_in);
  if (toks.empty() && !text_in.empty()) toks.push_back(text_in);
  Embedding e;
  e.values.assign(kDim, 0.0);
  for (const std::string& t : toks) e.values[bucket(t)] += 1.0;
  double norm = 0.0;
  for (double v : e.values) norm += v * v;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (double& v : e.values) v /= norm;
  }
  return e;
}

std::vector<Embedding> MockEmbedder::embed_tokens(const std::string& text_in) {
  std::vector<Embedding> out;
  for (const std::string& tok : text::ws_split(text_in)) {
    out.push_back(embed_text(tok));
  }
  return out;
}

std::string MockSummarizer::summarize_text(const std::string& text_in) {
  std::vector<std::string> sentences = text::split_sentences(text_in);
  if (sentences.empty()) throw EmptyInput("summarize_text: no content");
  const std::string& first = sentences.front();
  std::vector<std::string> toks = text::ws_split(first);
  if (static_cast<int>(toks.size()) <= kMaxTokens) return first;
  std::string out;
  for (int i = 0; i < kMaxTokens; ++i) {
    if (i > 0) out += ' ';
    out += toks[i];
  }
  return out;
}

double MockSentiment::sentiment_score(const std::string& text_in) {
  static const std::unordered_set<std::string> kPositive = {
      "good",      "great",   "excellent", "happy",    "pleased",
      "satisfied", "helpful", "friendly",  "prompt",   "clean",
      "reliable",  "smooth",  "wonderful", "fantastic", "awesome",
      "love",      "nice",    "perfect",   "improved", "resolved"};
  static const std::unordered_set<std::string> kNegative = {
      "bad",     "poor",      "terrible",  "awful",          "angry",
      "upset",   "unsatisfactory", "broken", "dirty",        "late",
      "rude",    "noisy",     "leak",      "problem",        "complaint",
      "damaged", "faulty",    "unreliable", "horrible",      "hate"};

  std::vector<std::string> toks = text::norm_tokens(text_in);
  long pos = 0;
  long neg = 0;
  for (const std::string& t : toks) {
    if (kPositive.count(t)) ++pos;
    if (kNegative.count(t)) ++neg;
  }
  long denom = toks.size() > 0 ? static_cast<long>(toks.size()) : 1;
  return static_cast<double>(pos - neg) / static_cast<double>(denom);
}

BackendSuite make_mock_suite() {
  BackendSuite suite;
  suite.scorer = std::make_shared<MockScorer>();
  suite.qa = std::make_shared<MockQa>();
  suite.embedder = std::make_shared<MockEmbedder>();
  suite.summarizer = std::make_shared<MockSummarizer>();
  suite.sentiment = std::make_shared<MockSentiment>();
  return suite;
}

BackendSuite make_mock_suite(std::vector<Token> vocab,
                             MockScorer::Table table) {
  BackendSuite suite = make_mock_suite();
  suite.scorer = std::make_shared<MockScorer>(std::move(vocab),
                                              std::move(table));
  return suite;
}

}  // namespace aqs
