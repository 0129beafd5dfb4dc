#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "aqs/backends.hpp"

namespace aqs {

// Table-driven scorer. Lookup key is the exact (query, prefix) pair; any
// pair absent from the table yields the documented default of probability
// 1.0 on the end-of-sequence token, so every generation terminates.
class MockScorer : public ScorerBackend {
 public:
  using Key = std::pair<std::string, std::vector<int>>;
  using Table = std::map<Key, TokenDistribution>;

  // Minimal vocabulary: just the end-of-sequence token (id 0), empty table.
  MockScorer();

  // vocab must contain exactly one "</s>" entry and no duplicate ids; every
  // table entry must reference known ids and sum to 1 within 1e-9. Violations
  // throw VocabularyMismatch.
  MockScorer(std::vector<Token> vocab, Table table);

  TokenDistribution score_next_tokens(const std::string& query,
                                      const std::vector<int>& prefix) override;
  int eos_id() const override { return eos_id_; }
  std::string surface(int token_id) const override;

 private:
  std::map<int, std::string> vocab_;
  int eos_id_ = 0;
  Table table_;
};

// Extractive QA: returns the context sentence with the largest count of
// distinct query unigrams, earliest sentence on ties. raw_score carries the
// winning overlap count. A context without sentences yields an abstention.
class MockQa : public QaBackend {
 public:
  Answer answer_question(const std::string& query,
                         const std::string& context) override;
};

// Hashed bag-of-words embedder: FNV-1a 64-bit over each normalized token,
// bucketed into a fixed 64-dim count vector, L2-normalized. Non-empty text
// that normalizes to zero tokens is hashed whole, so it still embeds;
// empty text embeds to the zero vector.
class MockEmbedder : public EmbedderBackend {
 public:
  static constexpr int kDim = 64;

  Embedding embed_text(const std::string& text) override;
  std::vector<Embedding> embed_tokens(const std::string& text) override;
  int dim() const override { return kDim; }

  // Bucket index a single token hashes to. Exposed for collision audits.
  static int bucket(const std::string& token);
};

// First sentence of the text, truncated to 30 whitespace tokens.
class MockSummarizer : public SummarizerBackend {
 public:
  static constexpr int kMaxTokens = 30;

  std::string summarize_text(const std::string& text) override;
};

// Lexicon sentiment: (positive hits - negative hits) / max(1, token count)
// over a fixed list of 20 positive and 20 negative words.
class MockSentiment : public SentimentBackend {
 public:
  double sentiment_score(const std::string& text) override;
};

// Full mock suite; scorer defaults to the end-of-sequence-only MockScorer.
BackendSuite make_mock_suite();
BackendSuite make_mock_suite(std::vector<Token> vocab, MockScorer::Table table);

}  // namespace aqs
