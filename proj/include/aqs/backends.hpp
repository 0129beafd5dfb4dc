#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "aqs/errors.hpp"

namespace aqs {

// Surface string designating the end-of-sequence token in every vocabulary.
inline constexpr const char* kEosSurface = "</s>";

// One vocabulary entry. Ids are unique within a vocabulary; exactly one
// token carries the end-of-sequence surface.
struct Token {
  int id = 0;
  std::string surface;
};

// Next-token distribution: token id -> probability. Probabilities sum to 1
// within 1e-9 over the scorer's full vocabulary. The ordered map keeps
// iteration deterministic.
using TokenDistribution = std::map<int, double>;

// One QA extraction. Empty text is a valid abstention and is filtered before
// clustering. source_query_index addresses the query list the pipeline sent
// to QA.
struct Answer {
  std::string text;
  int source_query_index = 0;
  std::optional<double> raw_score;

  bool operator==(const Answer& other) const = default;
};

// Fixed-length real vector. All embeddings from one backend share dim().
struct Embedding {
  std::vector<double> values;

  int dim() const { return static_cast<int>(values.size()); }
};

// Scores the next token given the original query and a generation prefix.
class ScorerBackend {
 public:
  virtual ~ScorerBackend() = default;

  // Distribution over the full vocabulary. prefix holds content token ids
  // only (never the end-of-sequence token). Throws VocabularyMismatch for
  // unknown prefix ids, EmptyInput for an empty query, BackendUnavailable on
  // transport failure.
  virtual TokenDistribution score_next_tokens(
      const std::string& query, const std::vector<int>& prefix) = 0;

  // Id of the end-of-sequence token.
  virtual int eos_id() const = 0;

  // Surface form for a vocabulary id; VocabularyMismatch if unknown.
  virtual std::string surface(int token_id) const = 0;

  // Joins content-token surfaces into a paraphrase string. Default:
  // single-space join; real backends may substitute their own detokenizer.
  virtual std::string detokenize(const std::vector<std::string>& surfaces) const;
};

// Extracts an answer span for a query from a context.
class QaBackend {
 public:
  virtual ~QaBackend() = default;

  // Both arguments non-empty. Empty Answer.text signals abstention. The
  // caller owns source_query_index.
  virtual Answer answer_question(const std::string& query,
                                 const std::string& context) = 0;
};

// Produces text and per-token embeddings.
class EmbedderBackend {
 public:
  virtual ~EmbedderBackend() = default;

  // Deterministic: identical inputs yield identical embeddings.
  virtual Embedding embed_text(const std::string& text) = 0;

  // One embedding per whitespace-delimited token; empty text -> empty.
  virtual std::vector<Embedding> embed_tokens(const std::string& text) = 0;

  virtual int dim() const = 0;
};

// Produces an abstractive summary of a text.
class SummarizerBackend {
 public:
  virtual ~SummarizerBackend() = default;

  // text must contain non-whitespace content; throws EmptyInput otherwise.
  virtual std::string summarize_text(const std::string& text) = 0;
};

// Scores sentiment in [-1, 1].
class SentimentBackend {
 public:
  virtual ~SentimentBackend() = default;

  virtual double sentiment_score(const std::string& text) = 0;
};

// The five pluggable capabilities the pipeline composes.
struct BackendSuite {
  std::shared_ptr<ScorerBackend> scorer;
  std::shared_ptr<QaBackend> qa;
  std::shared_ptr<EmbedderBackend> embedder;
  std::shared_ptr<SummarizerBackend> summarizer;
  std::shared_ptr<SentimentBackend> sentiment;
};

}  // namespace aqs
