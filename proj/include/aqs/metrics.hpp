#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aqs/backends.hpp"

namespace aqs {

struct RougeScores {
  double r1 = 0.0;
  double r2 = 0.0;
  double rl = 0.0;
};

// One evaluated item. When prediction is non-empty all metric fields are
// filled; error marks items whose pipeline run failed.
struct EvalRecord {
  std::string query;
  std::string context;
  std::string reference;
  std::string prediction;
  RougeScores rouge;
  std::optional<double> embed_match;
  double sentiment_src = 0.0;
  double sentiment_pred = 0.0;
  std::optional<std::string> error;
};

struct MajoritySimConfig {
  double success_prob = 0.5;  // p in [0, 1]
  int queries_per_doc = 25;   // k >= 1
  long trials = 100000;
  std::uint64_t rng_seed = 0;
};

struct MajoritySimResult {
  double rate = 0.0;
  std::map<int, long> histogram;  // per-trial success count -> trial count
};

// F1 over clipped n-gram multiset overlap after lowercasing and punctuation
// stripping. Both n-gram multisets empty -> 1.0; exactly one empty -> 0.0.
// n must be 1 or 2.
double rouge_n(const std::string& prediction, const std::string& reference,
               int n);

// F1 from longest-common-subsequence length over normalized tokens:
// P = LCS/|prediction|, R = LCS/|reference|. Empty rules as rouge_n.
double rouge_l(const std::string& prediction, const std::string& reference);

// Greedy token-matching F1: P is the mean over prediction tokens of the
// maximum cosine to any reference token (via embed_tokens); R symmetric.
// Throws EmptyInput when either side has no tokens, DegenerateEmbedding on
// zero-norm token vectors.
double greedy_embed_match(const std::string& prediction,
                          const std::string& reference,
                          EmbedderBackend& embedder);

// Sample Pearson correlation, clamped to [-1, 1]. Throws LengthMismatch for
// unequal or shorter-than-2 series, ZeroVariance when a series is constant.
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

// Pearson over (sentiment_src, sentiment_pred) pairs of the records.
double sentiment_consistency(const std::vector<EvalRecord>& records);

// 1 - (text unigram instances present in the reference token set / text
// unigram count), after normalization; 0.0 when the text has no unigrams.
double redundancy(const std::string& text, const std::string& relevant_reference);

// Fraction of answers with rouge_l(answer.text, gold) >= threshold.
double effective_query_rate(const std::vector<Answer>& answers,
                            const std::string& gold, double threshold);

// Monte Carlo check of the majority-vote argument: each trial draws k
// success/failure outcomes with probability p and succeeds when successes
// form a strict majority (> k/2). Deterministic for a fixed seed, including
// across platforms: draws come from mt19937_64 mapped to [0, 1) as
// (x >> 11) * 2^-53.
MajoritySimResult simulate_majority_success(const MajoritySimConfig& config);

}  // namespace aqs
