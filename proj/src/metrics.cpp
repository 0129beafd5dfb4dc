#include "aqs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "aqs/text.hpp"

namespace aqs {

namespace {

// n-gram multiset as joined-token keys; '\x1f' cannot appear in normalized
// tokens, so the join is injective.
std::map<std::string, long> ngram_counts(const std::vector<std::string>& toks,
                                         int n) {
  std::map<std::string, long> counts;
  if (static_cast<int>(toks.size()) < n) return counts;
  for (size_t i = 0; i + n <= toks.size(); ++i) {
    std::string key = toks[i];
    for (int j = 1; j < n; ++j) {
      key += '\x1f';
      key += toks[i + j];
    }
    ++counts[key];
  }
  return counts;
}

double f1(double p, double r) {
  if (p + r == 0.0) return 0.0;
  return 2.0 * p * r / (p + r);
}

}  // namespace

double rouge_n(const std::string& prediction, const std::string& reference,
               int n) {
  if (n != 1 && n != 2) throw Error("rouge_n supports n = 1 or 2");
  auto pred = ngram_counts(text::norm_tokens(prediction), n);
  auto ref = ngram_counts(text::norm_tokens(reference), n);
  long pred_total = 0;
  for (const auto& [k, c] : pred) pred_total += c;
  long ref_total = 0;
  for (const auto& [k, c] : ref) ref_total += c;
  if (pred_total == 0 && ref_total == 0) return 1.0;
  if (pred_total == 0 || ref_total == 0) return 0.0;
  long overlap = 0;
  for (const auto& [k, c] : pred) {
    auto it = ref.find(k);
    if (it != ref.end()) overlap += std::min(c, it->second);
  }
  return f1(static_cast<double>(overlap) / static_cast<double>(pred_total),
            static_cast<double>(overlap) / static_cast<double>(ref_total));
}

double rouge_l(const std::string& prediction, const std::string& reference) {
  std::vector<std::string> a = text::norm_tokens(prediction);
  std::vector<std::string> b = text::norm_tokens(reference);
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  // Two-row LCS dynamic program.
  std::vector<long> prev(b.size() + 1, 0);
  std::vector<long> cur(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      if (a[i - 1] == b[j - 1]) {
        cur[j] = prev[j - 1] + 1;
      } else {
        cur[j] = std::max(prev[j], cur[j - 1]);
      }
    }
    std::swap(prev, cur);
  }
  double lcs = static_cast<double>(prev[b.size()]);
  return f1(lcs / static_cast<double>(a.size()),
            lcs / static_cast<double>(b.size()));
}

namespace {

double cosine(const Embedding& a, const Embedding& b) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (size_t i = 0; i < a.values.size() && i < b.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
  }
  for (double v : a.values) na += v * v;
  for (double v : b.values) nb += v * v;
  if (na <= 0.0 || nb <= 0.0) {
    throw DegenerateEmbedding("zero-norm token embedding");
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

double mean_max_cosine(const std::vector<Embedding>& from,
                       const std::vector<Embedding>& to) {
  double sum = 0.0;
  for (const Embedding& f : from) {
    double best = -2.0;
    for (const Embedding& t : to) best = std::max(best, cosine(f, t));
    sum += best;
  }
  return sum / static_cast<double>(from.size());
}

}  // namespace

double greedy_embed_match(const std::string& prediction,
                          const std::string& reference,
                          EmbedderBackend& embedder) {
  std::vector<Embedding> pred = embedder.embed_tokens(prediction);
  std::vector<Embedding> ref = embedder.embed_tokens(reference);
  if (pred.empty() || ref.empty()) {
    throw EmptyInput("greedy_embed_match: empty token sequence");
  }
  return f1(mean_max_cosine(pred, ref), mean_max_cosine(ref, pred));
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) {
    throw LengthMismatch("pearson: series lengths differ");
  }
  if (xs.size() < 2) {
    throw LengthMismatch("pearson: need at least two points");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw ZeroVariance("pearson: constant series");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double sentiment_consistency(const std::vector<EvalRecord>& records) {
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(records.size());
  ys.reserve(records.size());
  for (const EvalRecord& r : records) {
    xs.push_back(r.sentiment_src);
    ys.push_back(r.sentiment_pred);
  }
  return pearson(xs, ys);
}

double redundancy(const std::string& text_in,
                  const std::string& relevant_reference) {
  std::vector<std::string> toks = text::norm_tokens(text_in);
  if (toks.empty()) return 0.0;
  std::set<std::string> ref_set;
  for (auto& t : text::norm_tokens(relevant_reference)) {
    ref_set.insert(std::move(t));
  }
  long hits = 0;
  for (const std::string& t : toks) {
    if (ref_set.count(t)) ++hits;
  }
  return 1.0 -
         static_cast<double>(hits) / static_cast<double>(toks.size());
}

double effective_query_rate(const std::vector<Answer>& answers,
                            const std::string& gold, double threshold) {
  if (answers.empty()) return 0.0;
  long effective = 0;
  for (const Answer& a : answers) {
    if (rouge_l(a.text, gold) >= threshold) ++effective;
  }
  return static_cast<double>(effective) /
         static_cast<double>(answers.size());
}

MajoritySimResult simulate_majority_success(const MajoritySimConfig& config) {
  if (config.success_prob < 0.0 || config.success_prob > 1.0) {
    throw Error("success_prob must lie in [0, 1]");
  }
  if (config.queries_per_doc < 1 || config.trials < 1) {
    throw Error("queries_per_doc and trials must be positive");
  }
  std::mt19937_64 rng(config.rng_seed);
  // Uniform draw pinned to (x >> 11) * 2^-53 so results are identical across
  // standard libraries; std::uniform_real_distribution is not portable.
  auto draw = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  MajoritySimResult result;
  long successes = 0;
  const int k = config.queries_per_doc;
  for (long t = 0; t < config.trials; ++t) {
    int count = 0;
    for (int i = 0; i < k; ++i) {
      if (draw() < config.success_prob) ++count;
    }
    ++result.histogram[count];
    if (2 * count > k) ++successes;
  }
  result.rate =
      static_cast<double>(successes) / static_cast<double>(config.trials);
  return result;
}

}  // namespace aqs
