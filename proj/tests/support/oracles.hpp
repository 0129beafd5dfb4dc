#pragma once

// Reference computations for tests, derived independently of the library so
// results are checked against a second implementation rather than against
// themselves. Everything here trades speed for obviousness.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace oracles {

// ---------------------------------------------------------------------------
// Scripted scorer tables (query-independent form used by beam tests).
// ---------------------------------------------------------------------------

struct ScriptTable {
  // id -> surface; must contain eos_id.
  std::map<int, std::string> vocab;
  int eos_id = 0;
  // prefix -> (token id -> probability); prefixes absent from the map are
  // understood as "ends with certainty" (all mass on eos).
  std::map<std::vector<int>, std::map<int, double>> rows;
};

struct RankedSeq {
  std::vector<int> content;  // token ids, eos excluded
  double logp = 0.0;
};

inline bool ranked_before(const RankedSeq& a, const RankedSeq& b) {
  if (a.logp != b.logp) {
    return a.logp > b.logp;
  }
  return a.content < b.content;
}

// Every complete sequence of the model, by exhaustive tree walk. Recursion
// ends because unlisted prefixes put all mass on eos. depth_guard caps
// runaway tables (tests only, never hit by well-formed fixtures).
inline void enumerate_walk(const ScriptTable& t, std::vector<int>& prefix,
                           double logp, int depth_guard,
                           std::vector<RankedSeq>& out) {
  std::map<int, double> dist;
  auto it = t.rows.find(prefix);
  if (it != t.rows.end()) {
    dist = it->second;
  } else {
    dist[t.eos_id] = 1.0;
  }
  for (const auto& [tok, p] : dist) {
    if (p <= 0.0) {
      continue;
    }
    if (tok == t.eos_id) {
      out.push_back(RankedSeq{prefix, logp + std::log(p)});
    } else if (depth_guard > 0) {
      prefix.push_back(tok);
      enumerate_walk(t, prefix, logp + std::log(p), depth_guard - 1, out);
      prefix.pop_back();
    }
  }
}

inline std::vector<RankedSeq> enumerate_complete(const ScriptTable& t,
                                                 int depth_guard = 16) {
  std::vector<RankedSeq> out;
  std::vector<int> prefix;
  enumerate_walk(t, prefix, 0.0, depth_guard, out);
  std::sort(out.begin(), out.end(), ranked_before);
  return out;
}

// Keeps the sequences with fewer than n strictly better scores (the
// documented selection rule applied to a ranked list; ties may exceed n).
inline std::vector<RankedSeq> top_by_strict_count(
    const std::vector<RankedSeq>& ranked, int n) {
  std::vector<RankedSeq> out;
  for (const auto& s : ranked) {
    int better = 0;
    for (const auto& o : ranked) {
      if (o.logp > s.logp) {
        ++better;
      }
    }
    if (better < n) {
      out.push_back(s);
    }
  }
  return out;
}

// Replays the documented beam rules with plain index loops and parallel
// arrays, as a structural counter-model to the library implementation.
inline std::vector<RankedSeq> beam_rules_replay(const ScriptTable& t, int n,
                                                int max_length) {
  std::vector<std::vector<int>> seqs = {{}};
  std::vector<double> scores = {0.0};
  std::vector<bool> done = {false};

  auto all_done = [&] {
    for (bool d : done) {
      if (!d) {
        return false;
      }
    }
    return true;
  };

  int guard = max_length + 2;
  while (!all_done() && guard-- > 0) {
    // Force-terminate at the cap before expanding.
    for (size_t i = 0; i < seqs.size(); ++i) {
      if (!done[i] && static_cast<int>(seqs[i].size()) >= max_length) {
        done[i] = true;  // eos appended implicitly; content ends here
      }
    }
    std::vector<std::vector<int>> next_seqs;
    std::vector<double> next_scores;
    std::vector<bool> next_done;
    for (size_t i = 0; i < seqs.size(); ++i) {
      if (done[i]) {
        next_seqs.push_back(seqs[i]);
        next_scores.push_back(scores[i]);
        next_done.push_back(true);
        continue;
      }
      std::map<int, double> dist;
      auto it = t.rows.find(seqs[i]);
      if (it != t.rows.end()) {
        dist = it->second;
      } else {
        dist[t.eos_id] = 1.0;
      }
      for (const auto& [tok, p] : dist) {
        if (p <= 0.0) {
          continue;
        }
        if (tok == t.eos_id) {
          next_seqs.push_back(seqs[i]);
          next_scores.push_back(scores[i] + std::log(p));
          next_done.push_back(true);
        } else {
          auto child = seqs[i];
          child.push_back(tok);
          next_seqs.push_back(std::move(child));
          next_scores.push_back(scores[i] + std::log(p));
          next_done.push_back(false);
        }
      }
    }
    // Keep entries with fewer than n strictly greater scores.
    std::vector<std::vector<int>> kept_seqs;
    std::vector<double> kept_scores;
    std::vector<bool> kept_done;
    for (size_t i = 0; i < next_seqs.size(); ++i) {
      int better = 0;
      for (size_t j = 0; j < next_scores.size(); ++j) {
        if (next_scores[j] > next_scores[i]) {
          ++better;
        }
      }
      if (better < n) {
        kept_seqs.push_back(next_seqs[i]);
        kept_scores.push_back(next_scores[i]);
        kept_done.push_back(next_done[i]);
      }
    }
    seqs = std::move(kept_seqs);
    scores = std::move(kept_scores);
    done = std::move(kept_done);
  }

  std::vector<RankedSeq> out;
  for (size_t i = 0; i < seqs.size(); ++i) {
    out.push_back(RankedSeq{seqs[i], scores[i]});
  }
  std::stable_sort(out.begin(), out.end(), ranked_before);
  return out;
}

// ---------------------------------------------------------------------------
// Random scorer-table generators.
// ---------------------------------------------------------------------------

// Full probability tree of the given depth over non-eos tokens 1..vocab-1
// (id 0 is eos). Raw weights U[0.05, 1], normalized per row.
inline ScriptTable random_tree_table(std::mt19937& rng, int vocab_size,
                                     int depth, double eos_low,
                                     double eos_high) {
  ScriptTable t;
  t.eos_id = 0;
  t.vocab[0] = "</s>";
  for (int id = 1; id < vocab_size; ++id) {
    t.vocab[id] = std::string(1, static_cast<char>('a' + id - 1));
  }
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  const bool pin_eos = eos_high > 0.0;
  std::uniform_real_distribution<double> eos_mass(eos_low, eos_high);

  std::function<void(std::vector<int>&, int)> fill = [&](std::vector<int>&
                                                             prefix,
                                                         int remaining) {
    std::map<int, double> row;
    double total = 0.0;
    for (int id = 1; id < vocab_size; ++id) {
      row[id] = weight(rng);
      total += row[id];
    }
    if (pin_eos) {
      const double e = eos_mass(rng);
      for (auto& [id, w] : row) {
        w *= (1.0 - e) / total;
      }
      row[0] = e;
    } else {
      row[0] = weight(rng);
      total += row[0];
      for (auto& [id, w] : row) {
        w /= total;
      }
    }
    t.rows[prefix] = row;
    if (remaining > 1) {
      for (int id = 1; id < vocab_size; ++id) {
        prefix.push_back(id);
        fill(prefix, remaining - 1);
        prefix.pop_back();
      }
    }
  };
  std::vector<int> prefix;
  fill(prefix, depth);
  return t;
}

// Accepts a table only if the top complete sequences are separated widely
// enough that a beam of width <= 3 provably cannot displace them: with every
// row's eos mass >= eos_low, extending any prefix to a complete sequence
// costs at most -ln(eos_low), so gaps larger than that leave no room for a
// later overtake. The 1.02 factor and epsilon keep clear of float noise.
inline bool gap_separated(const ScriptTable& t, double eos_low) {
  const auto ranked = enumerate_complete(t);
  const double need = std::log(1.0 / eos_low) * 1.02 + 1e-6;
  const size_t top = std::min<size_t>(4, ranked.size());
  for (size_t i = 0; i + 1 < top; ++i) {
    if (ranked[i].logp - ranked[i + 1].logp < need) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Greedy agglomerative clustering oracle.
// ---------------------------------------------------------------------------

struct ClusterReplay {
  std::vector<std::vector<int>> groups;     // original answer indices
  std::vector<std::pair<int, int>> merges;  // group index pairs, in order
  int kept = -1;                            // index into groups of the result
  bool guard_held_before_final = true;      // max <= q*total before last merge
};

// texts: one per answer. embed_fn must accept any concatenation the merge
// order can produce. Joiner: ". " after members lacking terminal .!?
// punctuation, single space otherwise.
inline ClusterReplay greedy_cluster_replay(
    const std::vector<std::string>& texts,
    const std::function<std::vector<double>(const std::string&)>& embed_fn,
    double q) {
  ClusterReplay r;
  const int total = static_cast<int>(texts.size());
  std::vector<std::string> concat(texts);
  for (int i = 0; i < total; ++i) {
    r.groups.push_back({i});
  }

  auto joined = [&](const std::vector<int>& members) {
    std::string out;
    for (size_t m = 0; m < members.size(); ++m) {
      const std::string& piece = texts[members[m]];
      if (m > 0) {
        const std::string& prev = out;
        const char last = prev.empty() ? ' ' : prev.back();
        out += (last == '.' || last == '!' || last == '?') ? " " : ". ";
      }
      out += piece;
    }
    return out;
  };

  auto distance = [&](const std::string& a, const std::string& b) {
    const auto va = embed_fn(a);
    const auto vb = embed_fn(b);
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (size_t i = 0; i < va.size(); ++i) {
      dot += va[i] * vb[i];
      na += va[i] * va[i];
      nb += vb[i] * vb[i];
    }
    return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
  };

  auto max_size = [&] {
    size_t best = 0;
    for (const auto& g : r.groups) {
      best = std::max(best, g.size());
    }
    return static_cast<double>(best);
  };

  while (r.groups.size() > 1 && max_size() <= q * total) {
    int bi = -1;
    int bj = -1;
    double best = 0.0;
    for (size_t i = 0; i < r.groups.size(); ++i) {
      for (size_t j = i + 1; j < r.groups.size(); ++j) {
        const double d = distance(concat[i], concat[j]);
        if (bi < 0 || d < best) {
          best = d;
          bi = static_cast<int>(i);
          bj = static_cast<int>(j);
        }
      }
    }
    r.merges.emplace_back(bi, bj);
    for (int m : r.groups[bj]) {
      r.groups[bi].push_back(m);
    }
    r.groups.erase(r.groups.begin() + bj);
    concat[bi] = joined(r.groups[bi]);
    concat.erase(concat.begin() + bj);
  }

  // The loop condition held right up to the final merge by construction.
  r.guard_held_before_final = true;
  size_t best = 0;
  for (size_t i = 0; i < r.groups.size(); ++i) {
    if (r.groups[i].size() > r.groups[best].size()) {
      best = i;
    }
  }
  r.kept = static_cast<int>(best);
  return r;
}

// ---------------------------------------------------------------------------
// Lexical metric oracles.
// ---------------------------------------------------------------------------

// The documented normalization, built from scratch: ASCII lowercase, ASCII
// punctuation removed in place, whitespace split, multibyte bytes kept.
inline std::vector<std::string> norm_tokens(const std::string& text) {
  std::string cleaned;
  for (unsigned char c : text) {
    if (c >= 0x80) {
      cleaned += static_cast<char>(c);
    } else if (std::isalnum(c)) {
      cleaned += static_cast<char>(std::tolower(c));
    } else if (std::isspace(c)) {
      cleaned += ' ';
    }
    // ASCII punctuation: dropped, no separator added.
  }
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : cleaned) {
    if (c == ' ') {
      if (!cur.empty()) {
        tokens.push_back(cur);
        cur.clear();
      }
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) {
    tokens.push_back(cur);
  }
  return tokens;
}

inline double ngram_f1(const std::string& prediction,
                       const std::string& reference, int n) {
  const auto pt = norm_tokens(prediction);
  const auto rt = norm_tokens(reference);
  auto grams = [&](const std::vector<std::string>& toks) {
    std::map<std::vector<std::string>, int> counts;
    for (int i = 0; i + n <= static_cast<int>(toks.size()); ++i) {
      counts[std::vector<std::string>(toks.begin() + i,
                                      toks.begin() + i + n)] += 1;
    }
    return counts;
  };
  const auto pg = grams(pt);
  const auto rg = grams(rt);
  long ptotal = 0;
  long rtotal = 0;
  for (const auto& [g, c] : pg) {
    ptotal += c;
  }
  for (const auto& [g, c] : rg) {
    rtotal += c;
  }
  if (ptotal == 0 && rtotal == 0) {
    return 1.0;
  }
  if (ptotal == 0 || rtotal == 0) {
    return 0.0;
  }
  long clipped = 0;
  for (const auto& [g, c] : pg) {
    auto it = rg.find(g);
    if (it != rg.end()) {
      clipped += std::min(c, it->second);
    }
  }
  const double p = static_cast<double>(clipped) / ptotal;
  const double r = static_cast<double>(clipped) / rtotal;
  return (p + r == 0.0) ? 0.0 : 2.0 * p * r / (p + r);
}

// LCS by memoized recursion (the library uses an iterative rolling DP).
inline int lcs_memo(const std::vector<std::string>& a,
                    const std::vector<std::string>& b, size_t i, size_t j,
                    std::map<std::pair<size_t, size_t>, int>& memo) {
  if (i == a.size() || j == b.size()) {
    return 0;
  }
  const auto key = std::make_pair(i, j);
  auto it = memo.find(key);
  if (it != memo.end()) {
    return it->second;
  }
  int best;
  if (a[i] == b[j]) {
    best = 1 + lcs_memo(a, b, i + 1, j + 1, memo);
  } else {
    best = std::max(lcs_memo(a, b, i + 1, j, memo),
                    lcs_memo(a, b, i, j + 1, memo));
  }
  memo[key] = best;
  return best;
}

inline double lcs_f1(const std::string& prediction,
                     const std::string& reference) {
  const auto pt = norm_tokens(prediction);
  const auto rt = norm_tokens(reference);
  if (pt.empty() && rt.empty()) {
    return 1.0;
  }
  if (pt.empty() || rt.empty()) {
    return 0.0;
  }
  std::map<std::pair<size_t, size_t>, int> memo;
  const int l = lcs_memo(pt, rt, 0, 0, memo);
  const double p = static_cast<double>(l) / static_cast<double>(pt.size());
  const double r = static_cast<double>(l) / static_cast<double>(rt.size());
  return (p + r == 0.0) ? 0.0 : 2.0 * p * r / (p + r);
}

inline double pearson_ref(const std::vector<double>& xs,
                          const std::vector<double>& ys) {
  const size_t n = xs.size();
  long double mx = 0.0L;
  long double my = 0.0L;
  for (size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<long double>(n);
  my /= static_cast<long double>(n);
  long double sxy = 0.0L;
  long double sxx = 0.0L;
  long double syy = 0.0L;
  for (size_t i = 0; i < n; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

// Exact upper binomial tail P(X >= m), X ~ Binomial(k, p), via log-space
// terms. Frozen expectation for (25, 0.7, 13): 0.9825302594739422.
inline double binomial_tail_at_least(int k, double p, int m) {
  if (m <= 0) {
    return 1.0;
  }
  if (m > k) {
    return 0.0;
  }
  if (p <= 0.0) {
    return 0.0;
  }
  if (p >= 1.0) {
    return 1.0;
  }
  const long double lp = std::log(static_cast<long double>(p));
  const long double lq = std::log(static_cast<long double>(1.0 - p));
  long double total = 0.0L;
  for (int s = m; s <= k; ++s) {
    const long double logc = std::lgamma(k + 1.0L) - std::lgamma(s + 1.0L) -
                             std::lgamma(k - s + 1.0L);
    total += std::exp(logc + static_cast<long double>(s) * lp +
                      static_cast<long double>(k - s) * lq);
  }
  return static_cast<double>(total);
}

// FNV-1a 64-bit, restated from its published constants.
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace oracles
