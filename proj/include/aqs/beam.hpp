#pragma once

#include <string>
#include <utility>
#include <vector>

#include "aqs/backends.hpp"

namespace aqs {

// One partial paraphrase. The end-of-sequence token appears at most once and
// only as the final element; finished is true exactly when it is present.
// logp accumulates natural-log probabilities, so it is always <= 0.
struct Hypothesis {
  std::vector<int> prefix;
  double logp = 0.0;
  bool finished = false;

  bool operator==(const Hypothesis& other) const = default;
};

// The working set of hypotheses between beam steps.
struct BeamFrontier {
  std::vector<Hypothesis> hypotheses;
};

struct BeamConfig {
  int beam_size = 8;    // n >= 1
  int max_length = 64;  // content-token cap >= 1
};

// Single unfinished hypothesis: empty prefix, score zero.
BeamFrontier init_frontier();

// One expansion sweep. Finished hypotheses pass through unchanged; each
// unfinished hypothesis (y, p) spawns one child (y+w, p + ln P(w)) per
// vocabulary token with P > 0 (zero-probability tokens are dropped, so no
// -inf scores arise). Propagates scorer errors.
BeamFrontier expand_frontier(const BeamFrontier& frontier,
                             const std::string& query, ScorerBackend& scorer);

// Keeps exactly the hypotheses with fewer than n strictly greater scores.
// Under ties the result may exceed n; order of survivors is preserved.
BeamFrontier select_n_best(const BeamFrontier& frontier, int n);

// Runs expand/select rounds until every surviving hypothesis is finished.
// A hypothesis whose content reaches max_length is force-terminated: the
// end-of-sequence token is appended with no score change (the scorer is not
// consulted for it). Returns (surface, logp) pairs sorted by descending
// logp, ties by token-id-lexicographic content order; duplicate surfaces are
// retained. Scores carry no length normalization.
std::vector<std::pair<std::string, double>> generate_paraphrases(
    const std::string& query, const BeamConfig& config, ScorerBackend& scorer);

}  // namespace aqs
