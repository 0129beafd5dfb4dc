#include "aqs/beam.hpp"

#include <algorithm>
#include <cmath>

namespace aqs {

BeamFrontier init_frontier() {
  BeamFrontier f;
  f.hypotheses.push_back(Hypothesis{});
  return f;
}

BeamFrontier expand_frontier(const BeamFrontier& frontier,
                             const std::string& query, ScorerBackend& scorer) {
  BeamFrontier next;
  for (const Hypothesis& hyp : frontier.hypotheses) {
    if (hyp.finished) {
      next.hypotheses.push_back(hyp);
      continue;
    }
    TokenDistribution dist = scorer.score_next_tokens(query, hyp.prefix);
    for (const auto& [id, p] : dist) {
      if (p <= 0.0) continue;
      Hypothesis child;
      child.prefix = hyp.prefix;
      child.prefix.push_back(id);
      child.logp = hyp.logp + std::log(p);
      child.finished = (id == scorer.eos_id());
      next.hypotheses.push_back(std::move(child));
    }
  }
  return next;
}

BeamFrontier select_n_best(const BeamFrontier& frontier, int n) {
  BeamFrontier kept;
  for (const Hypothesis& hyp : frontier.hypotheses) {
    int strictly_better = 0;
    for (const Hypothesis& other : frontier.hypotheses) {
      if (other.logp > hyp.logp) ++strictly_better;
    }
    if (strictly_better < n) kept.hypotheses.push_back(hyp);
  }
  return kept;
}

std::vector<std::pair<std::string, double>> generate_paraphrases(
    const std::string& query, const BeamConfig& config,
    ScorerBackend& scorer) {
  if (query.empty()) throw EmptyInput("generate_paraphrases: empty query");

  BeamFrontier frontier = init_frontier();
  // Every unfinished hypothesis gains one token per round and is force-
  // terminated at max_length, so max_length + 1 rounds always suffice.
  const int round_budget = config.max_length + 2;
  int rounds = 0;
  auto all_finished = [](const BeamFrontier& f) {
    return std::all_of(f.hypotheses.begin(), f.hypotheses.end(),
                       [](const Hypothesis& h) { return h.finished; });
  };

  while (!all_finished(frontier)) {
    if (++rounds > round_budget) {
      throw DegenerateModel("beam search exceeded its round budget");
    }
    for (Hypothesis& hyp : frontier.hypotheses) {
      if (!hyp.finished &&
          static_cast<int>(hyp.prefix.size()) >= config.max_length) {
        hyp.prefix.push_back(scorer.eos_id());
        hyp.finished = true;  // forced termination, score unchanged
      }
    }
    if (all_finished(frontier)) break;
    frontier = select_n_best(expand_frontier(frontier, query, scorer),
                             config.beam_size);
  }

  struct Final {
    std::vector<int> content;
    double logp;
  };
  std::vector<Final> finals;
  finals.reserve(frontier.hypotheses.size());
  for (const Hypothesis& hyp : frontier.hypotheses) {
    Final f;
    f.content = hyp.prefix;
    if (!f.content.empty() && f.content.back() == scorer.eos_id()) {
      f.content.pop_back();
    }
    f.logp = hyp.logp;
    finals.push_back(std::move(f));
  }
  std::stable_sort(finals.begin(), finals.end(),
                   [](const Final& a, const Final& b) {
                     if (a.logp != b.logp) return a.logp > b.logp;
                     return a.content < b.content;
                   });

  std::vector<std::pair<std::string, double>> out;
  out.reserve(finals.size());
  for (const Final& f : finals) {
    std::vector<std::string> surfaces;
    surfaces.reserve(f.content.size());
    for (int id : f.content) surfaces.push_back(scorer.surface(id));
    out.emplace_back(scorer.detokenize(surfaces), f.logp);
  }
  return out;
}

}  // namespace aqs
