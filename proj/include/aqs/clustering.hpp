#pragma once

#include <string>
#include <vector>

#include "aqs/backends.hpp"

namespace aqs {

// A mergeable cluster of answers. Member order records merge history: a
// merge of groups u and v (u earlier in list order) yields u's members
// followed by v's.
struct AnswerGroup {
  std::vector<Answer> members;

  int size() const { return static_cast<int>(members.size()); }

  // Members' texts joined with ". " after a member lacking terminal
  // punctuation and a single space otherwise. Deterministic given members.
  std::string concat_text() const;
};

// The evolving set of groups. Total membership is conserved across merges;
// the group count drops by exactly one per merge.
struct GroupSet {
  std::vector<AnswerGroup> groups;

  int total() const;
};

struct ClusterConfig {
  double patience = 0.5;  // q in [0, 1)
};

// 1 - cosine(embed(a.concat_text), embed(b.concat_text)), range [0, 2].
// Computed once per unordered pair, so symmetry is exact. Throws
// DegenerateEmbedding when either embedding has zero norm.
double pairwise_distance(const AnswerGroup& a, const AnswerGroup& b,
                         EmbedderBackend& embedder);

// Merges the closest pair of groups; ties broken by the smallest (i, j)
// index pair in current list order. The merged group takes the earlier
// group's position. Requires >= 2 groups.
GroupSet merge_step(GroupSet gs, EmbedderBackend& embedder);

// Starts from singleton groups and merges until the largest group's size
// strictly exceeds patience * total; returns that group (earliest on ties).
// A single answer (or q = 0) returns immediately with zero merges. Later
// distances are computed on concatenated texts, not via a linkage formula.
// Throws NoAnswers on empty input.
AnswerGroup cluster_until_patience(const std::vector<Answer>& answers,
                                   const ClusterConfig& config,
                                   EmbedderBackend& embedder);

}  // namespace aqs
