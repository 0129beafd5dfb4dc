#include "aqs/clustering.hpp"

#include <cmath>
#include <utility>

#include "aqs/text.hpp"

namespace aqs {

namespace {

// Shared by pairwise_distance and the cached clustering loop so both produce
// bit-identical values for the same pair of texts.
double cosine_distance(const Embedding& a, const Embedding& b) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (size_t i = 0; i < a.values.size() && i < b.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
  }
  for (double v : a.values) na += v * v;
  for (double v : b.values) nb += v * v;
  if (na <= 0.0 || nb <= 0.0) {
    throw DegenerateEmbedding("zero-norm embedding in distance computation");
  }
  return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

std::string AnswerGroup::concat_text() const {
  std::vector<std::string> texts;
  texts.reserve(members.size());
  for (const Answer& a : members) texts.push_back(a.text);
  return text::join_group(texts);
}

int GroupSet::total() const {
  int t = 0;
  for (const AnswerGroup& g : groups) t += g.size();
  return t;
}

double pairwise_distance(const AnswerGroup& a, const AnswerGroup& b,
                         EmbedderBackend& embedder) {
  return cosine_distance(embedder.embed_text(a.concat_text()),
                         embedder.embed_text(b.concat_text()));
}

GroupSet merge_step(GroupSet gs, EmbedderBackend& embedder) {
  const size_t k = gs.groups.size();
  if (k < 2) {
    throw Error("merge_step requires at least two groups");
  }
  size_t best_i = 0;
  size_t best_j = 1;
  double best_d = 0.0;
  bool have_best = false;
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = i + 1; j < k; ++j) {
      double d = pairwise_distance(gs.groups[i], gs.groups[j], embedder);
      // Strict < keeps the smallest (i, j) pair on exact ties.
      if (!have_best || d < best_d) {
        best_d = d;
        best_i = i;
        best_j = j;
        have_best = true;
      }
    }
  }
  AnswerGroup merged = std::move(gs.groups[best_i]);
  for (Answer& a : gs.groups[best_j].members) {
    merged.members.push_back(std::move(a));
  }
  gs.groups[best_i] = std::move(merged);
  gs.groups.erase(gs.groups.begin() + static_cast<long>(best_j));
  return gs;
}

AnswerGroup cluster_until_patience(const std::vector<Answer>& answers,
                                   const ClusterConfig& config,
                                   EmbedderBackend& embedder) {
  if (answers.empty()) {
    throw NoAnswers("cluster_until_patience: no answers to cluster");
  }
  if (config.patience < 0.0 || config.patience >= 1.0) {
    throw Error("patience must lie in [0, 1)");
  }

  std::vector<AnswerGroup> groups;
  groups.reserve(answers.size());
  std::vector<Embedding> embeds;
  embeds.reserve(answers.size());
  for (const Answer& a : answers) {
    AnswerGroup g;
    g.members.push_back(a);
    embeds.push_back(embedder.embed_text(g.concat_text()));
    groups.push_back(std::move(g));
  }

  const double total = static_cast<double>(answers.size());
  const double threshold = config.patience * total;
  auto max_size = [&groups]() {
    int m = 0;
    for (const AnswerGroup& g : groups) m = std::max(m, g.size());
    return m;
  };

  // Distance cache: recomputed rows only where a merge touched them. Values
  // match pairwise_distance exactly because the same embeddings and the same
  // arithmetic produce them.
  std::vector<std::vector<double>> dist(groups.size());
  for (size_t i = 0; i < groups.size(); ++i) {
    dist[i].resize(groups.size(), 0.0);
  }
  for (size_t i = 0; i < groups.size(); ++i) {
    for (size_t j = i + 1; j < groups.size(); ++j) {
      dist[i][j] = cosine_distance(embeds[i], embeds[j]);
    }
  }

  while (static_cast<double>(max_size()) <= threshold) {
    // A single remaining group has size == total > q * total for q < 1, so
    // the loop always exits before this can underflow.
    size_t best_i = 0;
    size_t best_j = 1;
    double best_d = dist[0][1];
    for (size_t i = 0; i < groups.size(); ++i) {
      for (size_t j = i + 1; j < groups.size(); ++j) {
        if (dist[i][j] < best_d) {
          best_d = dist[i][j];
          best_i = i;
          best_j = j;
        }
      }
    }
    for (Answer& a : groups[best_j].members) {
      groups[best_i].members.push_back(std::move(a));
    }
    groups.erase(groups.begin() + static_cast<long>(best_j));
    embeds[best_i] = embedder.embed_text(groups[best_i].concat_text());
    embeds.erase(embeds.begin() + static_cast<long>(best_j));
    for (auto& row : dist) {
      row.erase(row.begin() + static_cast<long>(best_j));
    }
    dist.erase(dist.begin() + static_cast<long>(best_j));
    for (size_t i = 0; i < best_i; ++i) {
      dist[i][best_i] = cosine_distance(embeds[i], embeds[best_i]);
    }
    for (size_t j = best_i + 1; j < groups.size(); ++j) {
      dist[best_i][j] = cosine_distance(embeds[best_i], embeds[j]);
    }
  }

  size_t winner = 0;
  for (size_t i = 1; i < groups.size(); ++i) {
    if (groups[i].size() > groups[winner].size()) winner = i;
  }
  return groups[winner];
}

}  // namespace aqs
