#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aqs/backends.hpp"
#include "aqs/beam.hpp"
#include "aqs/clustering.hpp"

namespace aqs {

struct PipelineConfig {
  BeamConfig beam;
  ClusterConfig cluster;
  bool include_original = true;    // prepend the original query to the fan-out
  bool enable_paraphrasing = true; // off: the original query alone (beam ignored)
  bool enable_clustering = true;   // off: one group of all answers, query order
  bool fallback_generic = false;   // on: summarize the context when QA yields nothing
  int qa_concurrency = 4;          // >= 1
};

// Observability record for one pipeline run. kept_group.members are drawn
// from answers; kept_indices are those members' positions in answers, in
// merge order. timings holds one (stage, milliseconds) entry per stage that
// executed, in execution order; values vary per run, keys do not.
struct PipelineTrace {
  std::string query;
  std::vector<std::string> paraphrases;  // queries sent to QA, original first when included
  std::vector<Answer> answers;           // one per paraphrase, query-index order
  std::vector<int> kept_indices;
  AnswerGroup kept_group;
  std::string summary;
  bool fallback = false;
  std::optional<std::string> error;
  std::vector<std::pair<std::string, double>> timings;
};

// Runs paraphrase -> QA fan-out -> empty-answer filter -> clustering ->
// summarization. With enable_paraphrasing=false the fan-out is the original
// query alone; with enable_clustering=false all non-empty answers form one
// kept group in query order. QA calls within one run are issued by at most
// qa_concurrency workers, and answers land at their query index regardless
// of completion order. Throws EmptyInput for empty query/context, NoAnswers
// when every answer is empty and fallback_generic is off (when on, the
// summary is summarize_text(context) and the trace marks fallback=true).
// Backend errors propagate.
PipelineTrace aqs_summarize(const std::string& query,
                            const std::string& context,
                            const PipelineConfig& config,
                            const BackendSuite& backends);

// Runs aqs_summarize per (query, context) item, sequentially, so at most
// qa_concurrency QA calls are in flight overall. Output order matches input
// order. A failing item yields a trace with error set (and its query filled
// in) instead of aborting the batch.
std::vector<PipelineTrace> batch_summarize(
    const std::vector<std::pair<std::string, std::string>>& items,
    const PipelineConfig& config, const BackendSuite& backends);

}  // namespace aqs
