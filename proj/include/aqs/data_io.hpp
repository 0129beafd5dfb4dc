#pragma once

#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "aqs/metrics.hpp"
#include "aqs/pipeline.hpp"

#include "json.hpp"

namespace aqs {

// One query-context-reference evaluation item. Loaders enforce the
// documented invariants (non-empty query/context, unique ids).
struct Triplet {
  std::string id;
  std::string query;
  std::string context;
  std::string reference;

  bool operator==(const Triplet&) const = default;
};

// One complaint-feedback record. An empty Subject cell loads as absent.
struct EcfRecord {
  std::string record_key;
  std::optional<std::string> subject;
  std::string category;
  std::string sub_category;
  std::string description;

  bool operator==(const EcfRecord&) const = default;
};

// Line-delimited JSON, one object per line with keys id, query, context,
// reference. Blank lines are skipped; order is preserved.
std::vector<Triplet> load_triplets(const std::string& path);

// CSV with a header row naming the five record columns. Standard quoting:
// fields may be wrapped in double quotes, embedded quotes doubled, embedded
// delimiters and newlines allowed inside quotes. Extra columns are ignored.
std::vector<EcfRecord> load_ecf(const std::string& path);

// Expands each record into the two fixed topical queries, complaint query
// first, in record order. Context is the description, reference the
// sub-category string verbatim.
std::vector<std::tuple<std::string, std::string, std::string>> ecf_to_tasks(
    const std::vector<EcfRecord>& records);

// Serialization for traces and evaluation records. Field order is fixed so
// equal values always produce identical bytes. When include_timings is
// false the timings key is omitted entirely (used for byte-identity
// comparisons across runs).
nlohmann::ordered_json trace_to_json(const PipelineTrace& trace,
                                     bool include_timings = true);
// Parsing uses ordered_json so the timings map keeps its document order.
PipelineTrace trace_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json eval_to_json(const EvalRecord& record);
EvalRecord eval_from_json(const nlohmann::ordered_json& j);

// Writes one line per item pairing trace and metrics, followed by one final
// {"summary": ...} line with corpus-level statistics when a summary is given.
// The write is atomic: content goes to a temp file in the same directory
// which is renamed over out_path only after a successful flush.
void write_results(const std::vector<PipelineTrace>& traces,
                   const std::vector<EvalRecord>& records,
                   const std::string& out_path,
                   const std::optional<nlohmann::ordered_json>& summary =
                       std::nullopt);

// Writes a single trace as one JSON document, atomically as above.
void write_trace(const PipelineTrace& trace, const std::string& out_path,
                 bool include_timings = true);

// Reads a file produced by write_results. A trailing {"summary": ...} line
// is skipped; only the per-item records come back.
std::vector<std::pair<PipelineTrace, EvalRecord>> load_results(
    const std::string& path);

}  // namespace aqs
