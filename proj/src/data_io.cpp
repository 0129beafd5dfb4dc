#include "aqs/data_io.hpp"

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "aqs/errors.hpp"

namespace aqs {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

std::string require_string(const json& obj, const char* key, long lineno) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaError("line " + std::to_string(lineno) + ": missing key \"" +
                      key + "\"");
  }
  if (!it->is_string()) {
    throw SchemaError("line " + std::to_string(lineno) + ": key \"" + key +
                      "\" must be a string");
  }
  return it->get<std::string>();
}

// Splits CSV content into rows of fields. Quoted fields may contain the
// delimiter, doubled quotes, and newlines, so this runs over the whole file
// rather than line by line. Row numbers are 1-based and count physical
// records, not physical lines.
std::vector<std::vector<std::string>> parse_csv(const std::string& content) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  size_t i = 0;
  const size_t n = content.size();
  auto end_field = [&] {
    row.push_back(field);
    field.clear();
    field_was_quoted = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(row);
    row.clear();
  };
  while (i < n) {
    char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < n && content[i + 1] == '"') {
          field += '"';
          i += 2;
        } else {
          in_quotes = false;
          ++i;
        }
      } else {
        field += c;
        ++i;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || field_was_quoted) {
          throw ParseError("row " + std::to_string(rows.size() + 1) +
                           ": quote inside unquoted field");
        }
        in_quotes = true;
        field_was_quoted = true;
        ++i;
        break;
      case ',':
        end_field();
        ++i;
        break;
      case '\r':
        if (i + 1 < n && content[i + 1] == '\n') {
          end_row();
          i += 2;
        } else {
          field += c;
          ++i;
        }
        break;
      case '\n':
        end_row();
        ++i;
        break;
      default:
        field += c;
        ++i;
        break;
    }
  }
  if (in_quotes) {
    throw ParseError("row " + std::to_string(rows.size() + 1) +
                     ": unterminated quoted field");
  }
  if (!field.empty() || field_was_quoted || !row.empty()) {
    end_row();
  }
  return rows;
}

ordered_json answer_to_json(const Answer& a) {
  ordered_json j;
  j["text"] = a.text;
  j["source_query_index"] = a.source_query_index;
  if (a.raw_score.has_value()) {
    j["raw_score"] = *a.raw_score;
  } else {
    j["raw_score"] = nullptr;
  }
  return j;
}

Answer answer_from_json(const ordered_json& j) {
  Answer a;
  a.text = j.at("text").get<std::string>();
  a.source_query_index = j.at("source_query_index").get<int>();
  if (j.contains("raw_score") && !j.at("raw_score").is_null()) {
    a.raw_score = j.at("raw_score").get<double>();
  }
  return a;
}

}  // namespace

std::vector<Triplet> load_triplets(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path);
  }
  std::vector<Triplet> out;
  std::set<std::string> seen_ids;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) {
      continue;
    }
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!obj.is_object()) {
      throw SchemaError("line " + std::to_string(lineno) +
                        ": expected a JSON object");
    }
    Triplet t;
    t.id = require_string(obj, "id", lineno);
    t.query = require_string(obj, "query", lineno);
    t.context = require_string(obj, "context", lineno);
    t.reference = require_string(obj, "reference", lineno);
    if (t.query.empty()) {
      throw SchemaError("line " + std::to_string(lineno) + ": empty query");
    }
    if (t.context.empty()) {
      throw SchemaError("line " + std::to_string(lineno) + ": empty context");
    }
    if (!seen_ids.insert(t.id).second) {
      throw SchemaError("line " + std::to_string(lineno) + ": duplicate id \"" +
                        t.id + "\"");
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<EcfRecord> load_ecf(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto rows = parse_csv(buf.str());
  if (rows.empty()) {
    throw SchemaError("missing header row");
  }
  const auto& header = rows.front();
  auto column = [&](const std::string& name) {
    for (size_t c = 0; c < header.size(); ++c) {
      if (header[c] == name) {
        return c;
      }
    }
    throw SchemaError("header lacks required column \"" + name + "\"");
  };
  const size_t col_key = column("Unique Case Record Key");
  const size_t col_subject = column("Subject");
  const size_t col_category = column("Reporting Category");
  const size_t col_sub = column("Reporting Sub Category");
  const size_t col_desc = column("Description");

  std::vector<EcfRecord> out;
  std::set<std::string> seen_keys;
  for (size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) {
      throw ParseError("row " + std::to_string(r + 1) + ": expected " +
                       std::to_string(header.size()) + " fields, found " +
                       std::to_string(row.size()));
    }
    EcfRecord rec;
    rec.record_key = row[col_key];
    if (!row[col_subject].empty()) {
      rec.subject = row[col_subject];
    }
    rec.category = row[col_category];
    rec.sub_category = row[col_sub];
    rec.description = row[col_desc];
    if (rec.description.empty()) {
      throw SchemaError("row " + std::to_string(r + 1) + ": empty description");
    }
    if (!seen_keys.insert(rec.record_key).second) {
      throw SchemaError("row " + std::to_string(r + 1) +
                        ": duplicate record key \"" + rec.record_key + "\"");
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<std::tuple<std::string, std::string, std::string>> ecf_to_tasks(
    const std::vector<EcfRecord>& records) {
  std::vector<std::tuple<std::string, std::string, std::string>> tasks;
  tasks.reserve(records.size() * 2);
  for (const auto& rec : records) {
    tasks.emplace_back("What is complained?", rec.description,
                       rec.sub_category);
    tasks.emplace_back("What is the emotion?", rec.description,
                       rec.sub_category);
  }
  return tasks;
}

nlohmann::ordered_json trace_to_json(const PipelineTrace& trace,
                                     bool include_timings) {
  ordered_json j;
  j["query"] = trace.query;
  j["paraphrases"] = trace.paraphrases;
  ordered_json answers = ordered_json::array();
  for (const auto& a : trace.answers) {
    answers.push_back(answer_to_json(a));
  }
  j["answers"] = std::move(answers);
  j["kept_indices"] = trace.kept_indices;
  j["summary"] = trace.summary;
  j["fallback"] = trace.fallback;
  if (include_timings) {
    ordered_json timings = ordered_json::object();
    for (const auto& [stage, ms] : trace.timings) {
      timings[stage] = ms;
    }
    j["timings"] = std::move(timings);
  }
  if (trace.error.has_value()) {
    j["error"] = *trace.error;
  } else {
    j["error"] = nullptr;
  }
  return j;
}

// Takes ordered_json so the timings object keeps its document order; plain
// json would sort the stage names alphabetically on parse.
PipelineTrace trace_from_json(const nlohmann::ordered_json& j) {
  PipelineTrace trace;
  trace.query = j.at("query").get<std::string>();
  trace.paraphrases = j.at("paraphrases").get<std::vector<std::string>>();
  for (const auto& item : j.at("answers")) {
    trace.answers.push_back(answer_from_json(item));
  }
  trace.kept_indices = j.at("kept_indices").get<std::vector<int>>();
  for (int idx : trace.kept_indices) {
    if (idx < 0 || static_cast<size_t>(idx) >= trace.answers.size()) {
      throw SchemaError("kept index " + std::to_string(idx) +
                        " out of range");
    }
    trace.kept_group.members.push_back(trace.answers[idx]);
  }
  trace.summary = j.at("summary").get<std::string>();
  trace.fallback = j.at("fallback").get<bool>();
  if (j.contains("timings")) {
    for (const auto& [stage, ms] : j.at("timings").items()) {
      trace.timings.emplace_back(stage, ms.get<double>());
    }
  }
  if (j.contains("error") && !j.at("error").is_null()) {
    trace.error = j.at("error").get<std::string>();
  }
  return trace;
}

nlohmann::ordered_json eval_to_json(const EvalRecord& record) {
  ordered_json j;
  j["query"] = record.query;
  j["context"] = record.context;
  j["reference"] = record.reference;
  j["prediction"] = record.prediction;
  ordered_json rouge;
  rouge["r1"] = record.rouge.r1;
  rouge["r2"] = record.rouge.r2;
  rouge["rl"] = record.rouge.rl;
  j["rouge"] = std::move(rouge);
  if (record.embed_match.has_value()) {
    j["embed_match"] = *record.embed_match;
  } else {
    j["embed_match"] = nullptr;
  }
  j["sentiment_src"] = record.sentiment_src;
  j["sentiment_pred"] = record.sentiment_pred;
  if (record.error.has_value()) {
    j["error"] = *record.error;
  } else {
    j["error"] = nullptr;
  }
  return j;
}

EvalRecord eval_from_json(const nlohmann::ordered_json& j) {
  EvalRecord rec;
  rec.query = j.at("query").get<std::string>();
  rec.context = j.at("context").get<std::string>();
  rec.reference = j.at("reference").get<std::string>();
  rec.prediction = j.at("prediction").get<std::string>();
  const auto& rouge = j.at("rouge");
  rec.rouge.r1 = rouge.at("r1").get<double>();
  rec.rouge.r2 = rouge.at("r2").get<double>();
  rec.rouge.rl = rouge.at("rl").get<double>();
  if (j.contains("embed_match") && !j.at("embed_match").is_null()) {
    rec.embed_match = j.at("embed_match").get<double>();
  }
  rec.sentiment_src = j.at("sentiment_src").get<double>();
  rec.sentiment_pred = j.at("sentiment_pred").get<double>();
  if (j.contains("error") && !j.at("error").is_null()) {
    rec.error = j.at("error").get<std::string>();
  }
  return rec;
}

namespace {

// Atomic file write: the target either keeps its old content or receives the
// complete new content, never a prefix.
void write_file_atomic(const std::string& out_path,
                       const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(out_path);
  const fs::path tmp =
      target.parent_path() /
      (target.filename().string() + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open " + tmp.string() + " for writing");
    }
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    std::error_code ec2;
    fs::remove(tmp, ec2);
    throw IoError("failed renaming temp file onto " + out_path);
  }
}

}  // namespace

void write_results(const std::vector<PipelineTrace>& traces,
                   const std::vector<EvalRecord>& records,
                   const std::string& out_path,
                   const std::optional<nlohmann::ordered_json>& summary) {
  if (traces.size() != records.size()) {
    throw LengthMismatch("traces and records differ in length: " +
                         std::to_string(traces.size()) + " vs " +
                         std::to_string(records.size()));
  }
  std::string content;
  for (size_t i = 0; i < traces.size(); ++i) {
    ordered_json line;
    line["trace"] = trace_to_json(traces[i]);
    line["eval"] = eval_to_json(records[i]);
    content += line.dump();
    content += '\n';
  }
  if (summary.has_value()) {
    ordered_json line;
    line["summary"] = *summary;
    content += line.dump();
    content += '\n';
  }
  write_file_atomic(out_path, content);
}

void write_trace(const PipelineTrace& trace, const std::string& out_path,
                 bool include_timings) {
  write_file_atomic(out_path, trace_to_json(trace, include_timings).dump() +
                                  "\n");
}

std::vector<std::pair<PipelineTrace, EvalRecord>> load_results(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path);
  }
  std::vector<std::pair<PipelineTrace, EvalRecord>> out;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) {
      continue;
    }
    ordered_json obj;
    try {
      obj = ordered_json::parse(line);
    } catch (const ordered_json::parse_error& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
    }
    if (obj.contains("summary") && !obj.contains("trace")) {
      continue;  // corpus-level summary line, not a per-item record
    }
    out.emplace_back(trace_from_json(obj.at("trace")),
                     eval_from_json(obj.at("eval")));
  }
  return out;
}

}  // namespace aqs
