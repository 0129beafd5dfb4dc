#include "aqs/remote.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>
#include <utility>

#include "aqs/errors.hpp"

#include "httplib.h"

namespace aqs {

namespace {

using nlohmann::json;

// Envelope error -> BackendUnavailable; the server is up but the capability
// failed, which callers of a backend interface treat the same way.
[[noreturn]] void raise_envelope_error(const std::string& task,
                                       const InferenceResponse& resp) {
  throw BackendUnavailable("remote " + task + " failed: " +
                           resp.error_message);
}

[[noreturn]] void raise_protocol(const std::string& task,
                                 const std::string& detail) {
  throw ProtocolError("task " + task + ": " + detail);
}

const json& require_field(const std::string& task, const json& payload,
                          const char* key) {
  auto it = payload.find(key);
  if (it == payload.end()) {
    raise_protocol(task, std::string("payload missing \"") + key + "\"");
  }
  return *it;
}

}  // namespace

void RemoteClient::Gate::acquire() {
  std::unique_lock<std::mutex> lock(mu_);
  cv_.wait(lock, [&] { return available_ > 0; });
  --available_;
}

void RemoteClient::Gate::release() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    ++available_;
  }
  cv_.notify_one();
}

RemoteClient::RemoteClient(RemoteConfig config)
    : config_(std::move(config)),
      gate_(config_.max_in_flight > 0 ? config_.max_in_flight : 1) {
  if (config_.endpoint.empty()) {
    throw Error("remote endpoint must be configured");
  }
}

InferenceResponse RemoteClient::infer(const InferenceRequest& request) {
  gate_.acquire();
  struct Ticket {
    Gate& gate;
    ~Ticket() { gate.release(); }
  } ticket{gate_};

  const std::string body =
      json{{"task", request.task}, {"payload", request.payload}}.dump();
  const int attempts = config_.retries >= 0 ? config_.retries + 1 : 1;
  double backoff_ms = static_cast<double>(config_.backoff_initial_ms);
  std::string last_failure = "no attempt made";

  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(
          static_cast<long>(std::max(0.0, backoff_ms))));
      backoff_ms *= config_.backoff_factor;
    }
    httplib::Client cli(config_.endpoint);
    const auto timeout = std::chrono::milliseconds(config_.timeout_ms);
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(timeout);
    cli.set_write_timeout(timeout);
    auto res = cli.Post("/", body, "application/json");
    if (!res) {
      last_failure = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_failure = "http status " + std::to_string(res->status);
      continue;
    }

    json envelope;
    try {
      envelope = json::parse(res->body);
    } catch (const json::parse_error& e) {
      throw ProtocolError(std::string("response body is not JSON: ") +
                          e.what());
    }
    if (!envelope.is_object() || !envelope.contains("status") ||
        !envelope.at("status").is_string()) {
      throw ProtocolError("response lacks a string \"status\" field");
    }
    const std::string status = envelope.at("status").get<std::string>();
    if (status == "ok") {
      if (!envelope.contains("payload")) {
        throw ProtocolError("ok response lacks \"payload\"");
      }
      InferenceResponse out;
      out.ok = true;
      out.payload = envelope.at("payload");
      return out;
    }
    if (status == "error") {
      if (!envelope.contains("message") ||
          !envelope.at("message").is_string() ||
          envelope.at("message").get<std::string>().empty()) {
        throw ProtocolError("error response lacks a non-empty \"message\"");
      }
      InferenceResponse out;
      out.ok = false;
      out.error_message = envelope.at("message").get<std::string>();
      return out;
    }
    throw ProtocolError("unknown response status \"" + status + "\"");
  }
  throw BackendUnavailable("endpoint " + config_.endpoint +
                           " unreachable after " + std::to_string(attempts) +
                           " attempts; last failure: " + last_failure);
}

TokenDistribution RemoteScorer::score_next_tokens(
    const std::string& query, const std::vector<int>& prefix) {
  if (query.empty()) {
    throw EmptyInput("query must be non-empty");
  }
  InferenceRequest req;
  req.task = "score";
  req.payload = json{{"query", query}, {"prefix", prefix}};
  const auto resp = client_->infer(req);
  if (!resp.ok) {
    raise_envelope_error("score", resp);
  }
  const auto& eos_field = require_field("score", resp.payload, "eos_id");
  if (!eos_field.is_number_integer()) {
    raise_protocol("score", "\"eos_id\" must be an integer");
  }
  const int eos = eos_field.get<int>();
  const auto& entries = require_field("score", resp.payload, "entries");
  if (!entries.is_array()) {
    raise_protocol("score", "\"entries\" must be an array");
  }

  TokenDistribution dist;
  double sum = 0.0;
  std::lock_guard<std::mutex> lock(mu_);
  if (eos_known_ && eos != eos_id_) {
    raise_protocol("score", "end-of-sequence id changed across responses");
  }
  for (const auto& entry : entries) {
    if (!entry.is_array() || entry.size() != 3 ||
        !entry[0].is_number_integer() || !entry[1].is_string() ||
        !entry[2].is_number()) {
      raise_protocol("score", "entries must be [id, surface, probability]");
    }
    const int id = entry[0].get<int>();
    const std::string surface = entry[1].get<std::string>();
    const double p = entry[2].get<double>();
    if (p < 0.0 || p > 1.0) {
      raise_protocol("score", "probability out of [0, 1]");
    }
    auto [it, inserted] = surfaces_.emplace(id, surface);
    if (!inserted && it->second != surface) {
      raise_protocol("score", "surface for id " + std::to_string(id) +
                                  " changed across responses");
    }
    if (!dist.emplace(id, p).second) {
      raise_protocol("score", "duplicate id " + std::to_string(id));
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    raise_protocol("score", "probabilities sum to " + std::to_string(sum));
  }
  eos_id_ = eos;
  eos_known_ = true;
  return dist;
}

int RemoteScorer::eos_id() const {
  std::lock_guard<std::mutex> lock(mu_);
  if (!eos_known_) {
    throw Error("end-of-sequence id unknown before the first score call");
  }
  return eos_id_;
}

std::string RemoteScorer::surface(int id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = surfaces_.find(id);
  if (it == surfaces_.end()) {
    throw VocabularyMismatch("unknown token id " + std::to_string(id));
  }
  return it->second;
}

Answer RemoteQa::answer_question(const std::string& query,
                                 const std::string& context) {
  if (query.empty() || context.empty()) {
    throw EmptyInput("query and context must be non-empty");
  }
  InferenceRequest req;
  req.task = "qa";
  req.payload = json{{"query", query}, {"context", context}};
  const auto resp = client_->infer(req);
  if (!resp.ok) {
    raise_envelope_error("qa", resp);
  }
  const auto& text = require_field("qa", resp.payload, "text");
  if (!text.is_string()) {
    raise_protocol("qa", "\"text\" must be a string");
  }
  Answer answer;
  answer.text = text.get<std::string>();
  const auto& raw = require_field("qa", resp.payload, "raw_score");
  if (raw.is_number()) {
    answer.raw_score = raw.get<double>();
  } else if (!raw.is_null()) {
    raise_protocol("qa", "\"raw_score\" must be a number or null");
  }
  return answer;
}

std::vector<double> RemoteEmbedder::parse_vector(const nlohmann::json& values,
                                                 const char* task) {
  if (!values.is_array()) {
    raise_protocol(task, "embedding must be an array of numbers");
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& v : values) {
    if (!v.is_number()) {
      raise_protocol(task, "embedding must be an array of numbers");
    }
    out.push_back(v.get<double>());
  }
  std::lock_guard<std::mutex> lock(mu_);
  if (dim_ < 0) {
    if (out.empty()) {
      raise_protocol(task, "embedding has zero length");
    }
    dim_ = static_cast<int>(out.size());
  } else if (static_cast<int>(out.size()) != dim_) {
    raise_protocol(task, "embedding length " + std::to_string(out.size()) +
                             " does not match dimension " +
                             std::to_string(dim_));
  }
  return out;
}

Embedding RemoteEmbedder::embed_text(const std::string& text) {
  InferenceRequest req;
  req.task = "embed";
  req.payload = json{{"text", text}};
  const auto resp = client_->infer(req);
  if (!resp.ok) {
    raise_envelope_error("embed", resp);
  }
  Embedding e;
  e.values = parse_vector(require_field("embed", resp.payload, "values"),
                          "embed");
  return e;
}

std::vector<Embedding> RemoteEmbedder::embed_tokens(const std::string& text) {
  InferenceRequest req;
  req.task = "embed_tokens";
  req.payload = json{{"text", text}};
  const auto resp = client_->infer(req);
  if (!resp.ok) {
    raise_envelope_error("embed_tokens", resp);
  }
  const auto& vectors =
      require_field("embed_tokens", resp.payload, "vectors");
  if (!vectors.is_array()) {
    raise_protocol("embed_tokens", "\"vectors\" must be an array");
  }
  std::vector<Embedding> out;
  out.reserve(vectors.size());
  for (const auto& row : vectors) {
    Embedding e;
    e.values = parse_vector(row, "embed_tokens");
    out.push_back(std::move(e));
  }
  return out;
}

int RemoteEmbedder::dim() const {
  std::lock_guard<std::mutex> lock(mu_);
  if (dim_ < 0) {
    throw Error("embedding dimension unknown before the first embed call");
  }
  return dim_;
}

std::string RemoteSummarizer::summarize_text(const std::string& text) {
  if (text.empty()) {
    throw EmptyInput("text must be non-empty");
  }
  InferenceRequest req;
  req.task = "summarize";
  req.payload = json{{"text", text}};
  const auto resp = client_->infer(req);
  if (!resp.ok) {
    raise_envelope_error("summarize", resp);
  }
  const auto& summary = require_field("summarize", resp.payload, "summary");
  if (!summary.is_string()) {
    raise_protocol("summarize", "\"summary\" must be a string");
  }
  return summary.get<std::string>();
}

double RemoteSentiment::sentiment_score(const std::string& text) {
  InferenceRequest req;
  req.task = "sentiment";
  req.payload = json{{"text", text}};
  const auto resp = client_->infer(req);
  if (!resp.ok) {
    raise_envelope_error("sentiment", resp);
  }
  const auto& score = require_field("sentiment", resp.payload, "score");
  if (!score.is_number()) {
    raise_protocol("sentiment", "\"score\" must be a number");
  }
  return score.get<double>();
}

BackendSuite make_remote_suite(const RemoteConfig& config) {
  auto client = std::make_shared<RemoteClient>(config);
  BackendSuite suite;
  suite.scorer = std::make_shared<RemoteScorer>(client);
  suite.qa = std::make_shared<RemoteQa>(client);
  suite.embedder = std::make_shared<RemoteEmbedder>(client);
  suite.summarizer = std::make_shared<RemoteSummarizer>(client);
  suite.sentiment = std::make_shared<RemoteSentiment>(client);
  return suite;
}

}  // namespace aqs
