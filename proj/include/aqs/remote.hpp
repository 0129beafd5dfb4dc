#pragma once

#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "aqs/backends.hpp"

#include "json.hpp"

namespace aqs {

struct RemoteConfig {
  std::string endpoint = "http://127.0.0.1:8080";
  int timeout_ms = 5000;
  // Additional attempts after the first; total attempts = retries + 1.
  int retries = 3;
  int backoff_initial_ms = 100;
  double backoff_factor = 2.0;
  int max_in_flight = 8;
};

struct InferenceRequest {
  std::string task;
  nlohmann::json payload;
};

struct InferenceResponse {
  bool ok = false;
  nlohmann::json payload;
  std::string error_message;
};

// One-endpoint JSON inference client. Transport failures and non-200
// statuses are retried with exponential backoff and surface as
// BackendUnavailable once attempts run out. A 200 whose body is not a valid
// protocol envelope raises ProtocolError immediately (no retry: the server
// answered, just wrongly). A well-formed error envelope is returned, never
// thrown.
class RemoteClient {
 public:
  explicit RemoteClient(RemoteConfig config);

  InferenceResponse infer(const InferenceRequest& request);

  const RemoteConfig& config() const { return config_; }

 private:
  // Caps concurrent infer calls at max_in_flight per client.
  class Gate {
   public:
    explicit Gate(int capacity) : available_(capacity) {}
    void acquire();
    void release();

   private:
    std::mutex mu_;
    std::condition_variable cv_;
    int available_;
  };

  RemoteConfig config_;
  Gate gate_;
};

// Backend adapters over a shared RemoteClient. Error envelopes become
// BackendUnavailable; structurally invalid ok-payloads become ProtocolError.
class RemoteScorer : public ScorerBackend {
 public:
  explicit RemoteScorer(std::shared_ptr<RemoteClient> client)
      : client_(std::move(client)) {}

  TokenDistribution score_next_tokens(const std::string& query,
                                      const std::vector<int>& prefix) override;
  // Known only after the first successful score call; the vocabulary is
  // accumulated from response entries.
  int eos_id() const override;
  std::string surface(int id) const override;

 private:
  std::shared_ptr<RemoteClient> client_;
  mutable std::mutex mu_;
  std::map<int, std::string> surfaces_;
  int eos_id_ = -1;
  bool eos_known_ = false;
};

class RemoteQa : public QaBackend {
 public:
  explicit RemoteQa(std::shared_ptr<RemoteClient> client)
      : client_(std::move(client)) {}

  Answer answer_question(const std::string& query,
                         const std::string& context) override;

 private:
  std::shared_ptr<RemoteClient> client_;
};

class RemoteEmbedder : public EmbedderBackend {
 public:
  explicit RemoteEmbedder(std::shared_ptr<RemoteClient> client)
      : client_(std::move(client)) {}

  Embedding embed_text(const std::string& text) override;
  std::vector<Embedding> embed_tokens(const std::string& text) override;
  // Fixed by the first response; later responses of a different length are a
  // protocol violation.
  int dim() const override;

 private:
  std::vector<double> parse_vector(const nlohmann::json& values,
                                   const char* task);

  std::shared_ptr<RemoteClient> client_;
  mutable std::mutex mu_;
  int dim_ = -1;
};

class RemoteSummarizer : public SummarizerBackend {
 public:
  explicit RemoteSummarizer(std::shared_ptr<RemoteClient> client)
      : client_(std::move(client)) {}

  std::string summarize_text(const std::string& text) override;

 private:
  std::shared_ptr<RemoteClient> client_;
};

class RemoteSentiment : public SentimentBackend {
 public:
  explicit RemoteSentiment(std::shared_ptr<RemoteClient> client)
      : client_(std::move(client)) {}

  double sentiment_score(const std::string& text) override;

 private:
  std::shared_ptr<RemoteClient> client_;
};

// All five capabilities over one shared client (one in-flight gate).
BackendSuite make_remote_suite(const RemoteConfig& config);

}  // namespace aqs
