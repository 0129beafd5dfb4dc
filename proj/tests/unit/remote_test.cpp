#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "aqs/data_io.hpp"
#include "aqs/errors.hpp"
#include "aqs/mock_backends.hpp"
#include "aqs/pipeline.hpp"
#include "aqs/remote.hpp"
#include "aqs/stub_server.hpp"

#include "doctest.h"
#include "httplib.h"

using aqs::BackendSuite;
using aqs::BackendUnavailable;
using aqs::EmptyInput;
using aqs::InferenceRequest;
using aqs::InferenceResponse;
using aqs::MockEmbedder;
using aqs::MockQa;
using aqs::MockScorer;
using aqs::ProtocolError;
using aqs::RemoteClient;
using aqs::RemoteConfig;
using aqs::RemoteEmbedder;
using aqs::RemoteQa;
using aqs::RemoteScorer;
using aqs::RemoteSentiment;
using aqs::RemoteSummarizer;
using aqs::StubServer;
using aqs::Token;
using aqs::VocabularyMismatch;

namespace {

const char* kQuery = "What is complained?";

BackendSuite golden_mock_suite() {
  std::vector<Token> vocab = {{0, "pipe"},        {1, "leak"},
                              {2, "unsatisfactory"}, {3, "workmanship"},
                              {4, "gantry"},      {5, "</s>"}};
  MockScorer::Table table;
  table[{kQuery, {}}] = {{0, 0.4}, {2, 0.3}, {4, 0.2}, {5, 0.1}};
  table[{kQuery, {0}}] = {{1, 0.6}, {5, 0.4}};
  table[{kQuery, {2}}] = {{3, 0.9}, {5, 0.1}};
  table[{kQuery, {4}}] = {{5, 1.0}};
  return aqs::make_mock_suite(std::move(vocab), std::move(table));
}

RemoteConfig fast_config(const std::string& endpoint, int retries = 0) {
  RemoteConfig cfg;
  cfg.endpoint = endpoint;
  cfg.retries = retries;
  cfg.backoff_initial_ms = 1;
  cfg.backoff_factor = 1.0;
  cfg.timeout_ms = 5000;
  return cfg;
}

// Minimal hand-rolled server for protocol-violation scenarios the stub
// cannot produce.
class RawServer {
 public:
  using Handler =
      std::function<void(const httplib::Request&, httplib::Response&)>;

  explicit RawServer(Handler handler) {
    server_.Post("/", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    REQUIRE(port_ > 0);
    thread_ = std::thread([this]() { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~RawServer() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_);
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = -1;
};

void respond_json(httplib::Response& res, const std::string& body) {
  res.set_content(body, "application/json");
}

}  // namespace

TEST_CASE("remote scorer mirrors the mock through the stub") {
  StubServer server(golden_mock_suite());
  REQUIRE(server.start() > 0);
  auto client = std::make_shared<RemoteClient>(fast_config(server.endpoint()));
  RemoteScorer scorer(client);

  // Vocabulary facts are unknown until the first response arrives.
  CHECK_THROWS_AS(scorer.eos_id(), aqs::Error);
  CHECK_THROWS_AS(scorer.score_next_tokens("", {}), EmptyInput);

  MockScorer local(
      {{0, "pipe"}, {1, "leak"}, {2, "unsatisfactory"}, {3, "workmanship"},
       {4, "gantry"}, {5, "</s>"}},
      MockScorer::Table{{{kQuery, {}}, {{0, 0.4}, {2, 0.3}, {4, 0.2}, {5, 0.1}}}});
  CHECK(scorer.score_next_tokens(kQuery, {}) ==
        local.score_next_tokens(kQuery, {}));
  CHECK(scorer.eos_id() == 5);
  CHECK(scorer.surface(0) == "pipe");
  CHECK(scorer.surface(5) == "</s>");
  // id 1 has not appeared in any response yet.
  CHECK_THROWS_AS(scorer.surface(1), VocabularyMismatch);

  // A later response teaches the adapter more of the vocabulary.
  auto dist = scorer.score_next_tokens(kQuery, {0});
  CHECK(dist.at(1) == 0.6);
  CHECK(scorer.surface(1) == "leak");

  server.stop();
}

TEST_CASE("remote qa, embedder, summarizer and sentiment mirror the mocks") {
  StubServer server(golden_mock_suite());
  REQUIRE(server.start() > 0);
  auto client = std::make_shared<RemoteClient>(fast_config(server.endpoint()));

  const std::string ctx =
      "The pipe leak damaged the bedroom ceiling. The workmanship is "
      "unsatisfactory.";

  RemoteQa qa(client);
  MockQa local_qa;
  const auto remote_answer = qa.answer_question("pipe leak", ctx);
  const auto local_answer = local_qa.answer_question("pipe leak", ctx);
  CHECK(remote_answer.text == local_answer.text);
  CHECK(remote_answer.raw_score == local_answer.raw_score);
  // Abstention carries an empty text and a null raw score.
  const auto abstain = qa.answer_question("xyz", "   ");
  CHECK(abstain.text.empty());
  CHECK_FALSE(abstain.raw_score.has_value());
  CHECK_THROWS_AS(qa.answer_question("", ctx), EmptyInput);

  RemoteEmbedder embedder(client);
  CHECK_THROWS_AS(embedder.dim(), aqs::Error);
  MockEmbedder local_emb;
  CHECK(embedder.embed_text("pipe leak").values ==
        local_emb.embed_text("pipe leak").values);
  CHECK(embedder.dim() == 64);
  const auto remote_toks = embedder.embed_tokens("The pipe leak.");
  const auto local_toks = local_emb.embed_tokens("The pipe leak.");
  REQUIRE(remote_toks.size() == local_toks.size());
  for (size_t i = 0; i < remote_toks.size(); ++i) {
    CHECK(remote_toks[i].values == local_toks[i].values);
  }

  RemoteSummarizer summarizer(client);
  CHECK(summarizer.summarize_text(ctx) ==
        "The pipe leak damaged the bedroom ceiling.");
  CHECK_THROWS_AS(summarizer.summarize_text(""), EmptyInput);

  RemoteSentiment sentiment(client);
  CHECK(sentiment.sentiment_score("good good") == doctest::Approx(1.0));
  CHECK(sentiment.sentiment_score("the leak is bad") ==
        doctest::Approx(-0.5));

  server.stop();
}

TEST_CASE("remote pipeline run matches the local mock run byte for byte") {
  BackendSuite mock = golden_mock_suite();
  StubServer server(golden_mock_suite());
  REQUIRE(server.start() > 0);
  BackendSuite remote = aqs::make_remote_suite(fast_config(server.endpoint()));

  const std::string ctx =
      "The pipe leak damaged the bedroom ceiling. The workmanship is "
      "unsatisfactory. Gantry vehicle alpha passing.";
  aqs::PipelineConfig cfg;
  cfg.beam.beam_size = 3;
  cfg.cluster.patience = 0.5;

  const auto local_trace = aqs::aqs_summarize(kQuery, ctx, cfg, mock);
  const auto remote_trace = aqs::aqs_summarize(kQuery, ctx, cfg, remote);
  CHECK(aqs::trace_to_json(local_trace, false).dump() ==
        aqs::trace_to_json(remote_trace, false).dump());

  server.stop();
}

TEST_CASE("backend failures arrive as error envelopes, not transport faults") {
  StubServer server(golden_mock_suite());
  REQUIRE(server.start() > 0);
  auto client = std::make_shared<RemoteClient>(fast_config(server.endpoint()));

  // Whitespace-only text passes the local guard; the backend inside the
  // stub rejects it and the error envelope surfaces as BackendUnavailable.
  RemoteSummarizer summarizer(client);
  CHECK_THROWS_WITH_AS(summarizer.summarize_text("   "),
                       doctest::Contains("remote summarize failed"),
                       BackendUnavailable);

  // An unknown task is an error envelope returned from infer, never thrown.
  InferenceRequest req;
  req.task = "translate";
  req.payload = {{"text", "hi"}};
  const InferenceResponse resp = client->infer(req);
  CHECK_FALSE(resp.ok);
  CHECK_FALSE(resp.error_message.empty());

  server.stop();
}

TEST_CASE("malformed 200 bodies raise ProtocolError without retry") {
  std::atomic<int> hits{0};
  RawServer server([&hits](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.set_content("this is not json", "text/plain");
  });
  RemoteClient client(fast_config(server.endpoint(), 3));
  InferenceRequest req;
  req.task = "score";
  req.payload = {{"query", "q"}, {"prefix", nlohmann::json::array()}};
  CHECK_THROWS_AS(client.infer(req), ProtocolError);
  // The server answered; a wrong answer is not retried.
  CHECK(hits.load() == 1);
}

TEST_CASE("envelope shape violations raise ProtocolError") {
  auto check_body = [](const std::string& body) {
    RawServer server(
        [&body](const httplib::Request&, httplib::Response& res) {
          respond_json(res, body);
        });
    RemoteClient client(fast_config(server.endpoint()));
    InferenceRequest req;
    req.task = "summarize";
    req.payload = {{"text", "hello"}};
    CHECK_THROWS_AS(client.infer(req), ProtocolError);
  };

  check_body("[1, 2, 3]");                                   // not an object
  check_body("{\"payload\": {}}");                           // no status
  check_body("{\"status\": 7}");                             // non-string status
  check_body("{\"status\": \"weird\"}");                     // unknown status
  check_body("{\"status\": \"ok\"}");                        // ok w/o payload
  check_body("{\"status\": \"error\"}");                     // error w/o message
  check_body("{\"status\": \"error\", \"message\": \"\"}");  // empty message
}

TEST_CASE("score payload violations raise ProtocolError") {
  auto scorer_against = [](const std::string& payload_body) {
    RawServer server(
        [&payload_body](const httplib::Request&, httplib::Response& res) {
          respond_json(res,
                       "{\"status\":\"ok\",\"payload\":" + payload_body + "}");
        });
    auto client =
        std::make_shared<RemoteClient>(fast_config(server.endpoint()));
    RemoteScorer scorer(client);
    CHECK_THROWS_AS(scorer.score_next_tokens("q", {}), ProtocolError);
  };

  // Missing eos_id.
  scorer_against("{\"entries\": [[0, \"</s>\", 1.0]]}");
  // Non-integer eos id.
  scorer_against("{\"eos_id\": \"x\", \"entries\": [[0, \"</s>\", 1.0]]}");
  // Entries not an array.
  scorer_against("{\"eos_id\": 0, \"entries\": 5}");
  // Entry with a non-string surface.
  scorer_against("{\"eos_id\": 0, \"entries\": [[0, 7, 1.0]]}");
  // Probability outside [0, 1].
  scorer_against("{\"eos_id\": 0, \"entries\": [[0, \"</s>\", 1.5]]}");
  // Duplicate ids.
  scorer_against(
      "{\"eos_id\": 0, \"entries\": [[0, \"</s>\", 0.5], [0, \"</s>\", 0.5]]}");
  // Probabilities that do not sum to one.
  scorer_against(
      "{\"eos_id\": 0, \"entries\": [[0, \"</s>\", 0.5], [1, \"a\", 0.4]]}");
}

TEST_CASE("qa payload violations raise ProtocolError") {
  auto qa_against = [](const std::string& payload_body) {
    RawServer server(
        [&payload_body](const httplib::Request&, httplib::Response& res) {
          respond_json(res,
                       "{\"status\":\"ok\",\"payload\":" + payload_body + "}");
        });
    auto client =
        std::make_shared<RemoteClient>(fast_config(server.endpoint()));
    RemoteQa qa(client);
    CHECK_THROWS_AS(qa.answer_question("q", "c"), ProtocolError);
  };

  qa_against("{\"raw_score\": 1.0}");                         // missing text
  qa_against("{\"text\": 7, \"raw_score\": 1.0}");            // non-string text
  qa_against("{\"text\": \"a\", \"raw_score\": \"high\"}");   // bad raw_score
}

TEST_CASE("scorer vocabulary drift across responses raises ProtocolError") {
  std::atomic<int> calls{0};
  RawServer server([&calls](const httplib::Request&, httplib::Response& res) {
    const int n = ++calls;
    if (n == 1) {
      respond_json(res,
                   "{\"status\":\"ok\",\"payload\":{\"eos_id\":0,"
                   "\"entries\":[[0,\"</s>\",0.5],[1,\"a\",0.5]]}}");
    } else {
      // Same id, different surface; also a different eos id.
      respond_json(res,
                   "{\"status\":\"ok\",\"payload\":{\"eos_id\":1,"
                   "\"entries\":[[0,\"</s>\",0.5],[1,\"b\",0.5]]}}");
    }
  });
  auto client = std::make_shared<RemoteClient>(fast_config(server.endpoint()));
  RemoteScorer scorer(client);
  CHECK(scorer.score_next_tokens("q", {}).size() == 2);
  CHECK_THROWS_AS(scorer.score_next_tokens("q", {1}), ProtocolError);
}

TEST_CASE("embedding dimension is pinned by the first response") {
  std::atomic<int> calls{0};
  RawServer server([&calls](const httplib::Request&, httplib::Response& res) {
    const int n = ++calls;
    if (n == 1) {
      respond_json(res,
                   "{\"status\":\"ok\",\"payload\":{\"values\":[1.0,0.0]}}");
    } else {
      respond_json(
          res, "{\"status\":\"ok\",\"payload\":{\"values\":[1.0,0.0,0.0]}}");
    }
  });
  auto client = std::make_shared<RemoteClient>(fast_config(server.endpoint()));
  RemoteEmbedder embedder(client);
  CHECK(embedder.embed_text("a").dim() == 2);
  CHECK(embedder.dim() == 2);
  CHECK_THROWS_AS(embedder.embed_text("b"), ProtocolError);
}

TEST_CASE("zero-length first embedding is a protocol violation") {
  RawServer server([](const httplib::Request&, httplib::Response& res) {
    respond_json(res, "{\"status\":\"ok\",\"payload\":{\"values\":[]}}");
  });
  auto client = std::make_shared<RemoteClient>(fast_config(server.endpoint()));
  RemoteEmbedder embedder(client);
  CHECK_THROWS_AS(embedder.embed_text("a"), ProtocolError);
}

TEST_CASE("transport failures are retried until an attempt succeeds") {
  std::atomic<int> hits{0};
  RawServer server([&hits](const httplib::Request&, httplib::Response& res) {
    const int n = ++hits;
    if (n <= 2) {
      res.status = 500;
      res.set_content("boom", "text/plain");
    } else {
      respond_json(res, "{\"status\":\"ok\",\"payload\":{\"echo\":1}}");
    }
  });
  RemoteClient client(fast_config(server.endpoint(), 3));
  InferenceRequest req;
  req.task = "noop";
  req.payload = {{"x", 1}};
  const InferenceResponse resp = client.infer(req);
  CHECK(resp.ok);
  CHECK(resp.payload.at("echo").get<int>() == 1);
  CHECK(hits.load() == 3);
}

TEST_CASE("an unreachable endpoint exhausts its attempt budget") {
  RemoteClient client(fast_config("http://127.0.0.1:1", 1));
  InferenceRequest req;
  req.task = "noop";
  req.payload = nlohmann::json::object();
  CHECK_THROWS_WITH_AS(client.infer(req),
                       doctest::Contains("2 attempts"), BackendUnavailable);
}

TEST_CASE("the client gate caps in-flight requests") {
  std::atomic<int> current{0};
  std::atomic<int> peak{0};
  RawServer server([&](const httplib::Request&, httplib::Response& res) {
    const int c = ++current;
    int seen = peak.load();
    while (c > seen && !peak.compare_exchange_weak(seen, c)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(40));
    --current;
    respond_json(res, "{\"status\":\"ok\",\"payload\":{}}");
  });

  RemoteConfig cfg = fast_config(server.endpoint());
  cfg.max_in_flight = 2;
  RemoteClient client(cfg);

  std::vector<std::thread> callers;
  std::atomic<int> successes{0};
  for (int i = 0; i < 6; ++i) {
    callers.emplace_back([&client, &successes]() {
      InferenceRequest req;
      req.task = "noop";
      req.payload = nlohmann::json::object();
      if (client.infer(req).ok) ++successes;
    });
  }
  for (auto& t : callers) t.join();

  CHECK(successes.load() == 6);
  CHECK(peak.load() <= 2);
}

TEST_CASE("empty endpoint is rejected at construction") {
  RemoteConfig cfg;
  cfg.endpoint = "";
  CHECK_THROWS_AS(RemoteClient{cfg}, aqs::Error);
}
