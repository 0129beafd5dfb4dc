#include "aqs/stub_server.hpp"

#include <utility>

#include "aqs/errors.hpp"

#include "httplib.h"
#include "json.hpp"

namespace aqs {

namespace {

using nlohmann::json;

json ok_envelope(json payload) {
  return json{{"status", "ok"}, {"payload", std::move(payload)}};
}

json error_envelope(const std::string& message) {
  return json{{"status", "error"}, {"message", message}};
}

std::string require_string_field(const json& payload, const char* key) {
  auto it = payload.find(key);
  if (it == payload.end() || !it->is_string()) {
    throw Error(std::string("request payload needs string \"") + key + "\"");
  }
  return it->get<std::string>();
}

json dispatch(BackendSuite& suite, const std::string& task,
              const json& payload) {
  if (task == "score") {
    const std::string query = require_string_field(payload, "query");
    auto it = payload.find("prefix");
    if (it == payload.end() || !it->is_array()) {
      throw Error("request payload needs array \"prefix\"");
    }
    std::vector<int> prefix;
    for (const auto& v : *it) {
      if (!v.is_number_integer()) {
        throw Error("\"prefix\" must contain integers");
      }
      prefix.push_back(v.get<int>());
    }
    const auto dist = suite.scorer->score_next_tokens(query, prefix);
    json entries = json::array();
    for (const auto& [id, p] : dist) {
      entries.push_back(json::array({id, suite.scorer->surface(id), p}));
    }
    return ok_envelope(
        json{{"eos_id", suite.scorer->eos_id()}, {"entries", entries}});
  }
  if (task == "qa") {
    const auto answer =
        suite.qa->answer_question(require_string_field(payload, "query"),
                                  require_string_field(payload, "context"));
    json body{{"text", answer.text}};
    if (answer.raw_score.has_value()) {
      body["raw_score"] = *answer.raw_score;
    } else {
      body["raw_score"] = nullptr;
    }
    return ok_envelope(std::move(body));
  }
  if (task == "embed") {
    const auto e =
        suite.embedder->embed_text(require_string_field(payload, "text"));
    return ok_envelope(json{{"values", e.values}});
  }
  if (task == "embed_tokens") {
    const auto es =
        suite.embedder->embed_tokens(require_string_field(payload, "text"));
    json vectors = json::array();
    for (const auto& e : es) {
      vectors.push_back(e.values);
    }
    return ok_envelope(json{{"vectors", std::move(vectors)}});
  }
  if (task == "summarize") {
    return ok_envelope(json{
        {"summary",
         suite.summarizer->summarize_text(require_string_field(payload,
                                                               "text"))}});
  }
  if (task == "sentiment") {
    return ok_envelope(json{
        {"score",
         suite.sentiment->sentiment_score(require_string_field(payload,
                                                               "text"))}});
  }
  throw Error("unknown task \"" + task + "\"");
}

}  // namespace

StubServer::StubServer(BackendSuite suite)
    : suite_(std::move(suite)), server_(std::make_unique<httplib::Server>()) {
  install_handler();
}

StubServer::~StubServer() { stop(); }

void StubServer::install_handler() {
  server_->Post("/", [this](const httplib::Request& req,
                            httplib::Response& res) {
    json reply;
    try {
      const json body = json::parse(req.body);
      if (!body.is_object() || !body.contains("task") ||
          !body.at("task").is_string() || !body.contains("payload")) {
        throw Error("request must be {\"task\": ..., \"payload\": ...}");
      }
      reply = dispatch(suite_, body.at("task").get<std::string>(),
                       body.at("payload"));
    } catch (const json::parse_error& e) {
      reply = error_envelope(std::string("request body is not JSON: ") +
                             e.what());
    } catch (const std::exception& e) {
      reply = error_envelope(e.what());
    }
    res.set_content(reply.dump(), "application/json");
  });
}

int StubServer::start() {
  port_ = server_->bind_to_any_port("127.0.0.1");
  if (port_ < 0) {
    throw IoError("stub server failed to bind a port");
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void StubServer::run(const std::string& host, int port) {
  port_ = port;
  if (!server_->listen(host, port)) {
    throw IoError("stub server failed to listen on " + host + ":" +
                  std::to_string(port));
  }
}

void StubServer::stop() {
  if (server_) {
    server_->stop();
  }
  if (thread_.joinable()) {
    thread_.join();
  }
}

std::string StubServer::endpoint() const {
  return "http://127.0.0.1:" + std::to_string(port_);
}

}  // namespace aqs
