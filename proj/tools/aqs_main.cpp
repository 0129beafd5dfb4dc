#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "aqs/data_io.hpp"
#include "aqs/errors.hpp"
#include "aqs/metrics.hpp"
#include "aqs/mock_backends.hpp"
#include "aqs/pipeline.hpp"
#include "aqs/remote.hpp"

#include "CLI11.hpp"
#include "json.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;       // backend, config, or I/O failure
constexpr int kNoAnswers = 2;     // every answer empty (or every item failed)
constexpr int kUsageError = 64;   // bad arguments

struct Options {
  std::string backend = "mock";
  std::string endpoint;
  int beam_size = 8;
  double patience = 0.5;
  int concurrency = 4;
  bool no_paraphrase = false;
  bool no_cluster = false;
  bool fallback_generic = false;
  bool verbose = false;
  std::string config_path;

  std::string query;
  std::string context;
  std::string context_file;
  std::string trace_path;
  std::string input;
  std::string output;

  double sim_p = 0.5;
  int sim_k = 25;
  long sim_trials = 100000;
  std::uint64_t sim_seed = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw aqs::IoError("cannot open " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Registers the knobs shared by summarize and batch.
void add_common_options(CLI::App* sub, Options& opt) {
  sub->add_option("--backend", opt.backend, "Backend suite: mock or remote")
      ->check(CLI::IsMember({"mock", "remote"}));
  sub->add_option("--endpoint", opt.endpoint,
                  "Inference endpoint URL for --backend remote "
                  "(default: $AQS_ENDPOINT)");
  sub->add_option("--beam-size", opt.beam_size, "Paraphrase beam width")
      ->check(CLI::PositiveNumber);
  sub->add_option("--patience", opt.patience,
                  "Clustering patience quotient, in [0, 1)");
  sub->add_option("--concurrency", opt.concurrency,
                  "Concurrent question-answering calls per item")
      ->check(CLI::PositiveNumber);
  sub->add_flag("--no-paraphrase", opt.no_paraphrase,
                "Skip paraphrasing; answer the original query only");
  sub->add_flag("--no-cluster", opt.no_cluster,
                "Skip clustering; summarize all answers");
  sub->add_flag("--fallback-generic", opt.fallback_generic,
                "Summarize the raw context when every answer is empty");
  sub->add_option("--config", opt.config_path,
                  "JSON config file; explicit flags override its values");
  sub->add_flag("--verbose", opt.verbose,
                "Echo the effective configuration to stderr");
}

// Applies config-file values to options whose flags were not given on the
// command line. Keys mirror the option names with underscores.
void apply_config_file(CLI::App* sub, Options& opt) {
  if (opt.config_path.empty()) {
    return;
  }
  nlohmann::json cfg;
  try {
    cfg = nlohmann::json::parse(read_file(opt.config_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw aqs::ParseError(std::string("config file: ") + e.what());
  }
  if (!cfg.is_object()) {
    throw aqs::SchemaError("config file must hold a JSON object");
  }
  auto flag_absent = [&](const char* flag) { return sub->count(flag) == 0; };
  for (const auto& [key, value] : cfg.items()) {
    try {
      if (key == "backend_mode") {
        if (flag_absent("--backend")) {
          opt.backend = value.get<std::string>();
          if (opt.backend != "mock" && opt.backend != "remote") {
            throw aqs::SchemaError("config backend_mode must be mock|remote");
          }
        }
      } else if (key == "endpoint") {
        if (flag_absent("--endpoint")) opt.endpoint = value.get<std::string>();
      } else if (key == "beam_size") {
        if (flag_absent("--beam-size")) opt.beam_size = value.get<int>();
      } else if (key == "patience") {
        if (flag_absent("--patience")) opt.patience = value.get<double>();
      } else if (key == "concurrency") {
        if (flag_absent("--concurrency")) opt.concurrency = value.get<int>();
      } else if (key == "no_paraphrase") {
        if (flag_absent("--no-paraphrase"))
          opt.no_paraphrase = value.get<bool>();
      } else if (key == "no_cluster") {
        if (flag_absent("--no-cluster")) opt.no_cluster = value.get<bool>();
      } else if (key == "fallback_generic") {
        if (flag_absent("--fallback-generic"))
          opt.fallback_generic = value.get<bool>();
      } else if (key == "context") {
        if (flag_absent("--context") && flag_absent("--context-file"))
          opt.context = value.get<std::string>();
      } else if (key == "context_file") {
        if (flag_absent("--context-file") && flag_absent("--context"))
          opt.context_file = value.get<std::string>();
      } else if (key == "trace") {
        if (sub->get_option_no_throw("--trace") != nullptr &&
            flag_absent("--trace"))
          opt.trace_path = value.get<std::string>();
      } else if (key == "query" || key == "input" || key == "output") {
        // Always flag-supplied (required flags); config copies are ignored.
      } else {
        throw aqs::SchemaError("config file: unknown key \"" + key + "\"");
      }
    } catch (const nlohmann::json::type_error&) {
      throw aqs::SchemaError("config file: wrong type for key \"" + key +
                             "\"");
    }
  }
}

void resolve_endpoint(Options& opt) {
  if (opt.endpoint.empty()) {
    if (const char* env = std::getenv("AQS_ENDPOINT")) {
      opt.endpoint = env;
    }
  }
}

void echo_config(const Options& opt) {
  if (!opt.verbose) {
    return;
  }
  nlohmann::ordered_json j;
  j["backend_mode"] = opt.backend;
  j["endpoint"] = opt.endpoint;
  j["beam_size"] = opt.beam_size;
  j["patience"] = opt.patience;
  j["concurrency"] = opt.concurrency;
  j["no_paraphrase"] = opt.no_paraphrase;
  j["no_cluster"] = opt.no_cluster;
  j["fallback_generic"] = opt.fallback_generic;
  std::fprintf(stderr, "config %s\n", j.dump().c_str());
}

aqs::BackendSuite make_suite(const Options& opt) {
  if (opt.backend == "remote") {
    if (opt.endpoint.empty()) {
      throw aqs::Error(
          "remote backend needs --endpoint (or AQS_ENDPOINT, or config)");
    }
    aqs::RemoteConfig config;
    config.endpoint = opt.endpoint;
    return aqs::make_remote_suite(config);
  }
  return aqs::make_mock_suite();
}

aqs::PipelineConfig pipeline_config(const Options& opt) {
  aqs::PipelineConfig config;
  config.beam.beam_size = opt.beam_size;
  config.cluster.patience = opt.patience;
  config.enable_paraphrasing = !opt.no_paraphrase;
  config.enable_clustering = !opt.no_cluster;
  config.fallback_generic = opt.fallback_generic;
  config.qa_concurrency = opt.concurrency;
  return config;
}

bool valid_patience(double patience) {
  return patience >= 0.0 && patience < 1.0;
}

int cmd_summarize(CLI::App* sub, Options& opt) {
  try {
    apply_config_file(sub, opt);
  } catch (const aqs::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  resolve_endpoint(opt);
  if (!valid_patience(opt.patience)) {
    std::fprintf(stderr, "error: --patience must lie in [0, 1)\n");
    return kUsageError;
  }
  if (opt.context.empty() && opt.context_file.empty()) {
    std::fprintf(stderr,
                 "error: either --context or --context-file is required\n");
    return kUsageError;
  }
  echo_config(opt);
  try {
    std::string context = opt.context;
    if (context.empty()) {
      context = read_file(opt.context_file);
    }
    const auto suite = make_suite(opt);
    const auto trace =
        aqs::aqs_summarize(opt.query, context, pipeline_config(opt), suite);
    if (!opt.trace_path.empty()) {
      aqs::write_trace(trace, opt.trace_path);
    }
    std::printf("%s\n", trace.summary.c_str());
    return kOk;
  } catch (const aqs::NoAnswers& e) {
    std::fprintf(stderr, "no answers: %s\n", e.what());
    return kNoAnswers;
  } catch (const aqs::EmptyInput& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsageError;
  } catch (const aqs::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
}

int cmd_batch(CLI::App* sub, Options& opt) {
  try {
    apply_config_file(sub, opt);
  } catch (const aqs::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  resolve_endpoint(opt);
  if (!valid_patience(opt.patience)) {
    std::fprintf(stderr, "error: --patience must lie in [0, 1)\n");
    return kUsageError;
  }
  echo_config(opt);

  std::vector<aqs::Triplet> triplets;
  try {
    triplets = aqs::load_triplets(opt.input);
  } catch (const aqs::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }

  try {
    const auto suite = make_suite(opt);
    std::vector<std::pair<std::string, std::string>> items;
    items.reserve(triplets.size());
    for (const auto& t : triplets) {
      items.emplace_back(t.query, t.context);
    }
    const auto traces =
        aqs::batch_summarize(items, pipeline_config(opt), suite);

    // An item's query fan-out counts as effective when the answer text
    // clears this subsequence-F1 bar against the reference.
    constexpr double kEffectiveThreshold = 0.5;

    std::vector<aqs::EvalRecord> records;
    records.reserve(traces.size());
    long succeeded = 0;
    double sum_r1 = 0.0;
    double sum_r2 = 0.0;
    double sum_rl = 0.0;
    double sum_eff = 0.0;
    std::vector<aqs::EvalRecord> scored;
    for (size_t i = 0; i < traces.size(); ++i) {
      aqs::EvalRecord rec;
      rec.query = triplets[i].query;
      rec.context = triplets[i].context;
      rec.reference = triplets[i].reference;
      rec.prediction = traces[i].summary;
      rec.error = traces[i].error;
      rec.rouge.r1 = aqs::rouge_n(rec.prediction, rec.reference, 1);
      rec.rouge.r2 = aqs::rouge_n(rec.prediction, rec.reference, 2);
      rec.rouge.rl = aqs::rouge_l(rec.prediction, rec.reference);
      try {
        rec.embed_match = aqs::greedy_embed_match(rec.prediction,
                                                  rec.reference,
                                                  *suite.embedder);
      } catch (const aqs::EmptyInput&) {
        rec.embed_match = std::nullopt;
      }
      rec.sentiment_src = suite.sentiment->sentiment_score(rec.context);
      rec.sentiment_pred = suite.sentiment->sentiment_score(rec.prediction);
      if (!rec.error.has_value()) {
        ++succeeded;
        sum_r1 += rec.rouge.r1;
        sum_r2 += rec.rouge.r2;
        sum_rl += rec.rouge.rl;
        sum_eff += aqs::effective_query_rate(traces[i].answers,
                                             triplets[i].reference,
                                             kEffectiveThreshold);
        scored.push_back(rec);
      }
      records.push_back(std::move(rec));
    }

    const long failed = static_cast<long>(traces.size()) - succeeded;
    std::optional<double> consistency;
    try {
      consistency = aqs::sentiment_consistency(scored);
    } catch (const aqs::Error&) {
      consistency = std::nullopt;
    }

    nlohmann::ordered_json summary;
    summary["items"] = traces.size();
    summary["succeeded"] = succeeded;
    summary["failed"] = failed;
    if (succeeded > 0) {
      summary["rouge1"] = sum_r1 / succeeded;
      summary["rouge2"] = sum_r2 / succeeded;
      summary["rougeL"] = sum_rl / succeeded;
      summary["effective_query_rate"] = sum_eff / succeeded;
    } else {
      summary["rouge1"] = nullptr;
      summary["rouge2"] = nullptr;
      summary["rougeL"] = nullptr;
      summary["effective_query_rate"] = nullptr;
    }
    if (consistency.has_value()) {
      summary["sentiment_consistency"] = *consistency;
    } else {
      summary["sentiment_consistency"] = nullptr;
    }

    aqs::write_results(traces, records, opt.output, summary);

    std::printf("items %zu succeeded %ld failed %ld\n", traces.size(),
                succeeded, failed);
    if (succeeded > 0) {
      std::printf("rouge1 %.6f\n", sum_r1 / succeeded);
      std::printf("rouge2 %.6f\n", sum_r2 / succeeded);
      std::printf("rougeL %.6f\n", sum_rl / succeeded);
    } else {
      std::printf("rouge1 n/a\nrouge2 n/a\nrougeL n/a\n");
    }
    if (consistency.has_value()) {
      std::printf("sentiment_consistency %.6f\n", *consistency);
    } else {
      std::printf("sentiment_consistency n/a\n");
    }
    if (succeeded > 0) {
      std::printf("effective_query_rate %.6f\n", sum_eff / succeeded);
    } else {
      std::printf("effective_query_rate n/a\n");
    }
    return succeeded > 0 ? kOk : kNoAnswers;
  } catch (const aqs::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
}

int cmd_simulate(const Options& opt) {
  if (opt.sim_p < 0.0 || opt.sim_p > 1.0) {
    std::fprintf(stderr, "error: --p must lie in [0, 1]\n");
    return kUsageError;
  }
  aqs::MajoritySimConfig config;
  config.success_prob = opt.sim_p;
  config.queries_per_doc = opt.sim_k;
  config.trials = opt.sim_trials;
  config.rng_seed = opt.sim_seed;
  try {
    const auto result = aqs::simulate_majority_success(config);
    std::printf("rate %.6f\n", result.rate);
    for (const auto& [successes, count] : result.histogram) {
      std::printf("%d %ld\n", successes, count);
    }
    return kOk;
  } catch (const aqs::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsageError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Augmented-query summarization toolkit"};
  app.require_subcommand(1);
  Options opt;

  CLI::App* sum = app.add_subcommand(
      "summarize", "Summarize one context against one query");
  sum->add_option("--query", opt.query, "Topical query")->required();
  auto* ctx = sum->add_option("--context", opt.context, "Context text");
  sum->add_option("--context-file", opt.context_file,
                  "File holding the context text")
      ->excludes(ctx);
  sum->add_option("--trace", opt.trace_path,
                  "Write the full pipeline trace (JSON) to this path");
  add_common_options(sum, opt);

  CLI::App* batch = app.add_subcommand(
      "batch", "Run the pipeline over a triplets file and score it");
  batch->add_option("--input", opt.input, "Line-delimited JSON triplets")
      ->required();
  batch->add_option("--output", opt.output, "Results file to write")
      ->required();
  add_common_options(batch, opt);

  CLI::App* sim = app.add_subcommand(
      "simulate", "Estimate majority-vote success probability");
  sim->add_option("--p", opt.sim_p, "Per-query success probability")
      ->required();
  sim->add_option("--k", opt.sim_k, "Queries per document")
      ->check(CLI::PositiveNumber);
  sim->add_option("--trials", opt.sim_trials, "Number of simulated documents")
      ->check(CLI::PositiveNumber);
  sim->add_option("--seed", opt.sim_seed, "Random seed");
  sim->add_flag("--verbose", opt.verbose,
                "Echo the effective configuration to stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  if (sum->parsed()) {
    return cmd_summarize(sum, opt);
  }
  if (batch->parsed()) {
    return cmd_batch(batch, opt);
  }
  return cmd_simulate(opt);
}
