#include "aqs/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <thread>

namespace aqs {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

// Fans QA out over worker threads. Answers land at their query index;
// concurrent completion order never reorders them. If several queries fail,
// the error for the smallest index is rethrown so failures are deterministic
// under any concurrency level.
std::vector<Answer> run_qa(const std::vector<std::string>& queries,
                           const std::string& context, QaBackend& qa,
                           int concurrency) {
  const size_t n = queries.size();
  std::vector<Answer> answers(n);
  std::vector<std::exception_ptr> failures(n);
  std::atomic<size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        if (queries[i].empty()) {
          // Empty paraphrase: QA's non-empty-query precondition would be
          // violated, so record an abstention at this index instead.
          answers[i] = Answer{"", static_cast<int>(i), std::nullopt};
        } else {
          Answer a = qa.answer_question(queries[i], context);
          a.source_query_index = static_cast<int>(i);
          answers[i] = std::move(a);
        }
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };

  const int workers =
      std::max(1, std::min<int>(concurrency, static_cast<int>(n)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  for (const std::exception_ptr& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return answers;
}

}  // namespace

PipelineTrace aqs_summarize(const std::string& query,
                            const std::string& context,
                            const PipelineConfig& config,
                            const BackendSuite& backends) {
  if (query.empty()) throw EmptyInput("aqs_summarize: empty query");
  if (context.empty()) throw EmptyInput("aqs_summarize: empty context");

  PipelineTrace trace;
  trace.query = query;

  if (config.enable_paraphrasing) {
    const auto start = Clock::now();
    auto scored =
        generate_paraphrases(query, config.beam, *backends.scorer);
    if (config.include_original) trace.paraphrases.push_back(query);
    for (auto& [text, logp] : scored) {
      trace.paraphrases.push_back(std::move(text));
    }
    trace.timings.emplace_back("paraphrase", ms_since(start));
  } else {
    trace.paraphrases.push_back(query);
  }

  {
    const auto start = Clock::now();
    trace.answers = run_qa(trace.paraphrases, context, *backends.qa,
                           config.qa_concurrency);
    trace.timings.emplace_back("qa", ms_since(start));
  }

  std::vector<Answer> non_empty;
  for (const Answer& a : trace.answers) {
    if (!a.text.empty()) non_empty.push_back(a);
  }

  if (non_empty.empty()) {
    if (!config.fallback_generic) {
      throw NoAnswers("aqs_summarize: every answer was empty");
    }
    const auto start = Clock::now();
    trace.summary = backends.summarizer->summarize_text(context);
    trace.timings.emplace_back("summarize", ms_since(start));
    trace.fallback = true;
    return trace;
  }

  {
    const auto start = Clock::now();
    if (config.enable_clustering) {
      trace.kept_group = cluster_until_patience(non_empty, config.cluster,
                                                *backends.embedder);
      trace.timings.emplace_back("cluster", ms_since(start));
    } else {
      trace.kept_group.members = non_empty;
    }
  }
  for (const Answer& a : trace.kept_group.members) {
    trace.kept_indices.push_back(a.source_query_index);
  }

  {
    const auto start = Clock::now();
    trace.summary =
        backends.summarizer->summarize_text(trace.kept_group.concat_text());
    trace.timings.emplace_back("summarize", ms_since(start));
  }
  return trace;
}

std::vector<PipelineTrace> batch_summarize(
    const std::vector<std::pair<std::string, std::string>>& items,
    const PipelineConfig& config, const BackendSuite& backends) {
  std::vector<PipelineTrace> traces;
  traces.reserve(items.size());
  for (const auto& [query, context] : items) {
    try {
      traces.push_back(aqs_summarize(query, context, config, backends));
    } catch (const Error& e) {
      PipelineTrace failed;
      failed.query = query;
      failed.error = e.what();
      traces.push_back(std::move(failed));
    }
  }
  return traces;
}

}  // namespace aqs
