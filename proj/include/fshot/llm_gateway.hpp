#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "fshot/prompter.hpp"

namespace fshot {

struct EndpointConfig {
  std::string base_url;     // e.g. "http://localhost:8080/v1"
  std::string model;
  std::string api_key_env;  // name of the env var holding the key; the key
                            // itself is never stored or serialized
  int max_retries = 3;
  double requests_per_minute = 60.0;
  double timeout_seconds = 120.0;
  double initial_backoff_seconds = 0.5;  // doubled on every retry

  void validate() const;  // throws std::invalid_argument
};

class TransportError : public std::runtime_error {
 public:
  explicit TransportError(const std::string& what, int status = 0)
      : std::runtime_error(what), status_(status) {}
  int status() const { return status_; }  // last HTTP status, 0 for connection-level failures

 private:
  int status_;
};

class ExtractionError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ChatResult {
  std::string text;
  double latency_seconds = 0.0;
  int retries = 0;  // attempts beyond the first
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  // Sends one prompt and returns the message text. Throws TransportError when
  // the request cannot be completed. Must be safe to call from several
  // threads at once.
  virtual ChatResult complete(const std::string& prompt) = 0;
};

// Offline stand-in: answers with a marked copy of the prompt's ">>…<<"
// payload (the whole prompt when no marker is present). Latency is simulated,
// derived from a hash of the prompt so repeated runs agree byte for byte; the
// client never sleeps. A fixed schedule can replace the hash for tests that
// need exact latency arithmetic — entries are consumed in call order, so use
// a single worker when per-record latencies must be reproducible.
class MockChatClient : public ChatClient {
 public:
  MockChatClient() = default;
  explicit MockChatClient(std::vector<double> latency_schedule);

  ChatResult complete(const std::string& prompt) override;

 private:
  std::vector<double> schedule_;
  std::atomic<std::size_t> calls_{0};
};

// Spaces permits so that no more than `per_minute` of them start in any
// sliding minute. Shared by all workers that talk to one endpoint.
class TokenBucket {
 public:
  explicit TokenBucket(double per_minute);  // throws std::invalid_argument on rate <= 0
  void acquire();                           // blocks until a slot is free

 private:
  std::chrono::steady_clock::duration interval_;
  std::chrono::steady_clock::time_point next_;
  std::mutex mu_;
};

// OpenAI-style chat-completions client: POST {base_url}/chat/completions with
// the prompt as a single user message, sampling knobs left at endpoint
// defaults. Transient failures (connection errors, 408, 429, 5xx) are retried
// with exponential backoff up to max_retries; other statuses fail at once.
// The embedded rate limiter serializes request starts across threads.
class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(EndpointConfig config);

  ChatResult complete(const std::string& prompt) override;

 private:
  EndpointConfig config_;
  std::string origin_;       // scheme://host[:port]
  std::string path_prefix_;  // leading path from base_url, no trailing slash
  TokenBucket bucket_;
};

struct Extraction {
  std::string text;
  int strategy = 0;  // 1 = unique >>…<< span, 2 = "Translation:" line, 3 = longest content line
};

// Best-effort recovery of the translation from a model response, trying in
// order: (1) the interior of the response's only ">>…<<" span, kept verbatim;
// (2) the remainder of the first line prefixed "Translation:" (any case);
// (3) the longest trimmed line that does not look like meta-text (lines
// opening with "Note", "I ", or "As an" are passed over). Throws
// ExtractionError when the response is empty or only meta-text remains.
Extraction extract_translation(const std::string& raw);

struct TranslationRecord {
  int sentence_id = 0;
  Method method = Method::zs;
  std::string model;
  std::uint64_t seed = 0;
  std::size_t prompt_chars = 0;
  double latency_seconds = 0.0;
  int extraction_strategy = 0;  // 0 when extraction failed
  std::string raw_response;
  std::string extracted_translation;
  std::string error;  // empty on success; exactly one of translation/error is set
};

std::string to_json_line(const TranslationRecord& record);
TranslationRecord record_from_json_line(const std::string& line);  // throws std::runtime_error

// Strict reader for a finished record file: every line must parse.
std::vector<TranslationRecord> load_records(const std::filesystem::path& path);

struct BatchOptions {
  int workers = 4;
  std::string model = "mock";
  std::uint64_t seed = 0;
};

struct BatchSummary {
  std::vector<TranslationRecord> new_records;  // in file order
  std::size_t completed = 0;                   // newly appended
  std::size_t skipped = 0;                     // already present before the run
  std::size_t failed = 0;                      // new records carrying an error
  double mean_latency_seconds = 0.0;           // over successful new records
  std::map<Method, double> mean_latency_by_method;
};

// Translates every prompt and appends one JSONL record per prompt to
// `output`, creating it when missing. sentence_id is the prompt's position in
// the list. Records already present in the file — keyed by (sentence_id,
// method, model) — are skipped, so an interrupted batch resumes where it
// stopped; a half-written trailing line left by a crash is trimmed before
// appending. Work is spread over `workers` threads, but records land in
// prompt order, so equal inputs produce byte-identical files at any worker
// count. Per-prompt failures become records with `error` set and never abort
// the batch. Throws std::runtime_error when the file cannot be opened or
// holds corrupt interior lines.
BatchSummary run_batch(const std::vector<PromptSpec>& prompts, ChatClient& client,
                       const std::filesystem::path& output, const BatchOptions& options);

}  // namespace fshot
