#include "fshot/llm_gateway.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <thread>

namespace fshot {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// The input sentence is the prompt's only ">>…<<" span.
std::string marked_payload(const std::string& prompt) {
  const auto open = prompt.find(">>");
  if (open != std::string::npos) {
    const auto close = prompt.find("<<", open + 2);
    if (close != std::string::npos) return prompt.substr(open + 2, close - open - 2);
  }
  return prompt;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string::npos) nl = text.size();
    std::string line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = nl + 1;
  }
  return lines;
}

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool iequals_prefix(const std::string& s, std::size_t at, std::string_view prefix) {
  if (s.size() - at < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[at + i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i])))
      return false;
  }
  return true;
}

std::string record_key(int sentence_id, Method method, const std::string& model) {
  std::string key = std::to_string(sentence_id);
  key += '\x1f';
  key += method_name(method);
  key += '\x1f';
  key += model;
  return key;
}

}  // namespace

void EndpointConfig::validate() const {
  if (base_url.empty()) throw std::invalid_argument("base_url must not be empty");
  if (model.empty()) throw std::invalid_argument("model must not be empty");
  if (max_retries < 0) throw std::invalid_argument("max_retries must be >= 0");
  if (!(requests_per_minute > 0.0))
    throw std::invalid_argument("requests_per_minute must be positive");
  if (!(timeout_seconds > 0.0)) throw std::invalid_argument("timeout must be positive");
  if (!(initial_backoff_seconds >= 0.0))
    throw std::invalid_argument("initial backoff must be non-negative");
}

MockChatClient::MockChatClient(std::vector<double> latency_schedule)
    : schedule_(std::move(latency_schedule)) {}

ChatResult MockChatClient::complete(const std::string& prompt) {
  const std::size_t call = calls_.fetch_add(1);
  double latency;
  if (!schedule_.empty()) {
    latency = schedule_[call % schedule_.size()];
  } else {
    latency = 0.05 + static_cast<double>(fnv1a(prompt) % 1024) / 1024.0 * 0.2;
  }
  return {">>" + marked_payload(prompt) + "<<", latency, 0};
}

TokenBucket::TokenBucket(double per_minute) {
  if (!(per_minute > 0.0)) throw std::invalid_argument("rate must be positive");
  interval_ = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(60.0 / per_minute));
  next_ = std::chrono::steady_clock::time_point::min();
}

void TokenBucket::acquire() {
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(mu_);
    slot = std::max(std::chrono::steady_clock::now(), next_);
    next_ = slot + interval_;
  }
  std::this_thread::sleep_until(slot);
}

HttpChatClient::HttpChatClient(EndpointConfig config)
    : config_(std::move(config)), bucket_(config_.requests_per_minute) {
  config_.validate();
  auto scheme_end = config_.base_url.find("://");
  if (scheme_end == std::string::npos)
    throw std::invalid_argument("base_url must carry a scheme: " + config_.base_url);
  auto path_start = config_.base_url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    origin_ = config_.base_url;
  } else {
    origin_ = config_.base_url.substr(0, path_start);
    path_prefix_ = config_.base_url.substr(path_start);
  }
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

ChatResult HttpChatClient::complete(const std::string& prompt) {
  json payload = {
      {"model", config_.model},
      {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
  };
  const std::string body =
      payload.dump(-1, ' ', false, json::error_handler_t::replace);

  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str()))
      headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  const auto timeout = std::chrono::milliseconds(
      static_cast<long long>(config_.timeout_seconds * 1000.0));
  std::string last_error = "no attempt made";
  int last_status = 0;

  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      const double backoff =
          config_.initial_backoff_seconds * static_cast<double>(1 << (attempt - 1));
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
    }
    bucket_.acquire();

    httplib::Client http(origin_);
    http.set_connection_timeout(timeout);
    http.set_read_timeout(timeout);
    http.set_write_timeout(timeout);

    const auto start = std::chrono::steady_clock::now();
    auto res = http.Post(path_prefix_ + "/chat/completions", headers, body, "application/json");
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);

    if (!res) {
      last_error = "transport failure: " + httplib::to_string(res.error());
      last_status = 0;
      continue;  // connection-level problems are always worth retrying
    }
    if (res->status == 200) {
      std::string text;
      try {
        text = json::parse(res->body)
                   .at("choices")
                   .at(0)
                   .at("message")
                   .at("content")
                   .get<std::string>();
      } catch (const std::exception& e) {
        throw TransportError(std::string("malformed response body: ") + e.what(), 200);
      }
      return {std::move(text), elapsed.count(), attempt};
    }
    last_status = res->status;
    last_error = "HTTP " + std::to_string(res->status);
    const bool transient =
        res->status == 408 || res->status == 429 || res->status >= 500;
    if (!transient) break;
  }
  throw TransportError("request failed after retries: " + last_error, last_status);
}

Extraction extract_translation(const std::string& raw) {
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  std::size_t pos = 0;
  while (true) {
    const auto open = raw.find(">>", pos);
    if (open == std::string::npos) break;
    const auto close = raw.find("<<", open + 2);
    if (close == std::string::npos) break;
    spans.emplace_back(open + 2, close);
    pos = close + 2;
  }
  if (spans.size() == 1)
    return {raw.substr(spans[0].first, spans[0].second - spans[0].first), 1};

  const auto lines = split_lines(raw);
  for (const auto& line : lines) {
    std::size_t at = 0;
    while (at < line.size() && std::isspace(static_cast<unsigned char>(line[at]))) ++at;
    if (iequals_prefix(line, at, "translation:")) {
      std::string rest = trim(line.substr(at + 12));
      if (!rest.empty()) return {std::move(rest), 2};
    }
  }

  std::string best;
  for (const auto& line : lines) {
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t.starts_with("Note") || t.starts_with("I ") || t.starts_with("As an")) continue;
    if (t.size() > best.size()) best = std::move(t);
  }
  if (!best.empty()) return {std::move(best), 3};
  throw ExtractionError("no translation found in response");
}

std::string to_json_line(const TranslationRecord& record) {
  ordered_json j;
  j["sentence_id"] = record.sentence_id;
  j["method"] = method_name(record.method);
  j["model"] = record.model;
  j["seed"] = record.seed;
  j["prompt_chars"] = record.prompt_chars;
  j["latency_seconds"] = record.latency_seconds;
  j["extraction_strategy"] = record.extraction_strategy;
  j["raw_response"] = record.raw_response;
  j["extracted_translation"] = record.extracted_translation;
  if (!record.error.empty()) j["error"] = record.error;
  return j.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

TranslationRecord record_from_json_line(const std::string& line) {
  try {
    const json j = json::parse(line);
    TranslationRecord rec;
    rec.sentence_id = j.at("sentence_id").get<int>();
    rec.method = parse_method(j.at("method").get<std::string>());
    rec.model = j.at("model").get<std::string>();
    rec.seed = j.value("seed", std::uint64_t{0});
    rec.prompt_chars = j.value("prompt_chars", std::size_t{0});
    rec.latency_seconds = j.value("latency_seconds", 0.0);
    rec.extraction_strategy = j.value("extraction_strategy", 0);
    rec.raw_response = j.value("raw_response", std::string{});
    rec.extracted_translation = j.value("extracted_translation", std::string{});
    rec.error = j.value("error", std::string{});
    return rec;
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("bad record line: ") + e.what());
  }
}

std::vector<TranslationRecord> load_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open record file: " + path.string());
  std::vector<TranslationRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(record_from_json_line(line));
  }
  return records;
}

BatchSummary run_batch(const std::vector<PromptSpec>& prompts, ChatClient& client,
                       const std::filesystem::path& output, const BatchOptions& options) {
  if (options.workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (options.model.empty()) throw std::invalid_argument("model must not be empty");

  // Resume scan: collect keys of records already on disk. A crash can leave a
  // final line without its newline; that fragment is cut off so the file stays
  // one valid record per line. A malformed line elsewhere means the file was
  // damaged by something other than an interrupted append, so give up.
  std::set<std::string> present;
  if (std::filesystem::exists(output)) {
    std::ifstream in(output, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read record file: " + output.string());
    std::string buffer((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    std::size_t line_start = 0;
    while (line_start < buffer.size()) {
      const auto nl = buffer.find('\n', line_start);
      if (nl == std::string::npos) break;
      const TranslationRecord rec =
          record_from_json_line(buffer.substr(line_start, nl - line_start));
      present.insert(record_key(rec.sentence_id, rec.method, rec.model));
      line_start = nl + 1;
    }
    if (line_start < buffer.size()) std::filesystem::resize_file(output, line_start);
  }

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    if (!present.count(record_key(static_cast<int>(i), prompts[i].method, options.model)))
      pending.push_back(i);
  }

  BatchSummary summary;
  summary.skipped = prompts.size() - pending.size();

  std::ofstream out(output, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("cannot open record file for append: " + output.string());

  std::atomic<std::size_t> cursor{0};
  std::mutex sink_mu;
  std::map<std::size_t, TranslationRecord> ready;
  std::size_t head = 0;

  // Workers race on prompts, but lines are emitted in pending order through
  // the reorder buffer, so the file's bytes do not depend on the worker count.
  auto flush_ready = [&] {
    while (head < pending.size()) {
      auto it = ready.find(pending[head]);
      if (it == ready.end()) break;
      out << to_json_line(it->second) << '\n';
      out.flush();
      summary.new_records.push_back(std::move(it->second));
      ready.erase(it);
      ++head;
    }
  };

  auto work = [&] {
    while (true) {
      const std::size_t slot = cursor.fetch_add(1);
      if (slot >= pending.size()) break;
      const std::size_t i = pending[slot];
      TranslationRecord rec;
      rec.sentence_id = static_cast<int>(i);
      rec.method = prompts[i].method;
      rec.model = options.model;
      rec.seed = options.seed;
      rec.prompt_chars = prompts[i].char_count;
      try {
        ChatResult res = client.complete(prompts[i].text);
        rec.raw_response = res.text;
        rec.latency_seconds = res.latency_seconds;
        const Extraction ex = extract_translation(res.text);
        rec.extracted_translation = ex.text;
        rec.extraction_strategy = ex.strategy;
      } catch (const std::exception& e) {
        rec.error = e.what();
      }
      std::lock_guard lock(sink_mu);
      ready.emplace(i, std::move(rec));
      flush_ready();
    }
  };

  const std::size_t width =
      std::min<std::size_t>(static_cast<std::size_t>(options.workers), pending.size());
  std::vector<std::thread> workers;
  for (std::size_t t = 0; t < width; ++t) workers.emplace_back(work);
  for (auto& t : workers) t.join();

  summary.completed = summary.new_records.size();
  double total = 0.0;
  std::size_t ok = 0;
  std::map<Method, std::pair<double, std::size_t>> by_method;
  for (const auto& rec : summary.new_records) {
    if (!rec.error.empty()) {
      ++summary.failed;
      continue;
    }
    total += rec.latency_seconds;
    ++ok;
    auto& slot = by_method[rec.method];
    slot.first += rec.latency_seconds;
    ++slot.second;
  }
  if (ok > 0) summary.mean_latency_seconds = total / static_cast<double>(ok);
  for (const auto& [method, acc] : by_method)
    summary.mean_latency_by_method[method] = acc.first / static_cast<double>(acc.second);
  return summary;
}

}  // namespace fshot
