#include "fshot/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fshot {
namespace {

namespace stdfs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fixed(double value, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, value);
  return buf;
}

std::vector<std::string> read_lines(const stdfs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

void write_text(const stdfs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
}

std::string sanitize_for_filename(const std::string& name) {
  std::string out = name;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
    if (!ok) c = '-';
  }
  return out;
}

stdfs::path resolve_against(const stdfs::path& base, const std::string& p) {
  stdfs::path path(p);
  if (path.is_absolute()) return path;
  return base / path;
}

CorpusSpec parse_corpus_spec(const json& j, const stdfs::path& base) {
  CorpusSpec spec;
  spec.path = resolve_against(base, j.at("path").get<std::string>());
  spec.format = parse_corpus_format(j.value("format", "tsv"));
  spec.lang_src = j.at("lang_src").get<std::string>();
  spec.lang_tgt = j.at("lang_tgt").get<std::string>();
  return spec;
}

ordered_json corpus_spec_json(const CorpusSpec& spec) {
  return {{"path", spec.path.generic_string()},
          {"format", spec.format == CorpusFormat::tsv ? "tsv" : "jsonl"},
          {"lang_src", spec.lang_src},
          {"lang_tgt", spec.lang_tgt}};
}

// Prompt artifacts carry the run's provenance on every line.
std::string annotate_prompt_line(const std::string& line, std::uint64_t seed,
                                 const std::string& config_hash) {
  ordered_json j = ordered_json::parse(line);
  j["seed"] = seed;
  j["config_hash"] = config_hash;
  return j.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

bool wants(const std::vector<Method>& methods, Method m) {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

EndpointConfig parse_endpoint(const json& e) {
  EndpointConfig endpoint;
  endpoint.base_url = e.at("base_url").get<std::string>();
  endpoint.model = e.at("model").get<std::string>();
  endpoint.api_key_env = e.value("api_key_env", std::string{});
  endpoint.max_retries = e.value("max_retries", endpoint.max_retries);
  endpoint.requests_per_minute = e.value("requests_per_minute", endpoint.requests_per_minute);
  endpoint.timeout_seconds = e.value("timeout_seconds", endpoint.timeout_seconds);
  endpoint.initial_backoff_seconds =
      e.value("initial_backoff_seconds", endpoint.initial_backoff_seconds);
  return endpoint;
}

}  // namespace

EndpointConfig endpoint_config_from_file(const stdfs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read endpoint config: " + path.string());
  try {
    const EndpointConfig endpoint = parse_endpoint(json::parse(in));
    endpoint.validate();
    return endpoint;
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception& e) {
    throw std::invalid_argument("bad endpoint config: " + std::string(e.what()));
  }
}

ExperimentConfig ExperimentConfig::from_file(const stdfs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read config file: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const std::exception& e) {
    throw std::invalid_argument("config is not valid JSON: " + std::string(e.what()));
  }

  const stdfs::path base = path.parent_path();
  ExperimentConfig config;
  try {
    config.name = j.value("name", std::string("experiment"));
    config.seed = j.value("seed", std::uint64_t{0});
    config.output_dir = resolve_against(base, j.value("output_dir", std::string("out")));
    for (const auto& m : j.at("methods")) config.methods.push_back(parse_method(m.get<std::string>()));
    config.index_window = j.value("index_window", FragmentIndex::kDefaultMaxWindow);

    if (j.contains("direct_corpus")) {
      config.has_direct = true;
      config.direct = parse_corpus_spec(j.at("direct_corpus"), base);
    }
    if (j.contains("pivot")) {
      const auto& p = j.at("pivot");
      config.has_pivot = true;
      config.lang_pivot = p.at("lang_pivot").get<std::string>();
      config.source_pivot = parse_corpus_spec(p.at("source_pivot_corpus"), base);
      config.pivot_target = parse_corpus_spec(p.at("pivot_target_corpus"), base);
    }

    const auto& t = j.at("test");
    config.test_source = resolve_against(base, t.at("source").get<std::string>());
    config.test_reference = resolve_against(base, t.at("reference").get<std::string>());

    config.lang_src = j.value("lang_src", std::string{});
    config.lang_tgt = j.value("lang_tgt", std::string{});
    if (config.lang_src.empty())
      config.lang_src = config.has_direct ? config.direct.lang_src : config.source_pivot.lang_src;
    if (config.lang_tgt.empty())
      config.lang_tgt = config.has_direct ? config.direct.lang_tgt : config.pivot_target.lang_tgt;

    if (j.contains("prompt")) {
      const auto& p = j.at("prompt");
      config.prompt.rs_pairs = p.value("rs_pairs", config.prompt.rs_pairs);
      config.prompt.fs_examples_per_fragment =
          p.value("fs_examples_per_fragment", config.prompt.fs_examples_per_fragment);
      config.prompt.pf_examples_stage1 =
          p.value("pf_examples_stage1", config.prompt.pf_examples_stage1);
      config.prompt.pf_examples_stage2 =
          p.value("pf_examples_stage2", config.prompt.pf_examples_stage2);
      config.prompt.pf_fallback_examples =
          p.value("pf_fallback_examples", config.prompt.pf_fallback_examples);
    }
    config.prompt.char_budget = j.value("char_budget", config.prompt.char_budget);

    if (j.contains("coverage_policy")) {
      const auto& p = j.at("coverage_policy");
      config.policy.exclude_punct = p.value("exclude_punct", true);
      config.policy.exclude_digit_tokens = p.value("exclude_digit_tokens", true);
      config.policy.exclude_capitalized_noninitial =
          p.value("exclude_capitalized_noninitial", true);
      if (p.contains("stoplist"))
        for (const auto& w : p.at("stoplist"))
          config.policy.stoplist.insert(w.get<std::string>());
    }

    if (j.contains("gateway")) {
      const auto& g = j.at("gateway");
      config.workers = g.value("workers", config.workers);
      config.bootstrap_resamples = g.value("bootstrap_resamples", config.bootstrap_resamples);
    }

    if (j.contains("endpoints")) {
      for (const auto& e : j.at("endpoints")) config.endpoints.push_back(parse_endpoint(e));
    }
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception& e) {
    throw std::invalid_argument("bad config: " + std::string(e.what()));
  }
  return config;
}

void ExperimentConfig::validate() const {
  if (methods.empty()) throw std::invalid_argument("config: methods must not be empty");
  for (std::size_t i = 0; i < methods.size(); ++i)
    for (std::size_t k = i + 1; k < methods.size(); ++k)
      if (methods[i] == methods[k])
        throw std::invalid_argument("config: duplicate method " +
                                    std::string(method_name(methods[i])));
  if ((wants(methods, Method::rs) || wants(methods, Method::fs)) && !has_direct)
    throw std::invalid_argument("config: rs/fs require a direct_corpus");
  if (wants(methods, Method::pf) && !has_pivot)
    throw std::invalid_argument("config: pf requires a pivot section");
  if (index_window < 1) throw std::invalid_argument("config: index_window must be >= 1");
  if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
  if (bootstrap_resamples < 1)
    throw std::invalid_argument("config: bootstrap_resamples must be >= 1");
  if (lang_src.empty() || lang_tgt.empty())
    throw std::invalid_argument("config: language display names must not be empty");

  auto require_file = [](const stdfs::path& p, const char* what) {
    if (!stdfs::exists(p))
      throw std::invalid_argument(std::string("config: missing ") + what + ": " + p.string());
  };
  if (has_direct) require_file(direct.path, "direct corpus");
  if (has_pivot) {
    require_file(source_pivot.path, "source-pivot corpus");
    require_file(pivot_target.path, "pivot-target corpus");
    if (lang_pivot.empty()) throw std::invalid_argument("config: lang_pivot must not be empty");
  }
  require_file(test_source, "test source");
  require_file(test_reference, "test reference");

  PromptConfig pc = prompt;
  pc.lang_src = lang_src;
  pc.lang_tgt = lang_tgt;
  pc.lang_pivot = has_pivot ? lang_pivot : "";
  pc.method = Method::zs;
  pc.validate();
  for (const auto& endpoint : endpoints) endpoint.validate();
}

std::string ExperimentConfig::resolved_json() const {
  ordered_json j;
  j["name"] = name;
  j["seed"] = seed;
  j["output_dir"] = output_dir.generic_string();
  auto method_names = ordered_json::array();
  for (Method m : methods) method_names.push_back(method_name(m));
  j["methods"] = method_names;
  j["index_window"] = index_window;
  if (has_direct) j["direct_corpus"] = corpus_spec_json(direct);
  if (has_pivot) {
    j["pivot"] = {{"lang_pivot", lang_pivot},
                  {"source_pivot_corpus", corpus_spec_json(source_pivot)},
                  {"pivot_target_corpus", corpus_spec_json(pivot_target)}};
  }
  j["test"] = {{"source", test_source.generic_string()},
               {"reference", test_reference.generic_string()}};
  j["lang_src"] = lang_src;
  j["lang_tgt"] = lang_tgt;
  j["char_budget"] = prompt.char_budget;
  j["prompt"] = {{"rs_pairs", prompt.rs_pairs},
                 {"fs_examples_per_fragment", prompt.fs_examples_per_fragment},
                 {"pf_examples_stage1", prompt.pf_examples_stage1},
                 {"pf_examples_stage2", prompt.pf_examples_stage2},
                 {"pf_fallback_examples", prompt.pf_fallback_examples}};
  std::vector<std::string> stoplist(policy.stoplist.begin(), policy.stoplist.end());
  std::sort(stoplist.begin(), stoplist.end());
  j["coverage_policy"] = {
      {"exclude_punct", policy.exclude_punct},
      {"exclude_digit_tokens", policy.exclude_digit_tokens},
      {"exclude_capitalized_noninitial", policy.exclude_capitalized_noninitial},
      {"stoplist", stoplist}};
  j["gateway"] = {{"workers", workers}, {"bootstrap_resamples", bootstrap_resamples}};
  auto endpoint_list = ordered_json::array();
  for (const auto& e : endpoints) {
    endpoint_list.push_back({{"model", e.model},
                             {"base_url", e.base_url},
                             {"api_key_env", e.api_key_env},
                             {"max_retries", e.max_retries},
                             {"requests_per_minute", e.requests_per_minute},
                             {"timeout_seconds", e.timeout_seconds},
                             {"initial_backoff_seconds", e.initial_backoff_seconds}});
  }
  j["endpoints"] = endpoint_list;
  return j.dump(2);
}

std::string ExperimentConfig::hash() const {
  ordered_json j = ordered_json::parse(resolved_json());
  j.erase("output_dir");
  return fnv1a_hex(j.dump(2));
}

ExperimentResult run_experiment(const ExperimentConfig& config, bool force_mock,
                                std::ostream& log) {
  config.validate();
  stdfs::create_directories(config.output_dir);

  const auto sources = read_lines(config.test_source);
  const auto references = read_lines(config.test_reference);
  if (sources.empty()) throw std::runtime_error("test source is empty");
  if (sources.size() != references.size())
    throw std::runtime_error("test source and reference line counts differ: " +
                             std::to_string(sources.size()) + " vs " +
                             std::to_string(references.size()));
  std::vector<Sentence> inputs;
  inputs.reserve(sources.size());
  for (const auto& line : sources) inputs.push_back(make_sentence(line));

  ExperimentResult result;
  result.config_hash = config.hash();
  result.seed = config.seed;

  {
    ordered_json j = ordered_json::parse(config.resolved_json());
    j["config_hash"] = result.config_hash;
    write_text(config.output_dir / "config_resolved.json", j.dump(2) + "\n");
  }

  const bool need_direct = wants(config.methods, Method::rs) || wants(config.methods, Method::fs);
  const bool need_pivot = wants(config.methods, Method::pf);
  ParallelCorpus direct;
  FragmentIndex direct_index;
  if (need_direct) {
    direct = load_corpus(config.direct.path, config.direct.format, config.direct.lang_src,
                         config.direct.lang_tgt);
    if (wants(config.methods, Method::fs))
      direct_index = FragmentIndex::build(direct, config.index_window);
  }
  ParallelCorpus source_pivot;
  ParallelCorpus pivot_target;
  FragmentIndex sp_index;
  FragmentIndex pt_index;
  if (need_pivot) {
    source_pivot = load_corpus(config.source_pivot.path, config.source_pivot.format,
                               config.source_pivot.lang_src, config.source_pivot.lang_tgt);
    pivot_target = load_corpus(config.pivot_target.path, config.pivot_target.format,
                               config.pivot_target.lang_src, config.pivot_target.lang_tgt);
    sp_index = FragmentIndex::build(source_pivot, config.index_window);
    pt_index = FragmentIndex::build(pivot_target, config.index_window);
  }

  result.copy_through_bleu = copy_through_bleu(sources, references).score;

  struct Endpoint {
    std::string model;
    std::unique_ptr<ChatClient> client;
  };
  std::vector<Endpoint> endpoints;
  if (force_mock || config.endpoints.empty()) {
    endpoints.push_back({"mock", std::make_unique<MockChatClient>()});
  } else {
    for (const auto& e : config.endpoints)
      endpoints.push_back({e.model, std::make_unique<HttpChatClient>(e)});
  }

  // Prompts are method-specific, shared across endpoints.
  std::map<Method, std::vector<PromptSpec>> prompts_by_method;
  std::map<Method, std::vector<CoverageStats>> coverage_by_method;
  for (Method m : config.methods) {
    PromptConfig pc = config.prompt;
    pc.method = m;
    pc.rng_seed = config.seed;
    pc.lang_src = config.lang_src;
    pc.lang_tgt = config.lang_tgt;
    pc.lang_pivot = need_pivot ? config.lang_pivot : "";

    std::vector<PromptSpec> prompts;
    prompts.reserve(inputs.size());
    for (const auto& sentence : inputs) {
      switch (m) {
        case Method::zs:
          prompts.push_back(build_zero_shot(sentence, pc));
          break;
        case Method::rs:
          prompts.push_back(build_random_shot(sentence, direct, pc));
          break;
        case Method::fs:
          prompts.push_back(build_fragment_shot(sentence, direct_index, direct, pc));
          break;
        case Method::pf:
          prompts.push_back(build_pivoted_fragment_shot(sentence, sp_index, source_pivot,
                                                        pt_index, pivot_target, pc));
          break;
      }
    }

    std::string lines;
    for (std::size_t i = 0; i < prompts.size(); ++i) {
      lines += annotate_prompt_line(to_json_line(prompts[i], static_cast<int>(i)), config.seed,
                                    result.config_hash);
      lines += '\n';
    }
    write_text(config.output_dir /
                   (std::string("prompts_") + std::string(method_name(m)) + ".jsonl"),
               lines);

    if (m == Method::fs || m == Method::pf) {
      const FragmentIndex& index = (m == Method::fs) ? direct_index : sp_index;
      std::vector<CoverageStats> stats;
      stats.reserve(inputs.size());
      for (const auto& sentence : inputs)
        stats.push_back(coverage(segment(sentence, index), config.policy));
      coverage_by_method[m] = std::move(stats);
    }
    prompts_by_method[m] = std::move(prompts);
  }

  std::map<std::pair<Method, std::string>, std::vector<std::string>> hyps_by_cell;

  for (const auto& endpoint : endpoints) {
    for (Method m : config.methods) {
      const auto& prompts = prompts_by_method.at(m);
      const stdfs::path records_path =
          config.output_dir / (std::string("records_") + std::string(method_name(m)) + "_" +
                               sanitize_for_filename(endpoint.model) + ".jsonl");
      BatchOptions options;
      options.workers = config.workers;
      options.model = endpoint.model;
      options.seed = config.seed;
      const BatchSummary batch = run_batch(prompts, *endpoint.client, records_path, options);

      const auto records = load_records(records_path);
      std::vector<std::string> hyps(inputs.size());
      std::size_t failed = 0;
      double latency_total = 0.0;
      std::size_t latency_count = 0;
      for (const auto& rec : records) {
        if (rec.sentence_id < 0 || rec.sentence_id >= static_cast<int>(inputs.size())) continue;
        if (!rec.error.empty()) {
          ++failed;
          continue;
        }
        hyps[static_cast<std::size_t>(rec.sentence_id)] = rec.extracted_translation;
        latency_total += rec.latency_seconds;
        ++latency_count;
      }

      ExperimentCell cell;
      cell.method = m;
      cell.model = endpoint.model;
      cell.test_sentences = inputs.size();
      cell.failed_sentences = failed;
      cell.new_records = batch.completed;
      cell.mean_latency_seconds =
          latency_count > 0 ? latency_total / static_cast<double>(latency_count) : 0.0;
      double chars = 0.0;
      double creation = 0.0;
      for (const auto& p : prompts) {
        chars += static_cast<double>(p.char_count);
        creation += p.creation_seconds;
      }
      cell.mean_prompt_chars = chars / static_cast<double>(prompts.size());
      cell.mean_creation_seconds = creation / static_cast<double>(prompts.size());

      EvalReport report;
      report.corpus = corpus_bleu(hyps, references);
      report.ci95 = bootstrap_ci(hyps, references, config.bootstrap_resamples, 0.95, config.seed);
      report.per_sentence_bleu.reserve(inputs.size());
      for (std::size_t i = 0; i < inputs.size(); ++i)
        report.per_sentence_bleu.push_back(sentence_bleu(hyps[i], references[i]));
      if (auto it = coverage_by_method.find(m); it != coverage_by_method.end()) {
        report.coverage = it->second;
        std::vector<double> cov;
        cov.reserve(report.coverage.size());
        for (const auto& c : report.coverage) cov.push_back(c.coverage);
        try {
          report.coverage_bleu = pearson(cov, report.per_sentence_bleu);
          report.has_correlation = true;
        } catch (const std::invalid_argument&) {
          report.has_correlation = false;  // constant coverage or too few points
        }
      }
      cell.report = std::move(report);

      ordered_json jr;
      jr["config_hash"] = result.config_hash;
      jr["seed"] = config.seed;
      jr["method"] = method_name(m);
      jr["model"] = endpoint.model;
      jr["test_sentences"] = cell.test_sentences;
      jr["failed_sentences"] = cell.failed_sentences;
      jr["bleu"] = {{"score", cell.report.corpus.score},
                    {"precisions", cell.report.corpus.precisions},
                    {"brevity_penalty", cell.report.corpus.brevity_penalty},
                    {"hyp_len", cell.report.corpus.hyp_len},
                    {"ref_len", cell.report.corpus.ref_len}};
      jr["ci95"] = {{"low", cell.report.ci95.low}, {"high", cell.report.ci95.high}};
      jr["copy_through_bleu"] = result.copy_through_bleu;
      jr["mean_prompt_chars"] = cell.mean_prompt_chars;
      jr["mean_latency_seconds"] = cell.mean_latency_seconds;
      if (!cell.report.coverage.empty()) {
        double mean = 0.0;
        for (const auto& c : cell.report.coverage) mean += c.coverage;
        mean /= static_cast<double>(cell.report.coverage.size());
        double var = 0.0;
        for (const auto& c : cell.report.coverage) var += (c.coverage - mean) * (c.coverage - mean);
        var /= static_cast<double>(cell.report.coverage.size());
        std::map<int, std::size_t> histogram;
        for (const auto& c : cell.report.coverage)
          for (const auto& [size, count] : c.fragment_size_histogram) histogram[size] += count;
        ordered_json jh;
        for (const auto& [size, count] : histogram) jh[std::to_string(size)] = count;
        jr["coverage"] = {{"mean", mean}, {"stdev", std::sqrt(var)}, {"fragment_sizes", jh}};
      }
      if (cell.report.has_correlation) {
        jr["coverage_bleu_pearson"] = {{"r", cell.report.coverage_bleu.r},
                                       {"p_value", cell.report.coverage_bleu.p_value},
                                       {"significant", cell.report.coverage_bleu.significant}};
      }
      jr["per_sentence_bleu"] = cell.report.per_sentence_bleu;
      write_text(config.output_dir /
                     (std::string("report_") + std::string(method_name(m)) + "_" +
                      sanitize_for_filename(endpoint.model) + ".json"),
                 jr.dump(2) + "\n");

      hyps_by_cell[{m, endpoint.model}] = std::move(hyps);
      result.cells.push_back(std::move(cell));
    }

    // One-sided paired tests between every ordered method pair on this model.
    auto& table = result.significance[endpoint.model];
    for (Method contender : config.methods) {
      for (Method baseline : config.methods) {
        if (contender == baseline) continue;
        const auto& hyps_c = hyps_by_cell.at({contender, endpoint.model});
        const auto& hyps_b = hyps_by_cell.at({baseline, endpoint.model});
        const std::string key = std::string(method_name(contender)) + ">" +
                                std::string(method_name(baseline));
        table[key] = paired_significance(hyps_b, hyps_c, references,
                                         config.bootstrap_resamples, config.seed);
      }
    }
  }

  // summary.json
  {
    ordered_json j;
    j["name"] = config.name;
    j["config_hash"] = result.config_hash;
    j["seed"] = config.seed;
    j["test_sentences"] = inputs.size();
    j["copy_through_bleu"] = result.copy_through_bleu;
    auto cells = ordered_json::array();
    for (const auto& cell : result.cells) {
      cells.push_back({{"method", method_name(cell.method)},
                       {"model", cell.model},
                       {"bleu", cell.report.corpus.score},
                       {"ci95", {{"low", cell.report.ci95.low}, {"high", cell.report.ci95.high}}},
                       {"mean_prompt_chars", cell.mean_prompt_chars},
                       {"mean_latency_seconds", cell.mean_latency_seconds},
                       {"failed_sentences", cell.failed_sentences}});
    }
    j["cells"] = cells;
    ordered_json sig;
    for (const auto& [model, table] : result.significance) {
      ordered_json entry;
      for (const auto& [key, p] : table) entry[key] = p;
      sig[model] = entry;
    }
    j["significance"] = sig;
    write_text(config.output_dir / "summary.json", j.dump(2) + "\n");
  }

  // summary.txt — corpus scores with CIs, then the pairwise tests.
  {
    std::ostringstream out;
    out << "Experiment: " << config.name << "\n";
    out << "Config hash: " << result.config_hash << "\n";
    out << "Seed: " << config.seed << "\n";
    out << "Test sentences: " << inputs.size() << "\n";
    out << "Copy-through BLEU: " << fixed(result.copy_through_bleu, 2) << "\n";
    std::string current_model;
    for (const auto& cell : result.cells) {
      if (cell.model != current_model) {
        current_model = cell.model;
        out << "\nModel: " << current_model << "\n";
        out << "  method  BLEU    95% CI            mean chars\n";
      }
      out << "  " << method_name(cell.method);
      out << std::string(8 - std::string(method_name(cell.method)).size(), ' ');
      out << fixed(cell.report.corpus.score, 2);
      out << "   [" << fixed(cell.report.ci95.low, 2) << ", " << fixed(cell.report.ci95.high, 2)
          << "]";
      out << "    " << fixed(cell.mean_prompt_chars, 1) << "\n";
    }
    for (const auto& [model, table] : result.significance) {
      out << "\nPairwise significance, model " << model << " (* = p < 0.05):\n";
      for (const auto& [key, p] : table) {
        out << "  " << key << "  p = " << fixed(p, 4) << (p < 0.05 ? "  *" : "") << "\n";
      }
    }
    write_text(config.output_dir / "summary.txt", out.str());
  }

  // Wall-clock timings never enter the artifacts; report them on the log.
  log << "method  model         prompt_chars  creation_s  latency_s\n";
  for (const auto& cell : result.cells) {
    std::string model = cell.model;
    if (model.size() < 12) model += std::string(12 - model.size(), ' ');
    std::string method(method_name(cell.method));
    method += std::string(6 - method.size(), ' ');
    log << method << "  " << model << "  " << fixed(cell.mean_prompt_chars, 1) << "  "
        << fixed(cell.mean_creation_seconds, 6) << "  " << fixed(cell.mean_latency_seconds, 3)
        << "\n";
  }

  return result;
}

}  // namespace fshot
