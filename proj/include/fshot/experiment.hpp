#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "fshot/corpus.hpp"
#include "fshot/eval.hpp"
#include "fshot/llm_gateway.hpp"
#include "fshot/prompter.hpp"
#include "fshot/segmenter.hpp"

namespace fshot {

struct CorpusSpec {
  std::filesystem::path path;
  CorpusFormat format = CorpusFormat::tsv;
  std::string lang_src;
  std::string lang_tgt;
};

// One experiment = one test set translated by every requested method against
// every endpoint, then scored. Loaded from a JSON file; relative paths are
// resolved against the file's directory.
struct ExperimentConfig {
  std::string name = "experiment";
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  std::vector<Method> methods;
  int index_window = FragmentIndex::kDefaultMaxWindow;

  bool has_direct = false;
  CorpusSpec direct;  // retrieval corpus for rs/fs

  bool has_pivot = false;
  std::string lang_pivot;
  CorpusSpec source_pivot;  // pf stage 1
  CorpusSpec pivot_target;  // pf stage 2

  std::filesystem::path test_source;
  std::filesystem::path test_reference;
  std::string lang_src;  // display names for the prompt templates
  std::string lang_tgt;

  PromptConfig prompt;           // method and seed are overwritten per run
  NontranslatablePolicy policy;  // coverage accounting
  std::vector<EndpointConfig> endpoints;  // empty → mock only
  int workers = 4;
  int bootstrap_resamples = 1000;

  static ExperimentConfig from_file(const std::filesystem::path& path);
  void validate() const;  // throws std::invalid_argument; checks referenced paths exist

  // Canonical JSON rendering of every field.
  std::string resolved_json() const;
  // FNV-1a hex over resolved_json() minus output_dir: relocating the
  // artifacts does not change what experiment they came from.
  std::string hash() const;
};

struct ExperimentCell {
  Method method = Method::zs;
  std::string model;
  EvalReport report;
  std::size_t test_sentences = 0;
  std::size_t failed_sentences = 0;  // records carrying an error
  std::size_t new_records = 0;       // appended this run (0 on a clean resume)
  double mean_prompt_chars = 0.0;
  double mean_creation_seconds = 0.0;  // wall clock; stdout only, never in artifacts
  double mean_latency_seconds = 0.0;
};

struct ExperimentResult {
  std::string config_hash;
  std::uint64_t seed = 0;
  double copy_through_bleu = 0.0;
  std::vector<ExperimentCell> cells;
  // model → "contender>baseline" → one-sided p that the contender beats it.
  std::map<std::string, std::map<std::string, double>> significance;
};

// One endpoint description in the same JSON shape the experiment config's
// endpoints array uses. Throws std::invalid_argument on parse problems.
EndpointConfig endpoint_config_from_file(const std::filesystem::path& path);

// Runs every (method, model) cell: build prompts → translate → score. Writes
// prompts_{method}.jsonl, records_{method}_{model}.jsonl,
// report_{method}_{model}.json, config_resolved.json, summary.json, and
// summary.txt under output_dir. Record files are appended to and resume where
// an interrupted run stopped; everything else is rewritten in place. With the
// mock endpoint all artifacts are byte-identical for equal (inputs, config,
// seed). Wall-clock timing goes to `log` only. Throws on any stage failure,
// leaving completed artifacts behind for the next attempt.
ExperimentResult run_experiment(const ExperimentConfig& config, bool force_mock,
                                std::ostream& log);

}  // namespace fshot
