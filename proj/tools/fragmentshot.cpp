#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fshot/corpus.hpp"
#include "fshot/eval.hpp"
#include "fshot/experiment.hpp"
#include "fshot/fragment_index.hpp"
#include "fshot/llm_gateway.hpp"
#include "fshot/prompter.hpp"
#include "fshot/segmenter.hpp"

namespace stdfs = std::filesystem;
using namespace fshot;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

void require_file(const std::string& path, const char* what) {
  if (!stdfs::exists(path))
    throw std::invalid_argument(std::string("missing ") + what + ": " + path);
}

std::vector<std::string> read_input_lines(const std::string& text_arg,
                                          const std::string& input_arg) {
  if (!text_arg.empty() && !input_arg.empty())
    throw std::invalid_argument("--text and --input are mutually exclusive");
  if (!text_arg.empty()) return {text_arg};
  std::vector<std::string> lines;
  std::string line;
  if (!input_arg.empty()) {
    require_file(input_arg, "input file");
    std::ifstream in(input_arg, std::ios::binary);
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  } else {
    while (std::getline(std::cin, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  }
  if (lines.empty()) throw std::invalid_argument("no input sentences given");
  return lines;
}

std::string fixed(double value, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, value);
  return buf;
}

// Shared flags for the commands that load or build a fragment index.
struct IndexArgs {
  std::string corpus_path;
  std::string format = "tsv";
  std::string lang_src;
  std::string lang_tgt;
  std::string index_path;
  int window = FragmentIndex::kDefaultMaxWindow;
  bool no_case_fold = false;

  void add_options(CLI::App* cmd, bool allow_saved) {
    cmd->add_option("--corpus", corpus_path, "Parallel corpus to index");
    cmd->add_option("--format", format, "Corpus format: tsv or jsonl")
        ->check(CLI::IsMember({"tsv", "jsonl"}));
    cmd->add_option("--lang-src", lang_src, "Source language name");
    cmd->add_option("--lang-tgt", lang_tgt, "Target language name");
    cmd->add_option("--window", window, "Largest indexed n-gram length");
    cmd->add_flag("--no-case-fold", no_case_fold, "Match fragments case-sensitively");
    if (allow_saved) cmd->add_option("--index", index_path, "Previously saved index file");
  }

  FragmentIndex load_or_build() const {
    if (!index_path.empty()) {
      if (!corpus_path.empty())
        throw std::invalid_argument("--index and --corpus are mutually exclusive");
      require_file(index_path, "index file");
      return FragmentIndex::load(index_path);
    }
    if (corpus_path.empty()) throw std::invalid_argument("either --corpus or --index is required");
    if (lang_src.empty() || lang_tgt.empty())
      throw std::invalid_argument("--lang-src and --lang-tgt are required with --corpus");
    require_file(corpus_path, "corpus file");
    const auto corpus =
        load_corpus(corpus_path, parse_corpus_format(format), lang_src, lang_tgt);
    return FragmentIndex::build(corpus, window, !no_case_fold);
  }
};

struct PolicyArgs {
  bool keep_punct = false;
  bool keep_digits = false;
  bool keep_capitalized = false;
  std::vector<std::string> stoplist;

  void add_options(CLI::App* cmd) {
    cmd->add_flag("--keep-punct", keep_punct, "Count punctuation as translatable");
    cmd->add_flag("--keep-digits", keep_digits, "Count digit tokens as translatable");
    cmd->add_flag("--keep-capitalized", keep_capitalized,
                  "Count mid-sentence capitalized tokens as translatable");
    cmd->add_option("--stoplist", stoplist, "Comma-separated tokens to exclude")
        ->delimiter(',');
  }

  NontranslatablePolicy policy() const {
    NontranslatablePolicy p;
    p.exclude_punct = !keep_punct;
    p.exclude_digit_tokens = !keep_digits;
    p.exclude_capitalized_noninitial = !keep_capitalized;
    p.stoplist.insert(stoplist.begin(), stoplist.end());
    return p;
  }
};

struct Hypotheses {
  std::vector<std::string> texts;
  std::size_t failed = 0;
  std::size_t missing = 0;
  std::string method;
  std::string model;
};

Hypotheses hypotheses_from_records(const std::string& records_path, std::size_t n) {
  const auto records = load_records(records_path);
  Hypotheses out;
  out.texts.assign(n, std::string{});
  std::vector<bool> seen(n, false);
  for (const auto& rec : records) {
    if (out.method.empty()) {
      out.method = method_name(rec.method);
      out.model = rec.model;
    }
    if (rec.sentence_id < 0 || rec.sentence_id >= static_cast<int>(n)) continue;
    seen[static_cast<std::size_t>(rec.sentence_id)] = true;
    if (!rec.error.empty()) {
      ++out.failed;
      continue;
    }
    out.texts[static_cast<std::size_t>(rec.sentence_id)] = rec.extracted_translation;
  }
  for (bool s : seen)
    if (!s) ++out.missing;
  return out;
}

int cmd_build_index(const IndexArgs& args, const std::string& output) {
  if (args.corpus_path.empty()) throw std::invalid_argument("--corpus is required");
  if (args.lang_src.empty() || args.lang_tgt.empty())
    throw std::invalid_argument("--lang-src and --lang-tgt are required");
  require_file(args.corpus_path, "corpus file");
  LoadStats stats;
  const auto corpus = load_corpus(args.corpus_path, parse_corpus_format(args.format),
                                  args.lang_src, args.lang_tgt, &stats);
  const auto index = FragmentIndex::build(corpus, args.window, !args.no_case_fold);
  std::cout << "pairs: " << corpus.size() << "\n";
  std::cout << "skipped empty: " << stats.skipped_empty << "\n";
  std::cout << "window: " << index.max_window() << "\n";
  std::cout << "fragment keys: " << index.key_count() << "\n";
  std::cout << "posting entries: " << index.posting_entries() << "\n";
  if (!output.empty()) {
    index.save(output);
    std::cout << "index written to " << output << "\n";
  }
  return 0;
}

struct AlignArgs {
  std::string source_pivot_path;
  std::string pivot_target_path;
  std::string source_pivot_format = "tsv";
  std::string pivot_target_format = "tsv";
  std::string lang_src;
  std::string lang_pivot;
  std::string lang_tgt;
  std::string output;
};

int cmd_align_pivot(const AlignArgs& args) {
  require_file(args.source_pivot_path, "source-pivot corpus");
  require_file(args.pivot_target_path, "pivot-target corpus");
  const auto sp = load_corpus(args.source_pivot_path,
                              parse_corpus_format(args.source_pivot_format), args.lang_src,
                              args.lang_pivot);
  const auto pt = load_corpus(args.pivot_target_path,
                              parse_corpus_format(args.pivot_target_format), args.lang_pivot,
                              args.lang_tgt);
  JoinStats stats;
  const auto joined = pivot_join(sp, pt, PivotSide::target, PivotSide::source, &stats);
  save_tsv(joined, args.output);
  std::cout << "matched pivots: " << stats.matched_pivots << "\n";
  std::cout << "multi-match pivots: " << stats.multi_match_pivots << "\n";
  std::cout << "pairs emitted: " << stats.emitted << "\n";
  std::cout << "duplicates removed: " << stats.deduped << "\n";
  std::cout << "joined corpus written to " << args.output << "\n";
  return 0;
}

int cmd_segment(const IndexArgs& index_args, const PolicyArgs& policy_args,
                const std::string& text_arg, const std::string& input_arg) {
  const auto index = index_args.load_or_build();
  const auto policy = policy_args.policy();
  for (const auto& line : read_input_lines(text_arg, input_arg)) {
    const auto seg = segment(make_sentence(line), index);
    const auto cov = coverage(seg, policy);
    std::cout << "> " << line << "\n";
    std::cout << "matched:";
    if (seg.matched.empty()) std::cout << " (none)";
    for (const auto& m : seg.matched)
      std::cout << " \"" << m.fragment.display() << "\"@" << m.start;
    std::cout << "\n";
    std::cout << "unmatched:";
    if (seg.unmatched.empty()) std::cout << " (none)";
    for (std::size_t idx : seg.unmatched)
      std::cout << " " << seg.input.tokens[idx].text << "@" << idx;
    std::cout << "\n";
    std::cout << "coverage: " << cov.covered_tokens << "/" << cov.translatable_tokens << " = "
              << fixed(cov.coverage, 3) << "\n";
  }
  return 0;
}

struct PromptArgs {
  std::string method = "zs";
  std::string corpus_path;
  std::string corpus_format = "tsv";
  std::string source_pivot_path;
  std::string source_pivot_format = "tsv";
  std::string pivot_target_path;
  std::string pivot_target_format = "tsv";
  std::string lang_src;
  std::string lang_tgt;
  std::string lang_pivot;
  std::string text_arg;
  std::string input_arg;
  std::string output;
  int window = FragmentIndex::kDefaultMaxWindow;
  int rs_pairs = 16;
  int examples_per_fragment = 6;
  int stage1_examples = 3;
  int stage2_examples = 3;
  int fallback_examples = 2;
  int char_budget = 30000;
  bool text_only = false;
  bool timings = false;
};

int cmd_prompt(const PromptArgs& args, std::uint64_t seed) {
  const Method method = parse_method(args.method);
  PromptConfig config;
  config.method = method;
  config.rs_pairs = args.rs_pairs;
  config.fs_examples_per_fragment = args.examples_per_fragment;
  config.pf_examples_stage1 = args.stage1_examples;
  config.pf_examples_stage2 = args.stage2_examples;
  config.pf_fallback_examples = args.fallback_examples;
  config.char_budget = args.char_budget;
  config.rng_seed = seed;

  ParallelCorpus direct;
  FragmentIndex direct_index;
  ParallelCorpus source_pivot;
  ParallelCorpus pivot_target;
  FragmentIndex sp_index;
  FragmentIndex pt_index;

  if (method == Method::rs || method == Method::fs) {
    if (args.corpus_path.empty())
      throw std::invalid_argument("--corpus is required for rs/fs prompts");
    if (args.lang_src.empty() || args.lang_tgt.empty())
      throw std::invalid_argument("--lang-src and --lang-tgt are required");
    require_file(args.corpus_path, "corpus file");
    direct = load_corpus(args.corpus_path, parse_corpus_format(args.corpus_format),
                         args.lang_src, args.lang_tgt);
    if (method == Method::fs) direct_index = FragmentIndex::build(direct, args.window);
    config.lang_src = args.lang_src;
    config.lang_tgt = args.lang_tgt;
  } else if (method == Method::pf) {
    if (args.source_pivot_path.empty() || args.pivot_target_path.empty())
      throw std::invalid_argument(
          "--source-pivot-corpus and --pivot-target-corpus are required for pf prompts");
    if (args.lang_src.empty() || args.lang_tgt.empty() || args.lang_pivot.empty())
      throw std::invalid_argument("--lang-src, --lang-tgt, and --lang-pivot are required");
    require_file(args.source_pivot_path, "source-pivot corpus");
    require_file(args.pivot_target_path, "pivot-target corpus");
    source_pivot = load_corpus(args.source_pivot_path,
                               parse_corpus_format(args.source_pivot_format), args.lang_src,
                               args.lang_pivot);
    pivot_target = load_corpus(args.pivot_target_path,
                               parse_corpus_format(args.pivot_target_format), args.lang_pivot,
                               args.lang_tgt);
    sp_index = FragmentIndex::build(source_pivot, args.window);
    pt_index = FragmentIndex::build(pivot_target, args.window);
    config.lang_src = args.lang_src;
    config.lang_tgt = args.lang_tgt;
    config.lang_pivot = args.lang_pivot;
  } else {
    if (args.lang_src.empty() || args.lang_tgt.empty())
      throw std::invalid_argument("--lang-src and --lang-tgt are required");
    config.lang_src = args.lang_src;
    config.lang_tgt = args.lang_tgt;
  }
  config.validate();

  const auto lines = read_input_lines(args.text_arg, args.input_arg);
  std::ostringstream out;
  int sentence_id = 0;
  for (const auto& line : lines) {
    const Sentence sentence = make_sentence(line);
    PromptSpec spec;
    switch (method) {
      case Method::zs:
        spec = build_zero_shot(sentence, config);
        break;
      case Method::rs:
        spec = build_random_shot(sentence, direct, config);
        break;
      case Method::fs:
        spec = build_fragment_shot(sentence, direct_index, direct, config);
        break;
      case Method::pf:
        spec = build_pivoted_fragment_shot(sentence, sp_index, source_pivot, pt_index,
                                           pivot_target, config);
        break;
    }
    if (args.text_only) {
      if (sentence_id > 0) out << "\f\n";
      out << spec.text << "\n";
    } else {
      out << to_json_line(spec, sentence_id, args.timings) << "\n";
    }
    ++sentence_id;
  }

  if (args.output.empty()) {
    std::cout << out.str();
  } else {
    std::ofstream file(args.output, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot write " + args.output);
    file << out.str();
    std::cout << sentence_id << " prompts written to " << args.output << "\n";
  }
  return 0;
}

struct TranslateArgs {
  std::string prompts_path;
  std::string output;
  std::string endpoint_config;
  int workers = 4;
  bool mock = false;
};

int cmd_translate(const TranslateArgs& args, std::uint64_t seed) {
  require_file(args.prompts_path, "prompts file");
  if (args.mock != args.endpoint_config.empty())
    throw std::invalid_argument("exactly one of --mock or --endpoint-config is required");

  std::vector<PromptSpec> prompts;
  {
    std::ifstream in(args.prompts_path, std::ios::binary);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      prompts.push_back(prompt_spec_from_json_line(line));
    }
  }
  if (prompts.empty()) throw std::invalid_argument("prompts file holds no prompts");

  std::unique_ptr<ChatClient> client;
  BatchOptions options;
  options.workers = args.workers;
  options.seed = seed;
  if (args.mock) {
    client = std::make_unique<MockChatClient>();
    options.model = "mock";
  } else {
    require_file(args.endpoint_config, "endpoint config");
    EndpointConfig endpoint = endpoint_config_from_file(args.endpoint_config);
    options.model = endpoint.model;
    client = std::make_unique<HttpChatClient>(std::move(endpoint));
  }

  const BatchSummary summary = run_batch(prompts, *client, args.output, options);
  std::cout << "completed: " << summary.completed << "\n";
  std::cout << "skipped (already present): " << summary.skipped << "\n";
  std::cout << "failed: " << summary.failed << "\n";
  for (const auto& [method, latency] : summary.mean_latency_by_method)
    std::cout << "mean latency " << method_name(method) << ": " << fixed(latency, 3) << " s\n";
  std::cout << "records written to " << args.output << "\n";
  return 0;
}

struct EvaluateArgs {
  std::string records_path;
  std::string reference_path;
  std::string source_path;
  std::string baseline_path;
  int resamples = 1000;
};

int cmd_evaluate(const EvaluateArgs& args, std::uint64_t seed) {
  require_file(args.records_path, "records file");
  require_file(args.reference_path, "reference file");

  std::vector<std::string> references;
  {
    std::ifstream in(args.reference_path, std::ios::binary);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      references.push_back(line);
    }
  }
  if (references.empty()) throw std::invalid_argument("reference file is empty");

  const Hypotheses hyps = hypotheses_from_records(args.records_path, references.size());
  if (hyps.missing > 0)
    std::cerr << "warning: " << hyps.missing << " sentences have no record; scored as empty\n";

  const BleuScore bleu = corpus_bleu(hyps.texts, references);
  const BootstrapCi ci = bootstrap_ci(hyps.texts, references, args.resamples, 0.95, seed);
  std::cout << "records: " << args.records_path << "  (method " << hyps.method << ", model "
            << hyps.model << ")\n";
  std::cout << "sentences: " << references.size() << "  failed: " << hyps.failed << "\n";
  std::cout << "BLEU: " << fixed(bleu.score, 2) << "  [" << fixed(ci.low, 2) << ", "
            << fixed(ci.high, 2) << "] (95% CI, " << args.resamples << " resamples)\n";
  std::cout << "precisions: " << fixed(bleu.precisions[0], 1) << "/"
            << fixed(bleu.precisions[1], 1) << "/" << fixed(bleu.precisions[2], 1) << "/"
            << fixed(bleu.precisions[3], 1) << "  brevity penalty: "
            << fixed(bleu.brevity_penalty, 3) << "\n";

  if (!args.source_path.empty()) {
    require_file(args.source_path, "source file");
    std::vector<std::string> sources;
    std::ifstream in(args.source_path, std::ios::binary);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      sources.push_back(line);
    }
    std::cout << "copy-through BLEU: " << fixed(copy_through_bleu(sources, references).score, 2)
              << "\n";
  }

  if (!args.baseline_path.empty()) {
    require_file(args.baseline_path, "baseline records");
    const Hypotheses base = hypotheses_from_records(args.baseline_path, references.size());
    const BleuScore base_bleu = corpus_bleu(base.texts, references);
    const double p =
        paired_significance(base.texts, hyps.texts, references, args.resamples, seed);
    std::cout << "baseline: " << args.baseline_path << "  (method " << base.method
              << ")  BLEU: " << fixed(base_bleu.score, 2) << "\n";
    std::cout << "p (this > baseline): " << fixed(p, 4) << (p < 0.05 ? "  *" : "") << "\n";
  }
  return 0;
}

struct CorrelateArgs {
  std::string records_path;
  std::string reference_path;
  std::string source_path;
};

int cmd_correlate(const CorrelateArgs& args, const IndexArgs& index_args,
                  const PolicyArgs& policy_args) {
  require_file(args.records_path, "records file");
  require_file(args.reference_path, "reference file");
  require_file(args.source_path, "source file");

  const auto index = index_args.load_or_build();
  const auto policy = policy_args.policy();

  std::vector<std::string> sources;
  std::vector<std::string> references;
  {
    std::ifstream src(args.source_path, std::ios::binary);
    std::ifstream ref(args.reference_path, std::ios::binary);
    std::string line;
    while (std::getline(src, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      sources.push_back(line);
    }
    while (std::getline(ref, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      references.push_back(line);
    }
  }
  if (sources.size() != references.size())
    throw std::invalid_argument("source and reference line counts differ");
  if (sources.empty()) throw std::invalid_argument("source file is empty");

  const Hypotheses hyps = hypotheses_from_records(args.records_path, references.size());

  std::vector<double> cov;
  std::vector<double> scores;
  double cov_sum = 0.0;
  std::map<int, std::size_t> histogram;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const auto stats = coverage(segment(make_sentence(sources[i]), index), policy);
    cov.push_back(stats.coverage);
    cov_sum += stats.coverage;
    for (const auto& [size, count] : stats.fragment_size_histogram) histogram[size] += count;
    scores.push_back(sentence_bleu(hyps.texts[i], references[i]));
  }
  const double mean = cov_sum / static_cast<double>(cov.size());
  double var = 0.0;
  for (double c : cov) var += (c - mean) * (c - mean);
  var /= static_cast<double>(cov.size());

  std::cout << "sentences: " << sources.size() << "\n";
  std::cout << "coverage: mean " << fixed(mean, 3) << "  sd " << fixed(std::sqrt(var), 3) << "\n";
  std::cout << "fragment sizes:";
  if (histogram.empty()) std::cout << " (none)";
  for (const auto& [size, count] : histogram) std::cout << " " << size << ":" << count;
  std::cout << "\n";
  try {
    const Correlation corr = pearson(cov, scores);
    std::cout << "coverage vs sentence BLEU: r = " << fixed(corr.r, 3)
              << "  p = " << fixed(corr.p_value, 4) << (corr.significant ? "  *" : "") << "\n";
  } catch (const std::invalid_argument&) {
    std::cout << "coverage vs sentence BLEU: undefined (constant input)\n";
  }
  return 0;
}

int cmd_run(const std::string& config_path, bool mock, bool seed_set, std::uint64_t seed,
            const std::string& output_dir) {
  if (config_path.empty()) throw std::invalid_argument("--config is required");
  require_file(config_path, "config file");
  ExperimentConfig config = ExperimentConfig::from_file(config_path);
  if (seed_set) config.seed = seed;
  if (!output_dir.empty()) config.output_dir = output_dir;
  const ExperimentResult result = run_experiment(config, mock, std::cout);
  std::cout << "config hash: " << result.config_hash << "\n";
  std::cout << "artifacts in " << config.output_dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coverage-maximizing in-context-learning prompts for low-resource MT"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string global_config;
  std::string global_output_dir;
  bool global_mock = false;
  auto* seed_opt = app.add_option("--seed", seed, "Seed for every sampled decision");
  app.add_option("--config", global_config, "Experiment config file (run)");
  app.add_option("--output-dir", global_output_dir, "Artifact directory override (run)");
  app.add_flag("--mock", global_mock, "Use the deterministic offline endpoint");

  // build-index
  auto* build_cmd = app.add_subcommand("build-index", "Build a fragment index from a corpus");
  build_cmd->fallthrough();
  IndexArgs build_args;
  std::string build_output;
  build_args.add_options(build_cmd, false);
  build_cmd->add_option("--output", build_output, "Where to save the index");

  // align-pivot
  auto* align_cmd =
      app.add_subcommand("align-pivot", "Join two corpora through their shared pivot side");
  align_cmd->fallthrough();
  AlignArgs align_args;
  align_cmd->add_option("--source-pivot", align_args.source_pivot_path, "Source–pivot corpus")
      ->required();
  align_cmd->add_option("--pivot-target", align_args.pivot_target_path, "Pivot–target corpus")
      ->required();
  align_cmd->add_option("--source-pivot-format", align_args.source_pivot_format, "tsv or jsonl");
  align_cmd->add_option("--pivot-target-format", align_args.pivot_target_format, "tsv or jsonl");
  align_cmd->add_option("--lang-src", align_args.lang_src, "Source language")->required();
  align_cmd->add_option("--lang-pivot", align_args.lang_pivot, "Pivot language")->required();
  align_cmd->add_option("--lang-tgt", align_args.lang_tgt, "Target language")->required();
  align_cmd->add_option("--output", align_args.output, "Joined TSV path")->required();

  // segment
  auto* segment_cmd =
      app.add_subcommand("segment", "Greedy longest-match segmentation of sentences");
  segment_cmd->fallthrough();
  IndexArgs segment_index;
  PolicyArgs segment_policy;
  std::string segment_text;
  std::string segment_input;
  segment_index.add_options(segment_cmd, true);
  segment_policy.add_options(segment_cmd);
  segment_cmd->add_option("--text", segment_text, "One sentence given inline");
  segment_cmd->add_option("--input", segment_input, "File with one sentence per line");

  // prompt
  auto* prompt_cmd = app.add_subcommand("prompt", "Render prompts for test sentences");
  prompt_cmd->fallthrough();
  PromptArgs prompt_args;
  prompt_cmd->add_option("--method", prompt_args.method, "zs, rs, fs, or pf")->required();
  prompt_cmd->add_option("--corpus", prompt_args.corpus_path, "Direct retrieval corpus (rs/fs)");
  prompt_cmd->add_option("--format", prompt_args.corpus_format, "tsv or jsonl");
  prompt_cmd->add_option("--source-pivot-corpus", prompt_args.source_pivot_path,
                         "Stage-1 corpus (pf)");
  prompt_cmd->add_option("--source-pivot-format", prompt_args.source_pivot_format,
                         "tsv or jsonl");
  prompt_cmd->add_option("--pivot-target-corpus", prompt_args.pivot_target_path,
                         "Stage-2 corpus (pf)");
  prompt_cmd->add_option("--pivot-target-format", prompt_args.pivot_target_format,
                         "tsv or jsonl");
  prompt_cmd->add_option("--lang-src", prompt_args.lang_src, "Source language display name");
  prompt_cmd->add_option("--lang-tgt", prompt_args.lang_tgt, "Target language display name");
  prompt_cmd->add_option("--lang-pivot", prompt_args.lang_pivot, "Pivot language display name");
  prompt_cmd->add_option("--text", prompt_args.text_arg, "One sentence given inline");
  prompt_cmd->add_option("--input", prompt_args.input_arg, "File with one sentence per line");
  prompt_cmd->add_option("--output", prompt_args.output, "JSONL output path (default stdout)");
  prompt_cmd->add_option("--window", prompt_args.window, "Largest indexed n-gram length");
  prompt_cmd->add_option("--rs-pairs", prompt_args.rs_pairs, "Random pairs per rs prompt");
  prompt_cmd->add_option("--examples-per-fragment", prompt_args.examples_per_fragment,
                         "Example cap per fs fragment");
  prompt_cmd->add_option("--stage1-examples", prompt_args.stage1_examples,
                         "pf stage-1 example cap");
  prompt_cmd->add_option("--stage2-examples", prompt_args.stage2_examples,
                         "pf stage-2 example cap");
  prompt_cmd->add_option("--fallback-examples", prompt_args.fallback_examples,
                         "pf stage-1 cap once over budget");
  prompt_cmd->add_option("--char-budget", prompt_args.char_budget, "Prompt size ceiling");
  prompt_cmd->add_flag("--text-only", prompt_args.text_only,
                       "Print prompt texts separated by form-feed lines");
  prompt_cmd->add_flag("--timings", prompt_args.timings,
                       "Include wall-clock creation time in the JSONL");

  // translate
  auto* translate_cmd = app.add_subcommand("translate", "Send prompts to an endpoint");
  translate_cmd->fallthrough();
  TranslateArgs translate_args;
  translate_cmd->add_option("--prompts", translate_args.prompts_path, "Prompt JSONL file")
      ->required();
  translate_cmd->add_option("--output", translate_args.output, "Record JSONL path")->required();
  translate_cmd->add_option("--endpoint-config", translate_args.endpoint_config,
                            "Endpoint description JSON");
  translate_cmd->add_option("--workers", translate_args.workers, "Parallel request workers");

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a record file against references");
  evaluate_cmd->fallthrough();
  EvaluateArgs evaluate_args;
  evaluate_cmd->add_option("--records", evaluate_args.records_path, "Record JSONL file")
      ->required();
  evaluate_cmd->add_option("--reference", evaluate_args.reference_path,
                           "Reference file, one sentence per line")
      ->required();
  evaluate_cmd->add_option("--source", evaluate_args.source_path,
                           "Source file for the copy-through baseline");
  evaluate_cmd->add_option("--baseline", evaluate_args.baseline_path,
                           "Baseline record file for the paired test");
  evaluate_cmd->add_option("--resamples", evaluate_args.resamples, "Bootstrap resamples");

  // correlate
  auto* correlate_cmd =
      app.add_subcommand("correlate", "Coverage statistics and coverage–BLEU correlation");
  correlate_cmd->fallthrough();
  CorrelateArgs correlate_args;
  IndexArgs correlate_index;
  PolicyArgs correlate_policy;
  correlate_cmd->add_option("--records", correlate_args.records_path, "Record JSONL file")
      ->required();
  correlate_cmd->add_option("--reference", correlate_args.reference_path, "Reference file")
      ->required();
  correlate_cmd->add_option("--source", correlate_args.source_path, "Test source file")
      ->required();
  correlate_index.add_options(correlate_cmd, true);
  correlate_policy.add_options(correlate_cmd);

  // run
  auto* run_cmd = app.add_subcommand("run", "Full experiment from a config file");
  run_cmd->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const std::string name = e.get_name();
    if (name == "CallForHelp" || name == "CallForAllHelp" || name == "CallForVersion")
      return app.exit(e);
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*build_cmd) return cmd_build_index(build_args, build_output);
    if (*align_cmd) return cmd_align_pivot(align_args);
    if (*segment_cmd)
      return cmd_segment(segment_index, segment_policy, segment_text, segment_input);
    if (*prompt_cmd) return cmd_prompt(prompt_args, seed);
    if (*translate_cmd) {
      translate_args.mock = global_mock;
      return cmd_translate(translate_args, seed);
    }
    if (*evaluate_cmd) return cmd_evaluate(evaluate_args, seed);
    if (*correlate_cmd) return cmd_correlate(correlate_args, correlate_index, correlate_policy);
    if (*run_cmd)
      return cmd_run(global_config, global_mock, seed_opt->count() > 0, seed, global_output_dir);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
