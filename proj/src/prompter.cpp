#include "fshot/prompter.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "fshot/rng.hpp"
#include "fshot/segmenter.hpp"
#include "fshot/unicode.hpp"

namespace fshot {

namespace {

// Sampling-stream tags: one sub-stream per purpose, so adding fragments or
// reordering work never reshuffles another fragment's choices.
constexpr std::uint64_t kStreamRandomShot = 1;
constexpr std::uint64_t kStreamFragment = 2;
constexpr std::uint64_t kStreamStage2 = 3;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

const SentencePair& pair_by_id(const ParallelCorpus& corpus, int id) {
  const auto idx = static_cast<std::size_t>(id);
  if (idx < corpus.pairs.size() && corpus.pairs[idx].id == id) {
    return corpus.pairs[idx];
  }
  for (const auto& pair : corpus.pairs) {
    if (pair.id == id) {
      return pair;
    }
  }
  throw std::out_of_range("no pair with id " + std::to_string(id) + " in corpus " + corpus.name);
}

std::string instruction_text(const PromptConfig& config, const std::string& raw) {
  return "Translate the following sentence from " + config.lang_src + " into " + config.lang_tgt +
         ":\n\n>>" + raw + "<<";
}

std::string pair_lines(const char* indent, const std::string& first_name, const std::string& first,
                       const std::string& second_name, const std::string& second) {
  std::string out = indent;
  out += "- " + first_name + ": " + first + "\n";
  out += indent;
  out += "- " + second_name + ": " + second;
  return out;
}

std::string block_header(const char* indent, const std::string& fragment_display) {
  std::string out = indent;
  out += "Examples that illustrate the usage of **" + fragment_display + "**:";
  return out;
}

std::string render_stage2_block(const Stage2Block& block, const ParallelCorpus& corpus_pt,
                                const PromptConfig& config) {
  std::string out = block_header("    ", block.fragment.display());
  for (int id : block.example_ids) {
    const auto& pair = pair_by_id(corpus_pt, id);
    out += "\n\n" + pair_lines("    ", config.lang_pivot, pair.source.raw, config.lang_tgt,
                               pair.target.raw);
  }
  return out;
}

// FS and PF stage-1 blocks share this shape; PF examples carry nested blocks
// and translate into the pivot language rather than the target.
std::string render_block(const PromptBlock& block, const ParallelCorpus& retrieval,
                         const ParallelCorpus* corpus_pt, const PromptConfig& config) {
  const std::string& second_name = corpus_pt != nullptr ? config.lang_pivot : config.lang_tgt;
  std::string out = block_header("  ", block.fragment.display());
  for (const auto& ex : block.examples) {
    const auto& pair = pair_by_id(retrieval, ex.id);
    out += "\n\n" +
           pair_lines("  ", config.lang_src, pair.source.raw, second_name, pair.target.raw);
    if (corpus_pt != nullptr) {
      for (const auto& nested : ex.nested) {
        out += "\n\n" + render_stage2_block(nested, *corpus_pt, config);
      }
    }
  }
  return out;
}

std::string render_prompt(const std::string& instruction, const std::vector<PromptBlock>& blocks,
                          const ParallelCorpus& retrieval, const ParallelCorpus* corpus_pt,
                          const PromptConfig& config) {
  std::string out = instruction;
  for (const auto& block : blocks) {
    out += "\n\n" + render_block(block, retrieval, corpus_pt, config);
  }
  return out;
}

std::vector<PromptBlock> sample_stage1_blocks(const Segmentation& seg, const FragmentIndex& index,
                                              int per_fragment, std::uint64_t seed) {
  std::vector<PromptBlock> blocks;
  blocks.reserve(seg.matched.size());
  for (const auto& m : seg.matched) {
    const auto& ids = index.lookup(m.fragment);
    auto gen = rng::derive(seed, {kStreamFragment, m.start});
    PromptBlock block;
    block.fragment = m.fragment;
    block.start = m.start;
    for (int id : rng::sample(ids, static_cast<std::size_t>(per_fragment), gen)) {
      block.examples.push_back(ExampleRef{id, {}});
    }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

void attach_stage2(std::vector<PromptBlock>& blocks, const ParallelCorpus& corpus_sp,
                   const FragmentIndex& index_pt, const ParallelCorpus& corpus_pt,
                   const PromptConfig& config) {
  for (auto& block : blocks) {
    for (std::size_t e = 0; e < block.examples.size(); ++e) {
      auto& ex = block.examples[e];
      const Sentence& pivot = pair_by_id(corpus_sp, ex.id).target;
      const std::string pivot_norm = normalize_for_join(pivot.raw);
      const auto pivot_seg = segment(pivot, index_pt);
      for (const auto& pm : pivot_seg.matched) {
        std::vector<int> allowed;
        for (int id : index_pt.lookup(pm.fragment)) {
          if (normalize_for_join(pair_by_id(corpus_pt, id).source.raw) != pivot_norm) {
            allowed.push_back(id);
          }
        }
        if (allowed.empty()) {
          continue;
        }
        auto gen = rng::derive(config.rng_seed, {kStreamStage2, block.start, e, pm.start});
        Stage2Block nested;
        nested.fragment = pm.fragment;
        nested.example_ids = rng::sample(std::move(allowed),
                                         static_cast<std::size_t>(config.pf_examples_stage2), gen);
        ex.nested.push_back(std::move(nested));
      }
    }
  }
}

struct Stage2Ref {
  std::size_t block;
  std::size_t example;
  std::size_t nested;
  std::size_t rendered_size;
};

// Drops the largest qualifying nested block; returns false when none qualify.
bool drop_one_stage2(std::vector<PromptBlock>& blocks, const ParallelCorpus& corpus_pt,
                     const PromptConfig& config, bool only_single_token) {
  Stage2Ref best{0, 0, 0, 0};
  bool found = false;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (std::size_t e = 0; e < blocks[b].examples.size(); ++e) {
      const auto& nested = blocks[b].examples[e].nested;
      for (std::size_t n = 0; n < nested.size(); ++n) {
        if (only_single_token && nested[n].fragment.size() != 1) {
          continue;
        }
        const std::size_t size =
            uni::count_codepoints(render_stage2_block(nested[n], corpus_pt, config));
        if (!found || size > best.rendered_size) {
          best = {b, e, n, size};
          found = true;
        }
      }
    }
  }
  if (!found) {
    return false;
  }
  auto& nested = blocks[best.block].examples[best.example].nested;
  nested.erase(nested.begin() + static_cast<std::ptrdiff_t>(best.nested));
  return true;
}

bool drop_one_stage1_block(std::vector<PromptBlock>& blocks, const ParallelCorpus& corpus_sp,
                           const ParallelCorpus& corpus_pt, const PromptConfig& config) {
  if (blocks.empty()) {
    return false;
  }
  std::size_t best = 0;
  std::size_t best_size = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const std::size_t size =
        uni::count_codepoints(render_block(blocks[b], corpus_sp, &corpus_pt, config));
    if (b == 0 || size > best_size) {
      best = b;
      best_size = size;
    }
  }
  blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(best));
  return true;
}

void finish(PromptSpec& spec, std::string text, const Timer& timer) {
  spec.char_count = uni::count_codepoints(text);
  spec.text = std::move(text);
  spec.creation_seconds = timer.seconds();
}

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::zs: return "zs";
    case Method::rs: return "rs";
    case Method::fs: return "fs";
    case Method::pf: return "pf";
  }
  throw std::logic_error("unreachable method");
}

Method parse_method(std::string_view name) {
  if (name == "zs") return Method::zs;
  if (name == "rs") return Method::rs;
  if (name == "fs") return Method::fs;
  if (name == "pf") return Method::pf;
  throw std::invalid_argument("unknown method '" + std::string(name) +
                              "' (expected zs, rs, fs or pf)");
}

void PromptConfig::validate() const {
  if (lang_src.empty() || lang_tgt.empty()) {
    throw std::invalid_argument("source and target language display names must be set");
  }
  if (rs_pairs < 1 || fs_examples_per_fragment < 1 || pf_examples_stage1 < 1 ||
      pf_examples_stage2 < 1 || pf_fallback_examples < 1) {
    throw std::invalid_argument("example counts must be at least 1");
  }
  if (pf_fallback_examples > pf_examples_stage1) {
    throw std::invalid_argument("pf_fallback_examples must not exceed pf_examples_stage1");
  }
  if (char_budget < 1) {
    throw std::invalid_argument("char_budget must be positive");
  }
}

std::vector<Fragment> PromptSpec::fragments_used() const {
  std::vector<Fragment> out;
  out.reserve(blocks.size());
  for (const auto& block : blocks) {
    out.push_back(block.fragment);
  }
  return out;
}

PromptSpec build_zero_shot(const Sentence& sentence, const PromptConfig& config) {
  config.validate();
  Timer timer;
  PromptSpec spec;
  spec.method = Method::zs;
  spec.input = sentence;
  finish(spec, instruction_text(config, sentence.raw), timer);
  return spec;
}

PromptSpec build_random_shot(const Sentence& sentence, const ParallelCorpus& corpus,
                             const PromptConfig& config) {
  config.validate();
  if (corpus.size() < static_cast<std::size_t>(config.rs_pairs)) {
    throw std::invalid_argument("corpus '" + corpus.name + "' has " +
                                std::to_string(corpus.size()) + " pairs but rs_pairs=" +
                                std::to_string(config.rs_pairs));
  }
  Timer timer;
  PromptSpec spec;
  spec.method = Method::rs;
  spec.input = sentence;

  auto gen = rng::derive(config.rng_seed, {kStreamRandomShot});
  std::string text;
  for (std::size_t pos :
       rng::sample_indices(corpus.size(), static_cast<std::size_t>(config.rs_pairs), gen)) {
    const auto& pair = corpus.pairs[pos];
    spec.random_example_ids.push_back(pair.id);
    text += pair_lines("", config.lang_src, pair.source.raw, config.lang_tgt, pair.target.raw);
    text += "\n\n";
  }
  text += instruction_text(config, sentence.raw);
  finish(spec, std::move(text), timer);
  return spec;
}

PromptSpec build_fragment_shot(const Sentence& sentence, const FragmentIndex& index,
                               const ParallelCorpus& corpus, const PromptConfig& config) {
  config.validate();
  Timer timer;
  PromptSpec spec;
  spec.method = Method::fs;
  spec.input = sentence;
  spec.blocks = sample_stage1_blocks(segment(sentence, index), index,
                                     config.fs_examples_per_fragment, config.rng_seed);
  finish(spec,
         render_prompt(instruction_text(config, sentence.raw), spec.blocks, corpus, nullptr,
                       config),
         timer);
  return spec;
}

PromptSpec build_pivoted_fragment_shot(const Sentence& sentence, const FragmentIndex& index_sp,
                                       const ParallelCorpus& corpus_sp,
                                       const FragmentIndex& index_pt,
                                       const ParallelCorpus& corpus_pt,
                                       const PromptConfig& config) {
  config.validate();
  if (config.lang_pivot.empty()) {
    throw std::invalid_argument("pivot language display name must be set for pivoted prompts");
  }
  Timer timer;
  PromptSpec spec;
  spec.method = Method::pf;
  spec.input = sentence;

  spec.blocks = sample_stage1_blocks(segment(sentence, index_sp), index_sp,
                                     config.pf_examples_stage1, config.rng_seed);
  attach_stage2(spec.blocks, corpus_sp, index_pt, corpus_pt, config);

  const std::string instruction = instruction_text(config, sentence.raw);
  const auto budget = static_cast<std::size_t>(config.char_budget);
  auto rendered = [&] {
    return render_prompt(instruction, spec.blocks, corpus_sp, &corpus_pt, config);
  };

  std::string text = rendered();
  if (uni::count_codepoints(text) > budget) {
    // The published reduction: fewer stage-1 examples per fragment. Truncation
    // equals re-sampling because the sampler is prefix-stable in k.
    spec.used_fallback = true;
    for (auto& block : spec.blocks) {
      if (block.examples.size() > static_cast<std::size_t>(config.pf_fallback_examples)) {
        block.examples.resize(static_cast<std::size_t>(config.pf_fallback_examples));
      }
    }
    text = rendered();
  }
  while (uni::count_codepoints(text) > budget &&
         drop_one_stage2(spec.blocks, corpus_pt, config, true)) {
    ++spec.dropped_stage2_blocks;
    text = rendered();
  }
  while (uni::count_codepoints(text) > budget &&
         drop_one_stage2(spec.blocks, corpus_pt, config, false)) {
    ++spec.dropped_stage2_blocks;
    text = rendered();
  }
  while (uni::count_codepoints(text) > budget &&
         drop_one_stage1_block(spec.blocks, corpus_sp, corpus_pt, config)) {
    ++spec.dropped_stage1_blocks;
    text = rendered();
  }
  if (uni::count_codepoints(text) > budget) {
    spec.over_budget = true;
  }
  finish(spec, std::move(text), timer);
  return spec;
}

std::string to_json_line(const PromptSpec& spec, int sentence_id, bool include_timings) {
  nlohmann::ordered_json j;
  j["sentence_id"] = sentence_id;
  j["method"] = method_name(spec.method);
  j["input"] = spec.input.raw;
  j["char_count"] = spec.char_count;
  if (spec.method == Method::rs) {
    j["example_ids"] = spec.random_example_ids;
  }
  if (spec.method == Method::fs || spec.method == Method::pf) {
    auto blocks = nlohmann::ordered_json::array();
    for (const auto& block : spec.blocks) {
      nlohmann::ordered_json jb;
      jb["fragment"] = block.fragment.display();
      jb["start"] = block.start;
      auto examples = nlohmann::ordered_json::array();
      for (const auto& ex : block.examples) {
        if (spec.method == Method::fs) {
          examples.push_back(ex.id);
        } else {
          nlohmann::ordered_json je;
          je["id"] = ex.id;
          auto nested = nlohmann::ordered_json::array();
          for (const auto& n : ex.nested) {
            nested.push_back({{"fragment", n.fragment.display()}, {"ids", n.example_ids}});
          }
          je["nested"] = nested;
          examples.push_back(je);
        }
      }
      jb["examples"] = examples;
      blocks.push_back(jb);
    }
    j["blocks"] = blocks;
  }
  if (spec.method == Method::pf) {
    j["used_fallback"] = spec.used_fallback;
    j["dropped_stage2_blocks"] = spec.dropped_stage2_blocks;
    j["dropped_stage1_blocks"] = spec.dropped_stage1_blocks;
    j["over_budget"] = spec.over_budget;
  }
  if (include_timings) {
    j["creation_seconds"] = spec.creation_seconds;
  }
  j["text"] = spec.text;
  return j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

PromptSpec prompt_spec_from_json_line(const std::string& line, int* sentence_id) {
  try {
    const auto j = nlohmann::json::parse(line);
    PromptSpec spec;
    spec.method = parse_method(j.at("method").get<std::string>());
    spec.input = make_sentence(j.at("input").get<std::string>());
    spec.text = j.at("text").get<std::string>();
    spec.char_count = j.at("char_count").get<std::size_t>();
    if (sentence_id != nullptr) *sentence_id = j.at("sentence_id").get<int>();
    return spec;
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("bad prompt line: ") + e.what());
  }
}

}  // namespace fshot
