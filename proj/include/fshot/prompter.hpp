#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fshot/corpus.hpp"
#include "fshot/fragment_index.hpp"

namespace fshot {

enum class Method { zs, rs, fs, pf };

std::string_view method_name(Method m);
Method parse_method(std::string_view name);  // throws std::invalid_argument

struct PromptConfig {
  Method method = Method::zs;
  std::string lang_src;    // display name, e.g. "Occitan (Aranese)"
  std::string lang_tgt;
  std::string lang_pivot;  // PF only
  int rs_pairs = 16;
  int fs_examples_per_fragment = 6;
  int pf_examples_stage1 = 3;
  int pf_examples_stage2 = 3;
  int pf_fallback_examples = 2;
  int char_budget = 30000;
  std::uint64_t rng_seed = 0;

  void validate() const;  // throws std::invalid_argument on bad counts or names
};

// Retrieved examples for one fragment of a pivot-side sentence.
struct Stage2Block {
  Fragment fragment;
  std::vector<int> example_ids;  // pair ids in the pivot→target corpus
};

struct ExampleRef {
  int id = 0;                      // pair id in the retrieval corpus
  std::vector<Stage2Block> nested; // populated for PF stage-1 examples only
};

// One rendered example block: a matched input fragment plus its sampled pairs.
struct PromptBlock {
  Fragment fragment;
  std::size_t start = 0;  // token position in the input; keys the sampling stream
  std::vector<ExampleRef> examples;
};

struct PromptSpec {
  Method method = Method::zs;
  std::string text;
  Sentence input;
  std::vector<PromptBlock> blocks;      // FS/PF
  std::vector<int> random_example_ids;  // RS
  std::size_t char_count = 0;           // codepoints of text, not bytes
  double creation_seconds = 0.0;

  // Pivoted-prompt budget accounting.
  bool used_fallback = false;            // stage-1 examples reduced to the fallback count
  std::size_t dropped_stage2_blocks = 0; // nested blocks pruned beyond the fallback
  std::size_t dropped_stage1_blocks = 0; // whole fragment blocks pruned
  bool over_budget = false;              // the bare instruction alone exceeds the budget

  std::vector<Fragment> fragments_used() const;
};

PromptSpec build_zero_shot(const Sentence& sentence, const PromptConfig& config);

// Exactly rs_pairs distinct pairs, sampled with the seeded RNG. Throws
// std::invalid_argument when the corpus is smaller than rs_pairs.
PromptSpec build_random_shot(const Sentence& sentence, const ParallelCorpus& corpus,
                             const PromptConfig& config);

// Greedy segmentation plus up to fs_examples_per_fragment sampled pairs per
// matched fragment. A fully unmatched sentence renders identically to ZS.
PromptSpec build_fragment_shot(const Sentence& sentence, const FragmentIndex& index,
                               const ParallelCorpus& corpus, const PromptConfig& config);

// Nested fragment-shot through a pivot language: stage 1 retrieves
// source–pivot pairs, stage 2 illustrates each pivot sentence's fragments with
// pivot–target pairs, excluding pairs whose pivot side equals the stage-1
// pivot sentence. Shrinks to fit char_budget: first the stage-1 fallback, then
// dropping nested blocks (single-token pivot fragments first, largest rendered
// first), then whole fragment blocks.
PromptSpec build_pivoted_fragment_shot(const Sentence& sentence, const FragmentIndex& index_sp,
                                       const ParallelCorpus& corpus_sp,
                                       const FragmentIndex& index_pt,
                                       const ParallelCorpus& corpus_pt,
                                       const PromptConfig& config);

// One JSONL record (no trailing newline). Timings are opt-in so that
// fixed-seed artifacts stay byte-identical across runs.
std::string to_json_line(const PromptSpec& spec, int sentence_id, bool include_timings = false);

// Partial inverse of to_json_line: recovers method, input, text, and
// char_count — what a translation pass needs. Block structure is not
// rebuilt. Throws std::runtime_error on malformed lines.
PromptSpec prompt_spec_from_json_line(const std::string& line, int* sentence_id = nullptr);

}  // namespace fshot
