#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fshot {

// One surface token. Spans are byte offsets into the raw sentence, so slicing
// raw[begin:end] recovers the token text exactly.
struct Token {
  std::string text;
  bool is_punct = false;
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct Sentence {
  std::string raw;
  std::vector<Token> tokens;

  bool empty() const { return tokens.empty(); }
  std::size_t size() const { return tokens.size(); }
};

// Whitespace split with leading/trailing punctuation peeled into separate
// single-character tokens. Internal apostrophes are untouched, so elided forms
// like "tl'eghes" stay one token.
std::vector<Token> tokenize(std::string_view raw);
Sentence make_sentence(std::string raw);

struct SentencePair {
  int id = 0;
  Sentence source;
  Sentence target;
};

// Language tags live on the corpus; every pair shares them.
struct ParallelCorpus {
  std::string name;
  std::string lang_src;
  std::string lang_tgt;
  std::vector<SentencePair> pairs;

  std::size_t size() const { return pairs.size(); }
};

enum class CorpusFormat { tsv, jsonl };

CorpusFormat parse_corpus_format(std::string_view name);

struct LoadStats {
  std::size_t loaded = 0;
  std::size_t skipped_empty = 0;
};

// Throws std::runtime_error naming the line for malformed records, and for
// unreadable files.
ParallelCorpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                           std::string lang_src, std::string lang_tgt,
                           LoadStats* stats = nullptr);

void save_tsv(const ParallelCorpus& corpus, const std::filesystem::path& path);

// Trim, collapse internal whitespace runs, canonical composition. No case
// folding: the joined corpora share their Italian side verbatim.
std::string normalize_for_join(std::string_view s);

enum class PivotSide { source, target };

struct JoinStats {
  std::size_t matched_pivots = 0;     // distinct pivot sentences present on both sides
  std::size_t multi_match_pivots = 0; // pivots producing more than one output pair
  std::size_t emitted = 0;            // pairs after dedup
  std::size_t deduped = 0;            // duplicates removed
};

// Exact-match join on normalized pivot sentences. One-to-many matches emit the
// full cartesian product; identical output pairs are deduplicated.
// Throws std::invalid_argument if the pivot sides' language tags differ.
ParallelCorpus pivot_join(const ParallelCorpus& a, const ParallelCorpus& b, PivotSide a_side,
                          PivotSide b_side, JoinStats* stats = nullptr);

}  // namespace fshot
