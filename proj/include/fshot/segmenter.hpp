#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "fshot/corpus.hpp"
#include "fshot/fragment_index.hpp"

namespace fshot {

struct MatchedFragment {
  Fragment fragment;
  std::size_t start = 0;  // token index in the input sentence
};

// Greedy longest-match partition of a sentence into corpus-attested fragments
// plus the leftover unmatched token indices. Matched spans and unmatched
// indices tile [0, n) exactly.
struct Segmentation {
  Sentence input;
  std::vector<MatchedFragment> matched;
  std::vector<std::size_t> unmatched;

  std::size_t covered_token_count() const;
};

Segmentation segment(const Sentence& sentence, const FragmentIndex& index);

// Which tokens count as untranslatable and are excluded from the coverage
// denominator. The stoplist is matched case-folded.
struct NontranslatablePolicy {
  bool exclude_punct = true;
  bool exclude_digit_tokens = true;
  bool exclude_capitalized_noninitial = true;
  std::unordered_set<std::string> stoplist;

  bool is_nontranslatable(const Sentence& sentence, std::size_t token_idx) const;
};

struct CoverageStats {
  std::size_t covered_tokens = 0;
  std::size_t translatable_tokens = 0;
  double coverage = 1.0;  // covered/translatable; 1 when nothing is translatable
  std::map<int, std::size_t> fragment_size_histogram;
};

CoverageStats coverage(const Segmentation& seg, const NontranslatablePolicy& policy = {});

}  // namespace fshot
