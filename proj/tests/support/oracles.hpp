#pragma once

// Brute-force reference implementations used to cross-check the indexed fast
// paths. These deliberately avoid FragmentIndex and the hash-join in
// pivot_join: containment is a direct token scan, the join is nested loops.

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "fshot/corpus.hpp"
#include "fshot/unicode.hpp"

namespace oracle {

inline std::vector<std::string> folded_tokens(const fshot::Sentence& sentence, bool case_fold) {
  std::vector<std::string> out;
  out.reserve(sentence.tokens.size());
  for (const auto& t : sentence.tokens) {
    out.push_back(case_fold ? fshot::uni::fold_case(t.text) : t.text);
  }
  return out;
}

inline bool contains_run(const std::vector<std::string>& haystack,
                         const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > haystack.size()) {
    return false;
  }
  for (std::size_t start = 0; start + needle.size() <= haystack.size(); ++start) {
    bool all = true;
    for (std::size_t k = 0; k < needle.size(); ++k) {
      if (haystack[start + k] != needle[k]) {
        all = false;
        break;
      }
    }
    if (all) {
      return true;
    }
  }
  return false;
}

// Every pair id whose source contains the fragment, by direct scan.
inline std::vector<int> lookup(const fshot::ParallelCorpus& corpus,
                               std::vector<std::string> fragment_tokens, bool case_fold) {
  if (case_fold) {
    for (auto& t : fragment_tokens) {
      t = fshot::uni::fold_case(t);
    }
  }
  std::vector<int> ids;
  for (const auto& pair : corpus.pairs) {
    if (contains_run(folded_tokens(pair.source, case_fold), fragment_tokens)) {
      ids.push_back(pair.id);
    }
  }
  return ids;
}

struct GreedySpan {
  std::size_t start;
  std::size_t length;
};

struct GreedyResult {
  std::vector<GreedySpan> matched;
  std::vector<std::size_t> unmatched;
};

// The same greedy left-to-right longest-match rule, with containment decided
// by scanning the corpus directly.
inline GreedyResult greedy_segment(const fshot::Sentence& sentence,
                                   const fshot::ParallelCorpus& corpus, int max_window,
                                   bool case_fold) {
  GreedyResult result;
  const auto tokens = folded_tokens(sentence, case_fold);
  std::vector<std::vector<std::string>> sources;
  sources.reserve(corpus.pairs.size());
  for (const auto& pair : corpus.pairs) {
    sources.push_back(folded_tokens(pair.source, case_fold));
  }
  std::size_t pos = 0;
  while (pos < tokens.size()) {
    std::size_t found = 0;
    const std::size_t longest =
        std::min(static_cast<std::size_t>(max_window), tokens.size() - pos);
    for (std::size_t len = longest; len >= 1; --len) {
      std::vector<std::string> needle(tokens.begin() + pos, tokens.begin() + pos + len);
      bool anywhere = false;
      for (const auto& src : sources) {
        if (contains_run(src, needle)) {
          anywhere = true;
          break;
        }
      }
      if (anywhere) {
        found = len;
        break;
      }
    }
    if (found == 0) {
      result.unmatched.push_back(pos);
      ++pos;
    } else {
      result.matched.push_back({pos, found});
      pos += found;
    }
  }
  return result;
}

// O(|a|*|b|) join on normalized pivot strings, duplicates removed in emission
// order.
inline std::vector<std::pair<std::string, std::string>> pivot_join(
    const fshot::ParallelCorpus& a, const fshot::ParallelCorpus& b, fshot::PivotSide a_side,
    fshot::PivotSide b_side) {
  auto side = [](const fshot::SentencePair& p, fshot::PivotSide s) -> const fshot::Sentence& {
    return s == fshot::PivotSide::source ? p.source : p.target;
  };
  auto other = [](const fshot::SentencePair& p, fshot::PivotSide s) -> const fshot::Sentence& {
    return s == fshot::PivotSide::source ? p.target : p.source;
  };
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& pa : a.pairs) {
    const std::string ka = fshot::normalize_for_join(side(pa, a_side).raw);
    for (const auto& pb : b.pairs) {
      if (ka != fshot::normalize_for_join(side(pb, b_side).raw)) {
        continue;
      }
      std::pair<std::string, std::string> candidate{other(pa, a_side).raw, other(pb, b_side).raw};
      if (std::find(out.begin(), out.end(), candidate) == out.end()) {
        out.push_back(std::move(candidate));
      }
    }
  }
  return out;
}

}  // namespace oracle
