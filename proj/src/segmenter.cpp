#include "fshot/segmenter.hpp"

#include <algorithm>

#include "fshot/unicode.hpp"

namespace fshot {

std::size_t Segmentation::covered_token_count() const {
  std::size_t n = 0;
  for (const auto& m : matched) {
    n += m.fragment.size();
  }
  return n;
}

Segmentation segment(const Sentence& sentence, const FragmentIndex& index) {
  Segmentation seg;
  seg.input = sentence;
  const auto& tokens = sentence.tokens;
  const auto window = static_cast<std::size_t>(index.max_window());

  std::size_t pos = 0;
  while (pos < tokens.size()) {
    std::size_t matched_len = 0;
    for (std::size_t len = std::min(window, tokens.size() - pos); len >= 1; --len) {
      if (!index.lookup_tokens(tokens.data() + pos, len).empty()) {
        matched_len = len;
        break;
      }
    }
    if (matched_len == 0) {
      seg.unmatched.push_back(pos);
      ++pos;
      continue;
    }
    MatchedFragment m;
    m.start = pos;
    m.fragment.tokens.reserve(matched_len);
    for (std::size_t k = 0; k < matched_len; ++k) {
      m.fragment.tokens.push_back(tokens[pos + k].text);
    }
    seg.matched.push_back(std::move(m));
    pos += matched_len;
  }
  return seg;
}

bool NontranslatablePolicy::is_nontranslatable(const Sentence& sentence,
                                               std::size_t token_idx) const {
  const Token& token = sentence.tokens[token_idx];
  if (exclude_punct && token.is_punct) {
    return true;
  }
  const auto cps = uni::decode_utf8(token.text);
  if (exclude_digit_tokens) {
    for (const auto& c : cps) {
      if (uni::is_digit(c.value)) {
        return true;
      }
    }
  }
  if (exclude_capitalized_noninitial && !cps.empty() && uni::is_upper(cps.front().value)) {
    // Sentence-initial means the first non-punctuation token, so an opening
    // quote does not demote the real first word.
    std::size_t initial = 0;
    while (initial < sentence.tokens.size() && sentence.tokens[initial].is_punct) {
      ++initial;
    }
    if (token_idx != initial) {
      return true;
    }
  }
  if (!stoplist.empty() && stoplist.count(uni::fold_case(token.text)) > 0) {
    return true;
  }
  return false;
}

CoverageStats coverage(const Segmentation& seg, const NontranslatablePolicy& policy) {
  CoverageStats stats;
  const auto& tokens = seg.input.tokens;

  std::vector<bool> in_fragment(tokens.size(), false);
  for (const auto& m : seg.matched) {
    stats.fragment_size_histogram[static_cast<int>(m.fragment.size())]++;
    for (std::size_t k = 0; k < m.fragment.size(); ++k) {
      in_fragment[m.start + k] = true;
    }
  }

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (policy.is_nontranslatable(seg.input, i)) {
      continue;
    }
    ++stats.translatable_tokens;
    if (in_fragment[i]) {
      ++stats.covered_tokens;
    }
  }
  stats.coverage = stats.translatable_tokens == 0
                       ? 1.0
                       : static_cast<double>(stats.covered_tokens) /
                             static_cast<double>(stats.translatable_tokens);
  return stats;
}

}  // namespace fshot
