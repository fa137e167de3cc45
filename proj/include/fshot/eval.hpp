#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fshot/segmenter.hpp"

namespace fshot {

// Corpus-level BLEU with the usual scorer conventions: scorer-internal
// 13a-style tokenization, case-sensitive, exponential smoothing of zero
// counts, multiplicative brevity penalty. Precisions are percentages.
struct BleuScore {
  double score = 0.0;
  std::array<double, 4> precisions{};
  double brevity_penalty = 1.0;
  long hyp_len = 0;
  long ref_len = 0;
};

// The scorer-internal tokenization: ASCII punctuation split from words,
// periods and commas kept inside numbers, dashes split after digits,
// intra-word hyphens and apostrophes preserved, non-ASCII untouched.
std::vector<std::string> bleu_tokenize(std::string_view line);

// Throws std::invalid_argument on empty or unequal-length lists.
BleuScore corpus_bleu(const std::vector<std::string>& hypotheses,
                      const std::vector<std::string>& references);

// Same recipe restricted to one pair, with the effective-order convention so
// short sentences are scored over the n-gram orders they actually have.
double sentence_bleu(std::string_view hypothesis, std::string_view reference);

// corpus_bleu(sources, references): how far one gets by not translating.
BleuScore copy_through_bleu(const std::vector<std::string>& sources,
                            const std::vector<std::string>& references);

struct BootstrapCi {
  double low = 0.0;
  double high = 0.0;
};

// Percentile bootstrap over sentences: resample indices with replacement,
// recompute corpus BLEU from cached per-sentence counts, report the
// (1-level)/2 and 1-(1-level)/2 empirical quantiles (sorted scores, indices
// floor(alpha*n) and ceil((1-alpha)*n)-1). Deterministic given the seed and
// independent of any parallelism.
BootstrapCi bootstrap_ci(const std::vector<std::string>& hypotheses,
                         const std::vector<std::string>& references, int resamples = 1000,
                         double level = 0.95, std::uint64_t seed = 0);

// One-sided paired bootstrap with null calibration: resample sentence indices
// jointly, compute the per-resample score difference (contender - baseline),
// shift the differences to zero mean, and report
// p = (#{shifted >= observed} + 1) / (resamples + 1).
// A system tested against itself yields exactly 1.
double paired_significance(const std::vector<std::string>& baseline_hypotheses,
                           const std::vector<std::string>& contender_hypotheses,
                           const std::vector<std::string>& references, int resamples = 1000,
                           std::uint64_t seed = 0);

struct Correlation {
  double r = 0.0;
  double p_value = 1.0;   // two-sided t-test, n-2 degrees of freedom
  bool significant = false;  // p_value < 0.05
};

// Sample Pearson correlation. Throws std::invalid_argument for unequal or
// too-short series (< 3) and for zero variance, where r is undefined.
Correlation pearson(const std::vector<double>& xs, const std::vector<double>& ys);

struct EvalReport {
  BleuScore corpus;
  BootstrapCi ci95;
  std::vector<double> per_sentence_bleu;
  std::vector<CoverageStats> coverage;  // empty when no segmentation applies
  Correlation coverage_bleu;            // valid only when has_correlation
  bool has_correlation = false;
  std::map<std::pair<std::string, std::string>, double> significance;
};

}  // namespace fshot
