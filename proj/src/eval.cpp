#include "fshot/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "fshot/rng.hpp"
#include "fshot/unicode.hpp"

namespace fshot {

namespace {

constexpr std::uint64_t kStreamBootstrap = 10;
constexpr std::uint64_t kStreamSignificance = 11;
constexpr double kLogZero = -9999999999.0;

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos;
       pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

// The first tokenizer rule's character class: ASCII punctuation except the
// comma, hyphen and period, which have their own digit-aware rules.
bool rule1_char(unsigned char c) {
  return (c >= 0x20 && c <= 0x26) || (c >= 0x28 && c <= 0x2B) || c == 0x2F ||
         (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) || (c >= 0x7B && c <= 0x7E);
}

bool ascii_digit(unsigned char c) { return c >= '0' && c <= '9'; }

}  // namespace

std::vector<std::string> bleu_tokenize(std::string_view line) {
  std::string s(line);
  replace_all(s, "<skipped>", "");
  replace_all(s, "-\n", "");
  replace_all(s, "\n", " ");
  if (s.find('&') != std::string::npos) {
    replace_all(s, "&quot;", "\"");
    replace_all(s, "&amp;", "&");
    replace_all(s, "&lt;", "<");
    replace_all(s, "&gt;", ">");
  }
  s = " " + s + " ";

  // Four sequential, non-overlapping substitution passes. Multi-byte UTF-8
  // units never match: every rule only fires on ASCII bytes.
  std::string pass;
  pass.reserve(s.size() * 2);
  for (unsigned char c : s) {
    if (rule1_char(c)) {
      pass += ' ';
      pass += static_cast<char>(c);
      pass += ' ';
    } else {
      pass += static_cast<char>(c);
    }
  }
  s = std::move(pass);

  // Split '.' and ',' off when the previous character is not a digit...
  pass.clear();
  for (std::size_t i = 0; i < s.size();) {
    if (!ascii_digit(s[i]) && i + 1 < s.size() && (s[i + 1] == '.' || s[i + 1] == ',')) {
      pass += s[i];
      pass += ' ';
      pass += s[i + 1];
      pass += ' ';
      i += 2;
    } else {
      pass += s[i];
      ++i;
    }
  }
  s = std::move(pass);

  // ...and when the following character is not a digit.
  pass.clear();
  for (std::size_t i = 0; i < s.size();) {
    if ((s[i] == '.' || s[i] == ',') && i + 1 < s.size() && !ascii_digit(s[i + 1])) {
      pass += ' ';
      pass += s[i];
      pass += ' ';
      pass += s[i + 1];
      i += 2;
    } else {
      pass += s[i];
      ++i;
    }
  }
  s = std::move(pass);

  // Split a dash preceded by a digit ("1914-1918", but not "pre-war").
  pass.clear();
  for (std::size_t i = 0; i < s.size();) {
    if (ascii_digit(s[i]) && i + 1 < s.size() && s[i + 1] == '-') {
      pass += s[i];
      pass += " - ";
      i += 2;
    } else {
      pass += s[i];
      ++i;
    }
  }
  s = std::move(pass);

  std::vector<std::string> tokens;
  std::string current;
  for (const auto& cp : uni::decode_utf8(s)) {
    if (uni::is_space(cp.value)) {
      if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
    } else {
      current.append(s, cp.begin, cp.end - cp.begin);
    }
  }
  if (!current.empty()) {
    tokens.push_back(std::move(current));
  }
  return tokens;
}

namespace {

struct SentenceStats {
  std::array<long, 4> correct{};
  std::array<long, 4> total{};
  long hyp_len = 0;
  long ref_len = 0;
};

SentenceStats stats_for(std::string_view hyp, std::string_view ref) {
  const auto h = bleu_tokenize(hyp);
  const auto r = bleu_tokenize(ref);
  SentenceStats stats;
  stats.hyp_len = static_cast<long>(h.size());
  stats.ref_len = static_cast<long>(r.size());

  auto counts = [](const std::vector<std::string>& toks, std::size_t n) {
    std::unordered_map<std::string, long> c;
    if (toks.size() >= n) {
      for (std::size_t i = 0; i + n <= toks.size(); ++i) {
        std::string key = toks[i];
        for (std::size_t k = 1; k < n; ++k) {
          key += '\x1f';
          key += toks[i + k];
        }
        ++c[key];
      }
    }
    return c;
  };

  for (std::size_t n = 1; n <= 4; ++n) {
    const auto hc = counts(h, n);
    const auto rc = counts(r, n);
    stats.total[n - 1] =
        h.size() >= n ? static_cast<long>(h.size() - n + 1) : 0;
    long correct = 0;
    for (const auto& [gram, count] : hc) {
      const auto it = rc.find(gram);
      if (it != rc.end()) {
        correct += std::min(count, it->second);
      }
    }
    stats.correct[n - 1] = correct;
  }
  return stats;
}

BleuScore compute_bleu(const SentenceStats& sums, bool effective_order) {
  BleuScore result;
  result.hyp_len = sums.hyp_len;
  result.ref_len = sums.ref_len;

  double smooth = 1.0;
  int eff_order = 4;
  for (int n = 1; n <= 4; ++n) {
    if (sums.total[n - 1] == 0) {
      break;
    }
    if (effective_order) {
      eff_order = n;
    }
    if (sums.correct[n - 1] == 0) {
      smooth *= 2.0;
      result.precisions[n - 1] = 100.0 / (smooth * static_cast<double>(sums.total[n - 1]));
    } else {
      result.precisions[n - 1] = 100.0 * static_cast<double>(sums.correct[n - 1]) /
                                 static_cast<double>(sums.total[n - 1]);
    }
  }

  if (sums.hyp_len < sums.ref_len) {
    result.brevity_penalty =
        sums.hyp_len > 0
            ? std::exp(1.0 - static_cast<double>(sums.ref_len) / static_cast<double>(sums.hyp_len))
            : 0.0;
  } else {
    result.brevity_penalty = 1.0;
  }

  // Dividing the percentages by 100 inside the log makes the identity
  // hypothesis score exactly 100.0 instead of 100-plus-rounding-noise; the
  // value is algebraically the geometric mean of the percentage precisions.
  double log_sum = 0.0;
  for (int i = 0; i < eff_order; ++i) {
    log_sum += result.precisions[i] == 0.0 ? kLogZero : std::log(result.precisions[i] / 100.0);
  }
  result.score = result.brevity_penalty * 100.0 * std::exp(log_sum / eff_order);
  return result;
}

std::vector<SentenceStats> all_stats(const std::vector<std::string>& hyps,
                                     const std::vector<std::string>& refs, const char* what) {
  if (hyps.empty()) {
    throw std::invalid_argument(std::string(what) + ": empty input lists");
  }
  if (hyps.size() != refs.size()) {
    throw std::invalid_argument(std::string(what) + ": " + std::to_string(hyps.size()) +
                                " hypotheses vs " + std::to_string(refs.size()) + " references");
  }
  std::vector<SentenceStats> stats;
  stats.reserve(hyps.size());
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    stats.push_back(stats_for(hyps[i], refs[i]));
  }
  return stats;
}

SentenceStats sum_stats(const std::vector<SentenceStats>& stats,
                        const std::vector<std::size_t>& indices) {
  SentenceStats sums;
  for (std::size_t idx : indices) {
    const auto& s = stats[idx];
    for (int n = 0; n < 4; ++n) {
      sums.correct[n] += s.correct[n];
      sums.total[n] += s.total[n];
    }
    sums.hyp_len += s.hyp_len;
    sums.ref_len += s.ref_len;
  }
  return sums;
}

SentenceStats sum_all(const std::vector<SentenceStats>& stats) {
  SentenceStats sums;
  for (const auto& s : stats) {
    for (int n = 0; n < 4; ++n) {
      sums.correct[n] += s.correct[n];
      sums.total[n] += s.total[n];
    }
    sums.hyp_len += s.hyp_len;
    sums.ref_len += s.ref_len;
  }
  return sums;
}

}  // namespace

BleuScore corpus_bleu(const std::vector<std::string>& hypotheses,
                      const std::vector<std::string>& references) {
  return compute_bleu(sum_all(all_stats(hypotheses, references, "corpus_bleu")), false);
}

double sentence_bleu(std::string_view hypothesis, std::string_view reference) {
  if (hypothesis.empty() || reference.empty()) {
    throw std::invalid_argument("sentence_bleu: empty input");
  }
  return compute_bleu(stats_for(hypothesis, reference), true).score;
}

BleuScore copy_through_bleu(const std::vector<std::string>& sources,
                            const std::vector<std::string>& references) {
  return compute_bleu(sum_all(all_stats(sources, references, "copy_through_bleu")), false);
}

BootstrapCi bootstrap_ci(const std::vector<std::string>& hypotheses,
                         const std::vector<std::string>& references, int resamples, double level,
                         std::uint64_t seed) {
  const auto stats = all_stats(hypotheses, references, "bootstrap_ci");
  if (stats.size() < 2) {
    throw std::invalid_argument("bootstrap_ci: need at least 2 sentences");
  }
  if (resamples < 1 || level <= 0.0 || level >= 1.0) {
    throw std::invalid_argument("bootstrap_ci: invalid resamples or level");
  }

  const std::size_t n = stats.size();
  std::vector<double> scores(static_cast<std::size_t>(resamples));
  std::vector<std::size_t> indices(n);
  for (int r = 0; r < resamples; ++r) {
    auto gen = rng::derive(seed, {kStreamBootstrap, static_cast<std::uint64_t>(r)});
    for (auto& idx : indices) {
      idx = static_cast<std::size_t>(gen.bounded(n));
    }
    scores[static_cast<std::size_t>(r)] = compute_bleu(sum_stats(stats, indices), false).score;
  }
  std::sort(scores.begin(), scores.end());

  const double alpha = (1.0 - level) / 2.0;
  const auto count = static_cast<double>(scores.size());
  auto clamp = [&](double idx) {
    return static_cast<std::size_t>(std::clamp(idx, 0.0, count - 1.0));
  };
  BootstrapCi ci;
  ci.low = scores[clamp(std::floor(alpha * count))];
  ci.high = scores[clamp(std::ceil((1.0 - alpha) * count) - 1.0)];
  return ci;
}

double paired_significance(const std::vector<std::string>& baseline_hypotheses,
                           const std::vector<std::string>& contender_hypotheses,
                           const std::vector<std::string>& references, int resamples,
                           std::uint64_t seed) {
  const auto baseline = all_stats(baseline_hypotheses, references, "paired_significance");
  const auto contender = all_stats(contender_hypotheses, references, "paired_significance");
  if (baseline.size() != contender.size()) {
    throw std::invalid_argument("paired_significance: systems scored on different sentence sets");
  }
  if (resamples < 1) {
    throw std::invalid_argument("paired_significance: resamples must be positive");
  }

  const double observed =
      compute_bleu(sum_all(contender), false).score - compute_bleu(sum_all(baseline), false).score;

  const std::size_t n = baseline.size();
  std::vector<double> deltas(static_cast<std::size_t>(resamples));
  std::vector<std::size_t> indices(n);
  double mean = 0.0;
  for (int r = 0; r < resamples; ++r) {
    auto gen = rng::derive(seed, {kStreamSignificance, static_cast<std::uint64_t>(r)});
    for (auto& idx : indices) {
      idx = static_cast<std::size_t>(gen.bounded(n));
    }
    const double delta = compute_bleu(sum_stats(contender, indices), false).score -
                         compute_bleu(sum_stats(baseline, indices), false).score;
    deltas[static_cast<std::size_t>(r)] = delta;
    mean += delta;
  }
  mean /= static_cast<double>(resamples);

  long at_least = 0;
  for (double delta : deltas) {
    if (delta - mean >= observed) {
      ++at_least;
    }
  }
  return static_cast<double>(at_least + 1) / static_cast<double>(resamples + 1);
}

namespace {

// Regularized incomplete beta via the continued fraction (modified Lentz).
double beta_cont_frac(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-14;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) {
      break;
    }
  }
  return h;
}

double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                        a * std::log(x) + b * std::log1p(-x);
  const double bt = std::exp(log_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return bt * beta_cont_frac(a, b, x) / a;
  }
  return 1.0 - bt * beta_cont_frac(b, a, 1.0 - x) / b;
}

}  // namespace

Correlation pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) {
    throw std::invalid_argument("pearson: series lengths differ");
  }
  const std::size_t n = xs.size();
  if (n < 3) {
    throw std::invalid_argument("pearson: need at least 3 points");
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw std::invalid_argument("pearson: zero variance makes the correlation undefined");
  }

  Correlation result;
  result.r = sxy / std::sqrt(sxx * syy);
  const double df = static_cast<double>(n - 2);
  const double denom = 1.0 - result.r * result.r;
  if (denom <= 0.0) {
    result.p_value = 0.0;
  } else {
    const double t = result.r * std::sqrt(df / denom);
    result.p_value = reg_inc_beta(df / 2.0, 0.5, df / (df + t * t));
  }
  result.significant = result.p_value < 0.05;
  return result;
}

}  // namespace fshot
