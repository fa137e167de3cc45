// Offline acceptance suite. Each criterion prints a single PASS/FAIL line;
// the process exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fshot/corpus.hpp"
#include "fshot/eval.hpp"
#include "fshot/fragment_index.hpp"
#include "fshot/prompter.hpp"
#include "fshot/rng.hpp"
#include "fshot/segmenter.hpp"
#include "support/synthetic.hpp"

using namespace fshot;
namespace stdfs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Checker {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 10) failures.push_back(what);
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Greedy segmentation against a brute-force oracle.

bool oracle_attested(const ParallelCorpus& corpus, const std::vector<Token>& toks,
                     std::size_t start, std::size_t len) {
  for (const auto& pair : corpus.pairs) {
    const auto& src = pair.source.tokens;
    if (src.size() < len) continue;
    for (std::size_t off = 0; off + len <= src.size(); ++off) {
      bool all = true;
      for (std::size_t k = 0; k < len && all; ++k) all = src[off + k].text == toks[start + k].text;
      if (all) return true;
    }
  }
  return false;
}

struct OracleSeg {
  std::vector<std::pair<std::size_t, std::size_t>> spans;  // (start, length)
  std::vector<std::size_t> unmatched;
};

OracleSeg oracle_segment(const ParallelCorpus& corpus, const Sentence& sentence, int window) {
  OracleSeg out;
  const std::size_t n = sentence.size();
  for (std::size_t i = 0; i < n;) {
    std::size_t best = 0;
    for (std::size_t w = std::min<std::size_t>(window, n - i); w >= 1; --w) {
      if (oracle_attested(corpus, sentence.tokens, i, w)) {
        best = w;
        break;
      }
    }
    if (best > 0) {
      out.spans.emplace_back(i, best);
      i += best;
    } else {
      out.unmatched.push_back(i);
      i += 1;
    }
  }
  return out;
}

void criterion_segmentation_oracle(Checker& chk) {
  const auto t0 = std::chrono::steady_clock::now();
  rng::SplitMix64 gen(101);
  for (int instance = 0; instance < 500; ++instance) {
    const std::size_t vocab_size = 4 + gen.bounded(17);
    const auto vocab = testsupport::make_vocab(vocab_size, "w");
    const std::size_t pairs = 1 + gen.bounded(100);
    const auto corpus = testsupport::random_corpus(gen, pairs, vocab, vocab, 1, 12);
    const auto index = FragmentIndex::build(corpus);

    std::string query;
    const std::size_t qlen = 1 + gen.bounded(12);
    for (std::size_t i = 0; i < qlen; ++i) {
      if (!query.empty()) query += ' ';
      if (gen.bounded(100) < 15)
        query += "oov" + std::to_string(gen.bounded(1000));
      else
        query += vocab[gen.bounded(vocab_size)];
    }
    const Sentence sentence = make_sentence(query);

    const auto got = segment(sentence, index);
    const auto want = oracle_segment(corpus, sentence, index.max_window());

    bool same = got.matched.size() == want.spans.size() && got.unmatched == want.unmatched;
    for (std::size_t k = 0; same && k < got.matched.size(); ++k)
      same = got.matched[k].start == want.spans[k].first &&
             got.matched[k].fragment.size() == want.spans[k].second;
    chk.expect(same, "instance " + std::to_string(instance) + " diverges from the oracle on \"" +
                         sentence.raw + "\"");
    if (!same) return;

    // Partition: spans and unmatched indices tile [0, n) in order.
    std::size_t cursor = 0;
    auto un = got.unmatched.begin();
    auto ma = got.matched.begin();
    while (cursor < sentence.size()) {
      if (ma != got.matched.end() && ma->start == cursor) {
        cursor += ma->fragment.size();
        ++ma;
      } else if (un != got.unmatched.end() && *un == cursor) {
        ++cursor;
        ++un;
      } else {
        break;
      }
    }
    chk.expect(cursor == sentence.size() && ma == got.matched.end() && un == got.unmatched.end(),
               "instance " + std::to_string(instance) + " is not a partition");

    // Maximality: no matched span extends rightward, no unmatched token is attested.
    for (const auto& m : got.matched) {
      const std::size_t len = m.fragment.size();
      if (m.start + len < sentence.size() && len < static_cast<std::size_t>(index.max_window()))
        chk.expect(!oracle_attested(corpus, sentence.tokens, m.start, len + 1),
                   "instance " + std::to_string(instance) + " span is extendable");
    }
    for (std::size_t idx : got.unmatched)
      chk.expect(!oracle_attested(corpus, sentence.tokens, idx, 1),
                 "instance " + std::to_string(instance) + " left an attested token unmatched");
    if (!chk.failures.empty()) return;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  chk.expect(secs < 10.0, "took " + fmt(secs) + "s, limit 10s");
}

// ---------------------------------------------------------------------------
// 2. Index lookups against a naive containment scan.

void criterion_index_oracle(Checker& chk) {
  const auto t0 = std::chrono::steady_clock::now();
  rng::SplitMix64 gen(202);
  for (int round = 0; round < 200; ++round) {
    const std::size_t vocab_size = 6 + gen.bounded(20);
    const auto vocab = testsupport::make_vocab(vocab_size, "v");
    const std::size_t pairs = 1 + gen.bounded(200);
    const auto corpus = testsupport::random_corpus(gen, pairs, vocab, vocab, 1, 12);
    const auto index = FragmentIndex::build(corpus, 7);

    std::set<std::vector<std::string>> fragments;
    for (const auto& pair : corpus.pairs) {
      const auto& toks = pair.source.tokens;
      for (std::size_t i = 0; i < toks.size(); ++i)
        for (std::size_t w = 1; w <= 7 && i + w <= toks.size(); ++w) {
          std::vector<std::string> frag;
          for (std::size_t k = 0; k < w; ++k) frag.push_back(toks[i + k].text);
          fragments.insert(std::move(frag));
        }
    }
    chk.expect(index.key_count() == fragments.size(),
               "round " + std::to_string(round) + ": key count " +
                   std::to_string(index.key_count()) + " != " + std::to_string(fragments.size()) +
                   " enumerable fragments");

    for (const auto& frag : fragments) {
      std::vector<int> want;
      for (const auto& pair : corpus.pairs) {
        const auto& src = pair.source.tokens;
        bool found = false;
        for (std::size_t off = 0; !found && off + frag.size() <= src.size(); ++off) {
          found = true;
          for (std::size_t k = 0; k < frag.size() && found; ++k)
            found = src[off + k].text == frag[k];
        }
        if (found) want.push_back(pair.id);
      }
      std::vector<int> got = index.lookup(Fragment{frag});
      std::sort(got.begin(), got.end());
      if (got != want) {
        std::string shown;
        for (const auto& t : frag) shown += (shown.empty() ? "" : " ") + t;
        chk.expect(false, "round " + std::to_string(round) + ": postings differ for \"" + shown +
                              "\"");
        return;
      }
    }

    const Fragment absent{{"neverseen" + std::to_string(round)}};
    chk.expect(index.lookup(absent).empty(), "round " + std::to_string(round) +
                                                 ": unseen token has a nonempty posting list");
    if (!chk.failures.empty()) return;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  chk.expect(secs < 30.0, "took " + fmt(secs) + "s, limit 30s");
}

// ---------------------------------------------------------------------------
// 3. Hand-built corpus reproduces the expected decomposition.

void criterion_demo_decomposition(Checker& chk) {
  const auto corpus = testsupport::corpus_from_lines({
      {"this is the largest one", "t1"},
      {"the largest wave was massive", "t2"},
      {"she has a reason for which she is late", "t3"},
      {"this is a problem for which we need a solution", "t4"},
      {"examples can be found in the appendix", "t5"},
      {"several examples can be found online", "t6"},
  });
  const auto index = FragmentIndex::build(corpus);
  const auto seg =
      segment(make_sentence("find the largest fragments for which examples can be found"), index);

  chk.expect(seg.matched.size() == 3,
             "expected 3 matched fragments, got " + std::to_string(seg.matched.size()));
  if (seg.matched.size() == 3) {
    chk.expect(seg.matched[0].fragment.display() == "the largest" && seg.matched[0].start == 1,
               "first fragment is \"" + seg.matched[0].fragment.display() + "\"");
    chk.expect(seg.matched[1].fragment.display() == "for which" && seg.matched[1].start == 4,
               "second fragment is \"" + seg.matched[1].fragment.display() + "\"");
    chk.expect(seg.matched[2].fragment.display() == "examples can be found" &&
                   seg.matched[2].start == 6,
               "third fragment is \"" + seg.matched[2].fragment.display() + "\"");
  }
  chk.expect(seg.unmatched == std::vector<std::size_t>{0, 3},
             "unmatched tokens should be exactly \"find\" and \"fragments\"");
}

// ---------------------------------------------------------------------------
// 4. BLEU against frozen goldens, identity, and disjoint inputs.

void criterion_bleu_goldens(Checker& chk) {
  std::ifstream in(FSHOT_TEST_DATA_DIR "/bleu_golden.json");
  chk.expect(in.good(), "golden fixture file is missing");
  if (!in.good()) return;
  json golden;
  in >> golden;

  for (const auto& fx : golden.at("corpus")) {
    const auto hyps = fx.at("hyps").get<std::vector<std::string>>();
    const auto refs = fx.at("refs").get<std::vector<std::string>>();
    const double want = fx.at("score").get<double>();
    const double got = corpus_bleu(hyps, refs).score;
    chk.expect(std::abs(got - want) <= 0.01,
               fx.at("name").get<std::string>() + ": " + fmt(got) + " vs golden " + fmt(want));

    const double identity = corpus_bleu(refs, refs).score;
    chk.expect(identity == 100.0,
               fx.at("name").get<std::string>() + ": identity scored " + fmt(identity));
  }

  std::vector<std::string> hyps, refs;
  for (int s = 0; s < 2; ++s) {
    std::string h, r;
    for (int i = 0; i < 20; ++i) {
      if (i) h += ' ', r += ' ';
      h += "aa" + std::to_string(s * 20 + i);
      r += "bb" + std::to_string(s * 20 + i);
    }
    hyps.push_back(h);
    refs.push_back(r);
  }
  const double disjoint = corpus_bleu(hyps, refs).score;
  chk.expect(disjoint < 1.0, "disjoint vocabulary scored " + fmt(disjoint));
  chk.expect(disjoint > 0.0, "disjoint vocabulary should stay positive under smoothing");
}

// ---------------------------------------------------------------------------
// 5. Prompt structure rules.

bool source_contains_fragment(const Sentence& source, const Fragment& frag) {
  const auto& toks = source.tokens;
  for (std::size_t off = 0; off + frag.size() <= toks.size(); ++off) {
    bool all = true;
    for (std::size_t k = 0; k < frag.size() && all; ++k) all = toks[off + k].text == frag.tokens[k];
    if (all) return true;
  }
  return false;
}

void criterion_prompt_structure(Checker& chk) {
  rng::SplitMix64 gen(505);
  const auto src_vocab = testsupport::make_vocab(30, "s");
  const auto tgt_vocab = testsupport::make_vocab(30, "t");
  const auto pivot_vocab = testsupport::make_vocab(30, "p");
  const auto direct = testsupport::random_corpus(gen, 300, src_vocab, tgt_vocab, 4, 10);
  const auto direct_index = FragmentIndex::build(direct);

  PromptConfig config;
  config.lang_src = "Alpha";
  config.lang_tgt = "Beta";
  config.rng_seed = 7;

  config.method = Method::rs;
  for (int i = 0; i < 10; ++i) {
    const Sentence sentence = direct.pairs[i * 7].source;
    const auto spec = build_random_shot(sentence, direct, config);
    chk.expect(spec.random_example_ids.size() == 16,
               "random-shot prompt carries " + std::to_string(spec.random_example_ids.size()) +
                   " examples");
    std::set<int> distinct(spec.random_example_ids.begin(), spec.random_example_ids.end());
    chk.expect(distinct.size() == 16, "random-shot examples repeat a pair");
  }

  config.method = Method::fs;
  for (int i = 0; i < 20; ++i) {
    const Sentence sentence = direct.pairs[i * 11].source;
    const auto spec = build_fragment_shot(sentence, direct_index, direct, config);
    for (const auto& block : spec.blocks) {
      chk.expect(!block.examples.empty() && block.examples.size() <= 6,
                 "fragment block holds " + std::to_string(block.examples.size()) + " examples");
      for (const auto& ex : block.examples)
        chk.expect(source_contains_fragment(direct.pairs[ex.id].source, block.fragment),
                   "example " + std::to_string(ex.id) + " lacks fragment \"" +
                       block.fragment.display() + "\"");
    }
  }

  // Pivot legs share many full pivot sentences so the stage-2 exclusion rule
  // has real work to do.
  ParallelCorpus sp, pt;
  sp.name = "sp";
  sp.lang_src = "alpha";
  sp.lang_tgt = "pivot";
  pt.name = "pt";
  pt.lang_src = "pivot";
  pt.lang_tgt = "beta";
  std::vector<std::vector<std::size_t>> seqs;
  for (int i = 0; i < 300; ++i) seqs.push_back(testsupport::random_word_seq(gen, 30, 4, 10));
  for (int i = 0; i < 300; ++i) {
    SentencePair pair;
    pair.id = i;
    pair.source = make_sentence(testsupport::join_words(src_vocab, seqs[i]));
    pair.target = make_sentence(testsupport::join_words(pivot_vocab, seqs[i]));
    sp.pairs.push_back(std::move(pair));
  }
  for (int i = 0; i < 300; ++i) {
    const auto seq =
        i % 2 == 0 ? seqs[i] : testsupport::random_word_seq(gen, 30, 4, 10);
    SentencePair pair;
    pair.id = i;
    pair.source = make_sentence(testsupport::join_words(pivot_vocab, seq));
    pair.target = make_sentence(testsupport::join_words(tgt_vocab, seq));
    pt.pairs.push_back(std::move(pair));
  }
  const auto sp_index = FragmentIndex::build(sp);
  const auto pt_index = FragmentIndex::build(pt);

  config.method = Method::pf;
  config.lang_pivot = "Gamma";
  std::size_t nested_total = 0;
  for (int i = 0; i < 10; ++i) {
    const Sentence sentence = sp.pairs[i * 13].source;
    const auto spec = build_pivoted_fragment_shot(sentence, sp_index, sp, pt_index, pt, config);
    for (const auto& block : spec.blocks)
      for (const auto& ex : block.examples) {
        const std::string stage1_pivot = normalize_for_join(sp.pairs[ex.id].target.raw);
        for (const auto& nested : ex.nested) {
          nested_total += nested.example_ids.size();
          for (int id2 : nested.example_ids)
            chk.expect(normalize_for_join(pt.pairs[id2].source.raw) != stage1_pivot,
                       "stage-2 example " + std::to_string(id2) +
                           " duplicates its stage-1 pivot sentence");
        }
      }
  }
  chk.expect(nested_total > 0, "pivoted prompts never produced a stage-2 example");

  const Sentence sentence = sp.pairs[0].source;
  const auto full = build_pivoted_fragment_shot(sentence, sp_index, sp, pt_index, pt, config);
  chk.expect(!full.used_fallback, "full-budget pivoted prompt should not need the fallback");
  PromptConfig tight = config;
  tight.char_budget = static_cast<int>(full.char_count) - 1;
  const auto shrunk = build_pivoted_fragment_shot(sentence, sp_index, sp, pt_index, pt, tight);
  chk.expect(shrunk.used_fallback, "over-budget pivoted prompt did not fall back");
  for (const auto& block : shrunk.blocks)
    chk.expect(block.examples.size() <= 2,
               "fallback block still holds " + std::to_string(block.examples.size()) +
                   " stage-1 examples");
  chk.expect(shrunk.char_count <= static_cast<std::size_t>(tight.char_budget) ||
                 shrunk.over_budget,
             "shrunk prompt neither fits the budget nor reports over_budget");
}

// ---------------------------------------------------------------------------
// 6. Mean prompt size ordering on a 1,000-pair corpus.

void criterion_size_ordering(Checker& chk) {
  rng::SplitMix64 gen(606);
  const auto src_vocab = testsupport::make_vocab(40, "s");
  const auto tgt_vocab = testsupport::make_vocab(40, "t");
  const auto pivot_vocab = testsupport::make_vocab(40, "p");

  std::vector<std::vector<std::size_t>> seqs;
  for (int i = 0; i < 1000; ++i) seqs.push_back(testsupport::random_word_seq(gen, 40, 6, 12));

  ParallelCorpus direct, sp, pt;
  for (auto* corpus : {&direct, &sp, &pt}) {
    corpus->lang_src = "alpha";
    corpus->lang_tgt = "beta";
  }
  for (int i = 0; i < 1000; ++i) {
    SentencePair d, s, p;
    d.id = s.id = p.id = i;
    d.source = make_sentence(testsupport::join_words(src_vocab, seqs[i]));
    d.target = make_sentence(testsupport::join_words(tgt_vocab, seqs[i]));
    s.source = d.source;
    s.target = make_sentence(testsupport::join_words(pivot_vocab, seqs[i]));
    const auto other = i % 2 == 0 ? seqs[i] : testsupport::random_word_seq(gen, 40, 6, 12);
    p.source = make_sentence(testsupport::join_words(pivot_vocab, other));
    p.target = make_sentence(testsupport::join_words(tgt_vocab, other));
    direct.pairs.push_back(std::move(d));
    sp.pairs.push_back(std::move(s));
    pt.pairs.push_back(std::move(p));
  }
  const auto direct_index = FragmentIndex::build(direct);
  const auto sp_index = FragmentIndex::build(sp);
  const auto pt_index = FragmentIndex::build(pt);

  std::vector<Sentence> tests;
  std::size_t known = 0, total = 0;
  for (int i = 0; i < 20; ++i) {
    std::string line;
    const std::size_t len = 8 + gen.bounded(5);
    for (std::size_t k = 0; k < len; ++k) {
      if (!line.empty()) line += ' ';
      line += gen.bounded(100) < 85 ? src_vocab[gen.bounded(40)]
                                    : "zzq" + std::to_string(gen.bounded(1000));
    }
    Sentence sentence = make_sentence(line);
    for (const auto& tok : sentence.tokens) {
      ++total;
      if (!direct_index.lookup(Fragment{{tok.text}}).empty()) ++known;
    }
    tests.push_back(std::move(sentence));
  }
  const double unigram_coverage = static_cast<double>(known) / static_cast<double>(total);
  chk.expect(unigram_coverage >= 0.6,
             "test sentences only reach " + fmt(unigram_coverage) + " unigram coverage");

  PromptConfig config;
  config.lang_src = "Alpha";
  config.lang_tgt = "Beta";
  config.lang_pivot = "Gamma";
  config.rng_seed = 7;

  std::map<Method, double> mean_chars;
  for (Method method : {Method::zs, Method::rs, Method::fs, Method::pf}) {
    config.method = method;
    double sum = 0;
    for (const auto& sentence : tests) {
      PromptSpec spec;
      switch (method) {
        case Method::zs: spec = build_zero_shot(sentence, config); break;
        case Method::rs: spec = build_random_shot(sentence, direct, config); break;
        case Method::fs:
          spec = build_fragment_shot(sentence, direct_index, direct, config);
          break;
        case Method::pf:
          spec = build_pivoted_fragment_shot(sentence, sp_index, sp, pt_index, pt, config);
          break;
      }
      sum += static_cast<double>(spec.char_count);
    }
    mean_chars[method] = sum / static_cast<double>(tests.size());
  }

  const auto order = {Method::zs, Method::rs, Method::fs, Method::pf};
  auto it = order.begin();
  Method prev = *it++;
  for (; it != order.end(); ++it) {
    chk.expect(mean_chars[prev] < mean_chars[*it],
               std::string(method_name(prev)) + " mean " + fmt(mean_chars[prev]) +
                   " is not below " + std::string(method_name(*it)) + " mean " +
                   fmt(mean_chars[*it]));
    prev = *it;
  }
}

// ---------------------------------------------------------------------------
// 7. Statistical machinery.

void criterion_statistics(Checker& chk) {
  std::vector<double> xs, up, down;
  for (int i = 1; i <= 12; ++i) {
    xs.push_back(i);
    up.push_back(3.0 * i - 5.0);
    down.push_back(-2.0 * i + 11.0);
  }
  chk.expect(std::abs(pearson(xs, up).r - 1.0) <= 1e-12,
             "ascending line gives r=" + fmt(pearson(xs, up).r));
  chk.expect(std::abs(pearson(xs, down).r + 1.0) <= 1e-12,
             "descending line gives r=" + fmt(pearson(xs, down).r));

  std::vector<std::string> hyps, refs;
  rng::SplitMix64 gen(707);
  const auto vocab = testsupport::make_vocab(18, "q");
  for (int i = 0; i < 12; ++i) {
    const auto seq = testsupport::random_word_seq(gen, 18, 5, 9);
    auto flipped = seq;
    flipped[gen.bounded(flipped.size())] = gen.bounded(18);
    hyps.push_back(testsupport::join_words(vocab, flipped));
    refs.push_back(testsupport::join_words(vocab, seq));
  }
  int calm = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed)
    if (paired_significance(hyps, hyps, refs, 200, seed) > 0.05) ++calm;
  chk.expect(calm == 100,
             "self-comparison looked significant in " + std::to_string(100 - calm) + " trials");

  const std::vector<std::string> same(10, "uno dos tres quatro cinque");
  const std::vector<std::string> same_refs(10, "uno dos tres quatro seis");
  const double score = corpus_bleu(same, same_refs).score;
  const auto ci = bootstrap_ci(same, same_refs, 500, 0.95, 11);
  chk.expect(ci.low == ci.high, "zero-variance interval [" + fmt(ci.low) + ", " + fmt(ci.high) +
                                    "] is not a point");
  chk.expect(std::abs(ci.low - score) <= 1e-12,
             "zero-variance interval sits away from the score");
}

// ---------------------------------------------------------------------------
// 8. End-to-end determinism and resumption through the CLI.

int run_quiet(const std::string& command) {
  const int status = std::system((command + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const stdfs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void criterion_end_to_end(Checker& chk) {
  const stdfs::path base = stdfs::temp_directory_path() / "fshot_acceptance";
  stdfs::remove_all(base);
  const stdfs::path out_a = base / "a";
  const stdfs::path out_b = base / "b";
  const std::string config = std::string(FSHOT_SYNTHETIC_DIR) + "/experiment.json";
  const std::string cli = FSHOT_CLI_PATH;

  const auto invoke = [&](const stdfs::path& dir) {
    return run_quiet(cli + " run --config " + config + " --mock --seed 7 --output-dir " +
                     dir.string());
  };
  chk.expect(invoke(out_a) == 0, "first run failed");
  chk.expect(invoke(out_b) == 0, "second run failed");
  if (!chk.failures.empty()) return;

  std::vector<std::string> files = {"summary.json", "summary.txt"};
  for (const char* method : {"zs", "rs", "fs", "pf"}) {
    files.push_back(std::string("prompts_") + method + ".jsonl");
    files.push_back(std::string("records_") + method + "_mock.jsonl");
    files.push_back(std::string("report_") + method + "_mock.json");
  }
  for (const auto& name : files) {
    const std::string a = slurp(out_a / name);
    chk.expect(!a.empty(), name + " is empty or missing");
    chk.expect(a == slurp(out_b / name), name + " differs between identical runs");
  }
  if (!chk.failures.empty()) return;

  // Simulate a mid-batch kill: keep 8 complete records plus a torn fragment
  // of the ninth, then rerun into the same directory.
  const stdfs::path victim = out_a / "records_fs_mock.jsonl";
  const std::string full = slurp(victim);
  std::size_t pos = 0;
  for (int i = 0; i < 8; ++i) pos = full.find('\n', pos) + 1;
  {
    std::ofstream out(victim, std::ios::binary | std::ios::trunc);
    out << full.substr(0, pos + 25);
  }
  chk.expect(invoke(out_a) == 0, "resumed run failed");
  for (const auto& name : files)
    chk.expect(slurp(out_a / name) == slurp(out_b / name), name + " differs after resumption");

  std::set<std::string> keys;
  std::size_t lines = 0;
  std::istringstream records(slurp(out_a / "records_fs_mock.jsonl"));
  for (std::string line; std::getline(records, line);) {
    ++lines;
    const auto j = json::parse(line);
    keys.insert(std::to_string(j.at("sentence_id").get<int>()) + "|" +
                j.at("method").get<std::string>());
  }
  chk.expect(lines == 20 && keys.size() == 20,
             "resumed records hold " + std::to_string(lines) + " lines, " +
                 std::to_string(keys.size()) + " distinct sentences");
  stdfs::remove_all(base);
}

// ---------------------------------------------------------------------------
// 9. Coverage extremes and monotonicity.

void criterion_coverage_sanity(Checker& chk) {
  const auto attested = testsupport::corpus_from_lines({{"una frase bastante normale", "t"}});
  const auto attested_index = FragmentIndex::build(attested);
  const auto full = coverage(segment(make_sentence("una frase bastante normale"), attested_index));
  chk.expect(full.coverage == 1.0, "fully attested sentence scores " + fmt(full.coverage));

  const auto none = coverage(segment(make_sentence("totalmente sconosciuta"), attested_index));
  chk.expect(none.coverage == 0.0, "fully unknown sentence scores " + fmt(none.coverage));

  rng::SplitMix64 gen(909);
  for (int sequence = 0; sequence < 100; ++sequence) {
    const std::size_t vocab_size = 6 + gen.bounded(15);
    const auto vocab = testsupport::make_vocab(vocab_size, "g");
    const auto query = testsupport::random_word_seq(gen, vocab_size, 5, 12);
    const Sentence sentence = make_sentence(testsupport::join_words(vocab, query));

    ParallelCorpus corpus;
    corpus.lang_src = "alpha";
    corpus.lang_tgt = "beta";
    double last = -1.0;
    for (int step = 0; step < 8; ++step) {
      const std::size_t add = 1 + gen.bounded(5);
      for (std::size_t k = 0; k < add; ++k) {
        const auto seq = testsupport::random_word_seq(gen, vocab_size, 1, 12);
        SentencePair pair;
        pair.id = static_cast<int>(corpus.pairs.size());
        pair.source = make_sentence(testsupport::join_words(vocab, seq));
        pair.target = pair.source;
        corpus.pairs.push_back(std::move(pair));
      }
      const auto stats = coverage(segment(sentence, FragmentIndex::build(corpus)));
      chk.expect(stats.coverage >= last, "sequence " + std::to_string(sequence) + " step " +
                                             std::to_string(step) + " dropped from " + fmt(last) +
                                             " to " + fmt(stats.coverage));
      last = stats.coverage;
    }
    if (!chk.failures.empty()) return;
  }
}

}  // namespace

int main() {
  struct Criterion {
    std::string label;
    std::function<void(Checker&)> body;
  };
  const std::vector<Criterion> criteria = {
      {"segmentation equals the brute-force greedy oracle on 500 random instances",
       criterion_segmentation_oracle},
      {"index lookups equal a naive containment scan on 200 random corpora",
       criterion_index_oracle},
      {"the hand-built demo corpus yields the expected fragment decomposition",
       criterion_demo_decomposition},
      {"corpus BLEU matches frozen goldens; identity scores 100; disjoint stays below 1",
       criterion_bleu_goldens},
      {"prompt structure: 16 random pairs, capped verbatim fragment examples, pivot exclusion "
       "and fallback",
       criterion_prompt_structure},
      {"mean prompt size orders zs < rs < fs < pf on a 1,000-pair corpus",
       criterion_size_ordering},
      {"perfect-line Pearson, self-comparison significance, and degenerate bootstrap behave",
       criterion_statistics},
      {"mock runs are byte-identical across runs and resume cleanly after a kill",
       criterion_end_to_end},
      {"coverage hits both extremes and never decreases as the corpus grows",
       criterion_coverage_sanity},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Checker chk;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].body(chk);
    } catch (const std::exception& e) {
      chk.expect(false, std::string("threw: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = chk.failures.empty();
    std::printf("[%zu/%zu] %s  %s (%.1fs)\n", i + 1, criteria.size(), ok ? "PASS" : "FAIL",
                criteria[i].label.c_str(), secs);
    for (const auto& why : chk.failures) std::printf("        - %s\n", why.c_str());
    if (!ok) ++failed;
  }

  if (failed == 0) {
    std::printf("acceptance: all %zu criteria passed\n", criteria.size());
    return 0;
  }
  std::printf("acceptance: %d of %zu criteria failed\n", failed, criteria.size());
  return 1;
}
