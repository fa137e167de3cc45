#include "fshot/corpus.hpp"

#include <fstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "fshot/unicode.hpp"

namespace fshot {

namespace {

bool all_space(std::string_view s) {
  for (const auto& c : uni::decode_utf8(s)) {
    if (!uni::is_space(c.value)) {
      return false;
    }
  }
  return true;
}

}  // namespace

std::vector<Token> tokenize(std::string_view raw) {
  std::vector<Token> out;
  const auto cps = uni::decode_utf8(raw);

  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && uni::is_space(cps[i].value)) {
      ++i;
    }
    if (i >= cps.size()) {
      break;
    }
    std::size_t j = i;
    while (j < cps.size() && !uni::is_space(cps[j].value)) {
      ++j;
    }
    // Chunk is cps[i..j). Peel punctuation from both ends.
    std::size_t lo = i;
    std::size_t hi = j;
    while (lo < hi && uni::is_punct(cps[lo].value)) {
      ++lo;
    }
    while (hi > lo && uni::is_punct(cps[hi - 1].value)) {
      --hi;
    }
    auto emit = [&](std::size_t a, std::size_t b, bool punct) {
      Token t;
      t.begin = cps[a].begin;
      t.end = cps[b - 1].end;
      t.text.assign(raw.substr(t.begin, t.end - t.begin));
      t.is_punct = punct;
      out.push_back(std::move(t));
    };
    for (std::size_t k = i; k < lo; ++k) {
      emit(k, k + 1, true);
    }
    if (lo < hi) {
      emit(lo, hi, false);
    }
    for (std::size_t k = hi; k < j; ++k) {
      emit(k, k + 1, true);
    }
    i = j;
  }
  return out;
}

Sentence make_sentence(std::string raw) {
  Sentence s;
  s.tokens = tokenize(raw);
  s.raw = std::move(raw);
  return s;
}

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "tsv") {
    return CorpusFormat::tsv;
  }
  if (name == "jsonl") {
    return CorpusFormat::jsonl;
  }
  throw std::invalid_argument("unknown corpus format: " + std::string(name));
}

namespace {

void append_pair(ParallelCorpus& corpus, LoadStats& stats, std::string src, std::string tgt) {
  if (src.empty() || tgt.empty() || all_space(src) || all_space(tgt)) {
    ++stats.skipped_empty;
    return;
  }
  SentencePair pair;
  pair.id = static_cast<int>(corpus.pairs.size());
  pair.source = make_sentence(std::move(src));
  pair.target = make_sentence(std::move(tgt));
  corpus.pairs.push_back(std::move(pair));
  ++stats.loaded;
}

void load_tsv(std::istream& in, const std::string& path, ParallelCorpus& corpus,
              LoadStats& stats) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected exactly one tab-separated column pair");
    }
    append_pair(corpus, stats, line.substr(0, tab), line.substr(tab + 1));
  }
}

void load_jsonl(std::istream& in, const std::string& path, ParallelCorpus& corpus,
                LoadStats& stats) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!obj.is_object() || !obj.contains("src") || !obj.contains("tgt") ||
        !obj["src"].is_string() || !obj["tgt"].is_string()) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": record must be an object with string fields \"src\" and \"tgt\"");
    }
    append_pair(corpus, stats, obj["src"].get<std::string>(), obj["tgt"].get<std::string>());
  }
}

}  // namespace

ParallelCorpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                           std::string lang_src, std::string lang_tgt, LoadStats* stats) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open corpus file: " + path.string());
  }
  ParallelCorpus corpus;
  corpus.name = path.filename().string();
  corpus.lang_src = std::move(lang_src);
  corpus.lang_tgt = std::move(lang_tgt);
  LoadStats local;
  if (format == CorpusFormat::tsv) {
    load_tsv(in, path.string(), corpus, local);
  } else {
    load_jsonl(in, path.string(), corpus, local);
  }
  if (stats) {
    *stats = local;
  }
  return corpus;
}

void save_tsv(const ParallelCorpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write corpus file: " + path.string());
  }
  for (const auto& pair : corpus.pairs) {
    out << pair.source.raw << '\t' << pair.target.raw << '\n';
  }
  if (!out) {
    throw std::runtime_error("error while writing: " + path.string());
  }
}

std::string normalize_for_join(std::string_view s) {
  const auto cps = uni::decode_utf8(s);
  std::vector<char32_t> collapsed;
  collapsed.reserve(cps.size());
  bool pending_space = false;
  for (const auto& c : cps) {
    if (uni::is_space(c.value)) {
      pending_space = !collapsed.empty();
      continue;
    }
    if (pending_space) {
      collapsed.push_back(U' ');
      pending_space = false;
    }
    collapsed.push_back(c.value);
  }
  return uni::compose_nfc(uni::encode_utf8(collapsed));
}

ParallelCorpus pivot_join(const ParallelCorpus& a, const ParallelCorpus& b, PivotSide a_side,
                          PivotSide b_side, JoinStats* stats) {
  const std::string& a_pivot_lang = a_side == PivotSide::source ? a.lang_src : a.lang_tgt;
  const std::string& b_pivot_lang = b_side == PivotSide::source ? b.lang_src : b.lang_tgt;
  if (a_pivot_lang != b_pivot_lang) {
    throw std::invalid_argument("pivot language tags differ: \"" + a_pivot_lang + "\" vs \"" +
                                b_pivot_lang + "\"");
  }

  auto pivot_of = [](const SentencePair& p, PivotSide side) -> const Sentence& {
    return side == PivotSide::source ? p.source : p.target;
  };
  auto other_of = [](const SentencePair& p, PivotSide side) -> const Sentence& {
    return side == PivotSide::source ? p.target : p.source;
  };

  std::unordered_map<std::string, std::vector<const SentencePair*>> b_by_pivot;
  for (const auto& pb : b.pairs) {
    b_by_pivot[normalize_for_join(pivot_of(pb, b_side).raw)].push_back(&pb);
  }

  ParallelCorpus out;
  out.name = a.name + "+" + b.name;
  out.lang_src = a_side == PivotSide::source ? a.lang_tgt : a.lang_src;
  out.lang_tgt = b_side == PivotSide::source ? b.lang_tgt : b.lang_src;

  JoinStats local;
  std::unordered_set<std::string> seen_pairs;
  std::unordered_map<std::string, std::size_t> emitted_by_pivot;
  for (const auto& pa : a.pairs) {
    const std::string key = normalize_for_join(pivot_of(pa, a_side).raw);
    auto it = b_by_pivot.find(key);
    if (it == b_by_pivot.end()) {
      continue;
    }
    for (const SentencePair* pb : it->second) {
      emitted_by_pivot[key]++;
      const std::string& src = other_of(pa, a_side).raw;
      const std::string& tgt = other_of(*pb, b_side).raw;
      std::string dedup_key = src + '\t' + tgt;
      if (!seen_pairs.insert(std::move(dedup_key)).second) {
        ++local.deduped;
        continue;
      }
      SentencePair joined;
      joined.id = static_cast<int>(out.pairs.size());
      joined.source = make_sentence(src);
      joined.target = make_sentence(tgt);
      out.pairs.push_back(std::move(joined));
    }
  }
  local.matched_pivots = emitted_by_pivot.size();
  for (const auto& [key, n] : emitted_by_pivot) {
    if (n > 1) {
      ++local.multi_match_pivots;
    }
  }
  local.emitted = out.pairs.size();
  if (stats) {
    *stats = local;
  }
  return out;
}

}  // namespace fshot
