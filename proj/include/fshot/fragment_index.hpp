#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "fshot/corpus.hpp"

namespace fshot {

// A contiguous run of tokens from some sentence, in original case.
struct Fragment {
  std::vector<std::string> tokens;

  std::size_t size() const { return tokens.size(); }
  // Original-case tokens joined by single spaces ("spesso il").
  std::string display() const;
};

// Inverted index from source-side token n-grams (n = 1..max_window) to the
// ids of the pairs containing them. Immutable after build; lookups are
// thread-safe.
class FragmentIndex {
 public:
  static constexpr int kDefaultMaxWindow = 7;
  static constexpr char kKeySeparator = '\x1f';  // unit separator; never inside a token

  FragmentIndex() = default;

  static FragmentIndex build(const ParallelCorpus& corpus, int max_window = kDefaultMaxWindow,
                             bool case_fold = true);

  // Ids of pairs whose source contains the fragment contiguously; empty when
  // none. Throws std::invalid_argument for fragments longer than max_window
  // or empty.
  const std::vector<int>& lookup(const Fragment& fragment) const;
  const std::vector<int>& lookup_tokens(const Token* begin, std::size_t count) const;

  int max_window() const { return max_window_; }
  bool case_fold() const { return case_fold_; }
  const std::string& corpus_name() const { return corpus_name_; }
  std::size_t corpus_size() const { return corpus_size_; }
  std::size_t key_count() const { return postings_.size(); }
  std::size_t posting_entries() const;

  void save(const std::filesystem::path& path) const;
  static FragmentIndex load(const std::filesystem::path& path);

  bool operator==(const FragmentIndex& other) const;

 private:
  const std::vector<int>& find(const std::string& key, std::size_t length) const;
  std::string key_for(const std::vector<std::string>& tokens) const;

  int max_window_ = kDefaultMaxWindow;
  bool case_fold_ = true;
  std::string corpus_name_;
  std::size_t corpus_size_ = 0;
  std::unordered_map<std::string, std::vector<int>> postings_;
};

}  // namespace fshot
