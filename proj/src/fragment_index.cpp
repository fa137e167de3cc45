#include "fshot/fragment_index.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "fshot/unicode.hpp"

namespace fshot {

std::string Fragment::display() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) {
      out += ' ';
    }
    out += tokens[i];
  }
  return out;
}

FragmentIndex FragmentIndex::build(const ParallelCorpus& corpus, int max_window, bool case_fold) {
  if (max_window < 1) {
    throw std::invalid_argument("max_window must be >= 1");
  }
  FragmentIndex index;
  index.max_window_ = max_window;
  index.case_fold_ = case_fold;
  index.corpus_name_ = corpus.name;
  index.corpus_size_ = corpus.size();

  for (const auto& pair : corpus.pairs) {
    const auto& tokens = pair.source.tokens;
    std::vector<std::string> folded;
    folded.reserve(tokens.size());
    for (const auto& t : tokens) {
      folded.push_back(case_fold ? uni::fold_case(t.text) : t.text);
    }
    for (std::size_t start = 0; start < folded.size(); ++start) {
      std::string key;
      const std::size_t longest =
          std::min(folded.size() - start, static_cast<std::size_t>(max_window));
      for (std::size_t n = 0; n < longest; ++n) {
        if (n > 0) {
          key += kKeySeparator;
        }
        key += folded[start + n];
        auto& posting = index.postings_[key];
        if (posting.empty() || posting.back() != pair.id) {
          posting.push_back(pair.id);
        }
      }
    }
  }
  // Pair ids are visited in increasing order, so postings come out sorted and
  // duplicate-free already; keep the invariant explicit.
  for (auto& [key, posting] : index.postings_) {
    posting.shrink_to_fit();
  }
  return index;
}

std::string FragmentIndex::key_for(const std::vector<std::string>& tokens) const {
  std::string key;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) {
      key += kKeySeparator;
    }
    key += case_fold_ ? uni::fold_case(tokens[i]) : tokens[i];
  }
  return key;
}

const std::vector<int>& FragmentIndex::find(const std::string& key, std::size_t length) const {
  static const std::vector<int> kEmpty;
  if (length == 0) {
    throw std::invalid_argument("fragment must contain at least one token");
  }
  if (length > static_cast<std::size_t>(max_window_)) {
    throw std::invalid_argument("fragment length " + std::to_string(length) +
                                " exceeds index max_window " + std::to_string(max_window_));
  }
  auto it = postings_.find(key);
  return it == postings_.end() ? kEmpty : it->second;
}

const std::vector<int>& FragmentIndex::lookup(const Fragment& fragment) const {
  return find(key_for(fragment.tokens), fragment.size());
}

const std::vector<int>& FragmentIndex::lookup_tokens(const Token* begin, std::size_t count) const {
  std::string key;
  for (std::size_t i = 0; i < count; ++i) {
    if (i > 0) {
      key += kKeySeparator;
    }
    key += case_fold_ ? uni::fold_case(begin[i].text) : begin[i].text;
  }
  return find(key, count);
}

std::size_t FragmentIndex::posting_entries() const {
  std::size_t n = 0;
  for (const auto& [key, posting] : postings_) {
    n += posting.size();
  }
  return n;
}

void FragmentIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write index file: " + path.string());
  }
  out << "fshot-index v1\n";
  out << "corpus\t" << corpus_name_ << '\n';
  out << "corpus_size\t" << corpus_size_ << '\n';
  out << "max_window\t" << max_window_ << '\n';
  out << "case_fold\t" << (case_fold_ ? 1 : 0) << '\n';
  out << "keys\t" << postings_.size() << '\n';
  // Sorted dump so identical indexes serialize identically.
  std::map<std::string, const std::vector<int>*> sorted;
  for (const auto& [key, posting] : postings_) {
    sorted.emplace(key, &posting);
  }
  for (const auto& [key, posting] : sorted) {
    out << key;
    for (int id : *posting) {
      out << '\t' << id;
    }
    out << '\n';
  }
  if (!out) {
    throw std::runtime_error("error while writing: " + path.string());
  }
}

FragmentIndex FragmentIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open index file: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line) || line != "fshot-index v1") {
    throw std::runtime_error(path.string() + ": not a fshot-index v1 file");
  }
  FragmentIndex index;
  std::size_t keys = 0;
  auto header_value = [&](const char* field) -> std::string {
    if (!std::getline(in, line)) {
      throw std::runtime_error(path.string() + ": truncated header");
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.substr(0, tab) != field) {
      throw std::runtime_error(path.string() + ": expected header field " + field);
    }
    return line.substr(tab + 1);
  };
  index.corpus_name_ = header_value("corpus");
  index.corpus_size_ = std::stoul(header_value("corpus_size"));
  index.max_window_ = std::stoi(header_value("max_window"));
  index.case_fold_ = header_value("case_fold") == "1";
  keys = std::stoul(header_value("keys"));

  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    std::string key = tab == std::string::npos ? line : line.substr(0, tab);
    std::vector<int> posting;
    std::size_t pos = tab;
    while (pos != std::string::npos) {
      const auto next = line.find('\t', pos + 1);
      const std::string field = line.substr(
          pos + 1, next == std::string::npos ? std::string::npos : next - pos - 1);
      posting.push_back(std::stoi(field));
      pos = next;
    }
    index.postings_.emplace(std::move(key), std::move(posting));
  }
  if (index.postings_.size() != keys) {
    throw std::runtime_error(path.string() + ": key count mismatch (header " +
                             std::to_string(keys) + ", read " +
                             std::to_string(index.postings_.size()) + ")");
  }
  return index;
}

bool FragmentIndex::operator==(const FragmentIndex& other) const {
  return max_window_ == other.max_window_ && case_fold_ == other.case_fold_ &&
         corpus_name_ == other.corpus_name_ && corpus_size_ == other.corpus_size_ &&
         postings_ == other.postings_;
}

}  // namespace fshot
