#include "fshot/unicode.hpp"

#include <algorithm>

namespace fshot::uni {

namespace {

struct LowerPair {
  char32_t from;
  char32_t to;
};
struct ComposeEntry {
  char32_t starter;
  char32_t mark;
  char32_t composed;
};

#include "unicode_tables.inc"

template <std::size_t N>
bool in_table(const char32_t (&table)[N], char32_t cp) {
  return std::binary_search(std::begin(table), std::end(table), cp);
}

}  // namespace

std::vector<Codepoint> decode_utf8(std::string_view s) {
  std::vector<Codepoint> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    }
    bool ok = len > 0 && i + len <= s.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (b & 0x3F);
      }
    }
    // Reject overlong encodings and surrogates.
    if (ok) {
      if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
          (len == 4 && (cp < 0x10000 || cp > 0x10FFFF)) ||
          (cp >= 0xD800 && cp <= 0xDFFF)) {
        ok = false;
      }
    }
    if (!ok) {
      out.push_back({static_cast<char32_t>(0xDC00 + b0), i, i + 1});
      ++i;
    } else {
      out.push_back({cp, i, i + len});
      i += len;
    }
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp >= 0xDC00 && cp <= 0xDCFF) {  // escaped raw byte
    out.push_back(static_cast<char>(cp - 0xDC00));
  } else if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string encode_utf8(const std::vector<char32_t>& cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) {
    append_utf8(out, cp);
  }
  return out;
}

bool is_space(char32_t cp) { return in_table(kSpaceCps, cp); }
bool is_punct(char32_t cp) { return in_table(kPunctCps, cp); }
bool is_digit(char32_t cp) { return in_table(kDigitCps, cp); }

char32_t to_lower(char32_t cp) {
  const auto* begin = std::begin(kLowerPairs);
  const auto* end = std::end(kLowerPairs);
  const auto* it = std::lower_bound(begin, end, cp, [](const LowerPair& p, char32_t c) {
    return p.from < c;
  });
  if (it != end && it->from == cp) {
    return it->to;
  }
  return cp;
}

std::size_t count_codepoints(std::string_view s) {
  std::size_t n = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b = static_cast<unsigned char>(s[i]);
    if (b < 0x80 || (b & 0xC0) != 0x80) {
      ++n;
    }
    ++i;
  }
  return n;
}

std::string fold_case(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const auto& c : decode_utf8(s)) {
    append_utf8(out, to_lower(c.value));
  }
  return out;
}

namespace {

char32_t compose_pair(char32_t starter, char32_t mark) {
  const auto* begin = std::begin(kComposeEntries);
  const auto* end = std::end(kComposeEntries);
  const auto* it = std::lower_bound(begin, end, starter, [](const ComposeEntry& e, char32_t c) {
    return e.starter < c;
  });
  for (; it != end && it->starter == starter; ++it) {
    if (it->mark == mark) {
      return it->composed;
    }
  }
  return 0;
}

}  // namespace

std::string compose_nfc(std::string_view s) {
  const auto cps = decode_utf8(s);
  std::vector<char32_t> out;
  out.reserve(cps.size());
  for (const auto& c : cps) {
    if (!out.empty()) {
      if (char32_t composed = compose_pair(out.back(), c.value)) {
        out.back() = composed;
        continue;
      }
    }
    out.push_back(c.value);
  }
  return encode_utf8(out);
}

}  // namespace fshot::uni
