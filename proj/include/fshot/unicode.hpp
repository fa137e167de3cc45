#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fshot::uni {

// Invalid UTF-8 bytes are decoded to 0xDC00+byte (surrogate-escape style) so
// that encode(decode(s)) == s for arbitrary byte strings.
struct Codepoint {
  char32_t value;
  std::size_t begin;  // byte offset into the source string
  std::size_t end;
};

std::vector<Codepoint> decode_utf8(std::string_view s);
void append_utf8(std::string& out, char32_t cp);
std::string encode_utf8(const std::vector<char32_t>& cps);

bool is_space(char32_t cp);
bool is_punct(char32_t cp);
bool is_digit(char32_t cp);
char32_t to_lower(char32_t cp);
inline bool is_upper(char32_t cp) { return to_lower(cp) != cp; }

std::size_t count_codepoints(std::string_view s);

// Per-codepoint lowercasing, used for case-insensitive fragment matching.
std::string fold_case(std::string_view s);

// Canonical composition of combining sequences (NFC for Latin-script text;
// no reordering or singleton decomposition).
std::string compose_nfc(std::string_view s);

}  // namespace fshot::uni
