#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace finqa {

// One word of source text: a maximal run of word bytes. ASCII letters are
// folded to lower case in `norm`; bytes >= 0x80 (UTF-8 multibyte sequences)
// pass through unchanged and count as word bytes, so no match boundary can
// split a multibyte character. `begin`/`end` are byte offsets into the
// original text.
struct WordToken {
  std::string norm;
  std::size_t begin = 0;
  std::size_t end = 0;
};

bool is_word_byte(unsigned char c);

std::vector<WordToken> word_tokens(std::string_view text);

// Lower-cased words joined by single spaces; empty when the input contains
// no word bytes. Punctuation and whitespace act as separators, so
// "cash-flow" and "Net  Income " come out as "cash flow" / "net income".
std::string normalized_or_empty(std::string_view raw);

bool is_valid_utf8(std::string_view s);

}  // namespace finqa
