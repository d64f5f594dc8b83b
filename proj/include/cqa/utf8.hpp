#pragma once

#include <string>
#include <string_view>

namespace cqa::utf8 {

/// Decodes UTF-8 into code points. Invalid sequences decode to U+FFFD, one
/// replacement per offending byte.
std::u32string decode(std::string_view text);

std::string encode(std::u32string_view cps);
void append(std::string& out, char32_t cp);

/// Number of code points in `text`.
std::size_t length(std::string_view text);

/// Letters and digits, including non-ASCII scripts. Code points in the common
/// punctuation, symbol, and space blocks are not word characters.
bool is_word_char(char32_t cp);

/// Simple one-to-one lowercase mapping for ASCII, Latin-1, Latin Extended-A,
/// Greek, and Cyrillic. Other code points map to themselves.
char32_t to_lower(char32_t cp);

}  // namespace cqa::utf8
