#ifndef MSGW_TEXT_HPP
#define MSGW_TEXT_HPP

#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers shared by the gazetteer, the input sanitizer and the ROUGE
// tokenizer. Decoding is lenient: malformed bytes decode to U+FFFD.
namespace msgw::text {

std::u32string decode_utf8(std::string_view bytes);
void append_utf8(std::string& out, char32_t cp);
std::string encode_utf8(std::u32string_view cps);

// Number of code points.
std::size_t utf8_length(std::string_view bytes);

// ASCII replacement for a Latin letter with diacritics ("ș" -> "s",
// "ß" -> "ss"), or an empty view when the code point is not in the table.
std::string_view fold_diacritic(char32_t cp);

// Simple case mapping covering ASCII, Latin-1, Latin Extended-A, basic Greek
// and Cyrillic.
char32_t to_lower(char32_t cp);

// Letters and digits for tokenization purposes.
bool is_alnum(char32_t cp);

bool is_space(char32_t cp);

std::string_view trim(std::string_view s);

// Splits on single spaces and strips punctuation adjacent to each token
// ("paris?" -> "paris"). Empty tokens are dropped.
std::vector<std::string> match_tokens(std::string_view normalized);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

} // namespace msgw::text

#endif
