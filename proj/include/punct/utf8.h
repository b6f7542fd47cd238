#ifndef PUNCT_UTF8_H_
#define PUNCT_UTF8_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace punct::utf8 {

// Throws IngestError naming the offset of the first bad byte.
void validate(std::string_view text);

// Decodes validated text into code points.
std::vector<char32_t> decode(std::string_view text);

void append(std::string& out, char32_t cp);
std::string encode(const std::vector<char32_t>& cps);

// Simple case mapping covering Latin-1, Latin Extended-A, basic Greek and
// Cyrillic. Locale independent.
char32_t to_lower(char32_t cp);
inline bool is_upper(char32_t cp) { return to_lower(cp) != cp; }

std::string to_lower(std::string_view text);

// Byte length of the code point starting with lead byte `b`; 1 for
// continuation or invalid bytes.
std::size_t sequence_length(unsigned char b);

}  // namespace punct::utf8

#endif  // PUNCT_UTF8_H_
