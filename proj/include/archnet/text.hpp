#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace archnet {

// Decodes UTF-8 into code points. Invalid byte sequences decode to U+FFFD
// one byte at a time, so decoding never fails.
std::u32string decode_utf8(std::string_view text);

// Single-step decoder: reads the code point at byte offset i and advances i
// past the bytes consumed (one byte for malformed input, yielding U+FFFD).
char32_t decode_point(std::string_view text, std::size_t& i);

std::string encode_utf8(std::u32string_view points);
std::string encode_utf8(char32_t point);

// Latin letters: ASCII A-Z/a-z, Latin-1 letters, Latin Extended-A/B.
bool is_latin_letter(char32_t point);

// ASCII whitespace plus NBSP.
bool is_space(char32_t point);

// Lowercases ASCII, Latin-1 and Latin Extended-A code points; everything
// else passes through unchanged. Diacritics are preserved.
char32_t to_lower(char32_t point);

std::string lower_copy(std::string_view text);

// Canonical comparison form for person names: lowercase, periods and commas
// become spaces, whitespace runs collapse to single spaces, outer whitespace
// trimmed. Diacritics are kept; the archive mixes Dutch, German and French
// names and folding them would conflate distinct people.
std::string normalize_name(std::string_view surface);

std::vector<std::string> split_tokens(std::string_view text);

// Number of code points, not bytes.
std::size_t length_points(std::string_view text);

std::string trim(std::string_view text);

}  // namespace archnet
