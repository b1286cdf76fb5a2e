#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace censaudit::text {

bool is_space(char c);
std::string_view trim(std::string_view s);
std::string_view trim_left(std::string_view s);

// Collapses runs of ASCII whitespace to one space and trims both ends.
std::string normalize_whitespace(std::string_view s);

// ASCII lowercase plus folding of typographic quotes (’ ‘ “ ”) to their ASCII forms,
// so lexicon phrases written with straight apostrophes match model output.
std::string fold(std::string_view s);

// Number of whitespace-delimited tokens.
size_t whitespace_token_count(std::string_view s);

// Lowercased maximal runs of ASCII alphanumerics; non-ASCII bytes are kept as
// word characters so CJK text still yields tokens.
std::vector<std::string> word_tokens(std::string_view s);

// Case-insensitive match of `needle` in `haystack` where the characters on either
// side of the match are not word characters.
bool contains_word(std::string_view haystack, std::string_view needle);

// Non-overlapping occurrence count; 0 for an empty needle.
size_t count_occurrences(std::string_view haystack, std::string_view needle);

// UTF-8 code points that are not ASCII whitespace.
size_t visible_length(std::string_view s);

std::vector<std::string> split_lines(std::string_view s);

bool starts_with_icase(std::string_view s, std::string_view prefix);

}  // namespace censaudit::text
