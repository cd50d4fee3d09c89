#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace respact::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
// Trims and collapses internal whitespace runs to a single space.
std::string normalize_space(std::string_view s);
std::vector<std::string> split_words(std::string_view s);
bool starts_with_ci(std::string_view s, std::string_view prefix);
bool contains_ci(std::string_view haystack, std::string_view needle);
// Whole-word, case-insensitive search.
bool contains_word_ci(std::string_view haystack, std::string_view word);

}  // namespace respact::text
