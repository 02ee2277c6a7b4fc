#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace citefid::text {

constexpr bool is_ascii_alpha(char c) noexcept {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
constexpr bool is_ascii_digit(char c) noexcept { return c >= '0' && c <= '9'; }
constexpr bool is_ascii_alnum(char c) noexcept { return is_ascii_alpha(c) || is_ascii_digit(c); }
constexpr bool is_ascii_upper(char c) noexcept { return c >= 'A' && c <= 'Z'; }
constexpr bool is_space(char c) noexcept {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}
constexpr char to_lower(char c) noexcept {
    return is_ascii_upper(c) ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string lower(std::string_view s);
std::string_view trim(std::string_view s) noexcept;
std::vector<std::string> split(std::string_view s, char sep);  // trimmed pieces

// Code points in a UTF-8 string (continuation bytes not counted).
std::size_t utf8_length(std::string_view s) noexcept;

// Whole-phrase containment: `phrase` occurs in `haystack_lower` with
// non-alphanumeric characters (or string ends) on both sides.
bool contains_phrase(std::string_view haystack_lower, std::string_view phrase) noexcept;

}  // namespace citefid::text
