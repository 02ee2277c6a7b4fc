#include "citefid/text.hpp"

namespace citefid::text {

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = to_lower(c);
    return out;
}

std::string_view trim(std::string_view s) noexcept {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t begin = 0;
    while (true) {
        const std::size_t pos = s.find(sep, begin);
        const auto piece = trim(s.substr(begin, pos == std::string_view::npos ? std::string_view::npos : pos - begin));
        out.emplace_back(piece);
        if (pos == std::string_view::npos) break;
        begin = pos + 1;
    }
    return out;
}

std::size_t utf8_length(std::string_view s) noexcept {
    std::size_t n = 0;
    for (unsigned char c : s) {
        if ((c & 0xC0) != 0x80) ++n;
    }
    return n;
}

bool contains_phrase(std::string_view haystack_lower, std::string_view phrase) noexcept {
    if (phrase.empty()) return false;
    std::size_t pos = 0;
    while ((pos = haystack_lower.find(phrase, pos)) != std::string_view::npos) {
        const bool left_ok = pos == 0 || !is_ascii_alnum(haystack_lower[pos - 1]);
        const std::size_t after = pos + phrase.size();
        const bool right_ok = after >= haystack_lower.size() || !is_ascii_alnum(haystack_lower[after]);
        if (left_ok && right_ok) return true;
        ++pos;
    }
    return false;
}

}  // namespace citefid::text
