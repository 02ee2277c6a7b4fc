#include "citefid/segment.hpp"

#include <array>

#include "citefid/text.hpp"

namespace citefid {
namespace {

constexpr std::array<std::string_view, 7> kGuardedAbbreviations{
    "al.", "e.g.", "i.e.", "Fig.", "Eq.", "vs.", "Dr."};

bool is_closing(char c) noexcept {
    return c == '"' || c == '\'' || c == ')' || c == ']';
}

// Quotes only; an opening bracket usually starts a citation marker.
bool is_opening_quote(char c) noexcept { return c == '"' || c == '\''; }

// The whitespace-delimited token that ends at `dot` (inclusive).
std::string_view token_ending_at(std::string_view s, std::size_t dot) noexcept {
    std::size_t begin = dot;
    while (begin > 0 && !text::is_space(s[begin - 1])) --begin;
    return s.substr(begin, dot - begin + 1);
}

bool is_guarded(std::string_view s, std::size_t dot) noexcept {
    const std::string_view token = token_ending_at(s, dot);
    // Strip leading openers such as "(" in "(e.g."
    std::string_view core = token;
    while (!core.empty() && (core.front() == '(' || core.front() == '[' || core.front() == '"')) {
        core.remove_prefix(1);
    }
    if (core.size() == 2 && text::is_ascii_upper(core[0])) return true;  // initial "J."
    if (core == "No.") return true;
    for (auto abbr : kGuardedAbbreviations) {
        if (core == abbr) {
            // "al." only counts as part of "et al."
            if (abbr == "al.") {
                const std::size_t token_begin = dot + 1 - token.size();
                const std::string_view before = text::trim(s.substr(0, token_begin));
                return before.size() >= 2 && before.substr(before.size() - 2) == "et";
            }
            return true;
        }
    }
    return false;
}

void append_collapsed(std::string& out, std::string_view piece) {
    bool pending_space = false;
    for (char c : piece) {
        if (text::is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(c);
    }
}

}  // namespace

std::vector<std::string> segment_sentences(std::string_view body) {
    std::vector<std::string> sentences;
    std::size_t start = 0;
    const std::size_t n = body.size();

    auto flush = [&](std::size_t end) {
        std::string sentence;
        append_collapsed(sentence, text::trim(body.substr(start, end - start)));
        if (!sentence.empty()) sentences.push_back(std::move(sentence));
        start = end;
    };

    for (std::size_t i = 0; i < n; ++i) {
        const char c = body[i];
        if (c != '.' && c != '!' && c != '?') continue;
        std::size_t j = i + 1;
        while (j < n && is_closing(body[j])) ++j;
        if (j >= n || !text::is_space(body[j])) continue;
        std::size_t k = j;
        while (k < n && text::is_space(body[k])) ++k;
        if (k >= n) continue;
        while (k + 1 < n && is_opening_quote(body[k])) ++k;
        if (!text::is_ascii_upper(body[k]) && !text::is_ascii_digit(body[k])) continue;
        if (c == '.' && is_guarded(body, i)) continue;
        flush(j);
        i = k - 1;
    }
    flush(n);
    return sentences;
}

}  // namespace citefid
