#include "citefid/markers.hpp"

#include <charconv>

#include "citefid/text.hpp"

namespace citefid {

std::string_view to_string(MarkerStyle s) noexcept {
    return s == MarkerStyle::numeric_bracket ? "numeric_bracket" : "author_year_paren";
}

std::optional<MarkerStyle> parse_marker_style(std::string_view s) noexcept {
    if (s == "numeric_bracket") return MarkerStyle::numeric_bracket;
    if (s == "author_year_paren") return MarkerStyle::author_year_paren;
    return std::nullopt;
}

std::string_view to_string(CandidateVerdict v) noexcept {
    switch (v) {
        case CandidateVerdict::accepted: return "accepted";
        case CandidateVerdict::no_marker: return "no_marker";
        case CandidateVerdict::multiple_markers: return "multiple_markers";
        case CandidateVerdict::non_terminal: return "non_terminal";
        case CandidateVerdict::multiple_keys: return "multiple_keys";
    }
    return "no_marker";
}

namespace {

constexpr int kMaxRangeSpan = 200;
constexpr std::string_view kEnDash = "\xE2\x80\x93";

std::optional<int> parse_int(std::string_view s) {
    if (s.empty() || s.size() > 6) return std::nullopt;
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

// "17", "1,2", "1-3", "1, 4-6"; nullopt when anything else is inside.
std::optional<std::vector<std::string>> parse_numeric_body(std::string_view body) {
    std::string normalized;
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body.substr(i, kEnDash.size()) == kEnDash) {
            normalized.push_back('-');
            i += kEnDash.size() - 1;
        } else {
            normalized.push_back(body[i]);
        }
    }
    if (text::trim(normalized).empty()) return std::nullopt;
    std::vector<std::string> keys;
    for (const auto& item : text::split(normalized, ',')) {
        const std::size_t dash = item.find('-');
        if (dash == std::string::npos) {
            auto v = parse_int(item);
            if (!v) return std::nullopt;
            keys.push_back(std::to_string(*v));
            continue;
        }
        auto lo = parse_int(text::trim(std::string_view(item).substr(0, dash)));
        auto hi = parse_int(text::trim(std::string_view(item).substr(dash + 1)));
        if (!lo || !hi || *lo > *hi || *hi - *lo > kMaxRangeSpan) return std::nullopt;
        for (int k = *lo; k <= *hi; ++k) keys.push_back(std::to_string(k));
    }
    return keys;
}

bool is_name_char(char c) noexcept {
    const auto u = static_cast<unsigned char>(c);
    return text::is_ascii_alpha(c) || u >= 0x80 || c == ' ' || c == '.' || c == '&' || c == '-' ||
           c == '\'' || c == ',';
}

bool is_year_token(std::string_view tok) noexcept {
    if (tok.size() != 4 && tok.size() != 5) return false;
    for (std::size_t i = 0; i < 4; ++i) {
        if (!text::is_ascii_digit(tok[i])) return false;
    }
    if (tok.size() == 5 && !(tok[4] >= 'a' && tok[4] <= 'z')) return false;
    const int year = (tok[0] - '0') * 1000 + (tok[1] - '0') * 100 + (tok[2] - '0') * 10 + (tok[3] - '0');
    return year >= 1500 && year <= 2100;
}

// "Lee et al. 2020", "Specht, 2019", "Smith and Jones 2019a", "Smith, 2019, 2020".
std::optional<std::vector<std::string>> parse_author_year_group(std::string_view group) {
    group = text::trim(group);
    // Peel trailing year tokens separated by commas or spaces.
    std::vector<std::string> years;
    while (true) {
        std::size_t end = group.size();
        while (end > 0 && (text::is_space(group[end - 1]) || group[end - 1] == ',')) --end;
        std::size_t begin = end;
        while (begin > 0 && !text::is_space(group[begin - 1]) && group[begin - 1] != ',') --begin;
        const std::string_view tok = group.substr(begin, end - begin);
        if (!is_year_token(tok)) break;
        years.insert(years.begin(), std::string(tok));
        group = group.substr(0, begin);
    }
    if (years.empty()) return std::nullopt;

    std::string_view name = text::trim(group);
    while (!name.empty() && (name.back() == ',' || text::is_space(name.back()))) name.remove_suffix(1);
    if (name.empty()) return std::nullopt;
    const auto first = static_cast<unsigned char>(name.front());
    if (!(text::is_ascii_upper(name.front()) || first >= 0x80)) return std::nullopt;
    for (char c : name) {
        if (!is_name_char(c)) return std::nullopt;
    }

    std::size_t word_end = 0;
    while (word_end < name.size() && !text::is_space(name[word_end]) && name[word_end] != ',') ++word_end;
    std::string_view surname = name.substr(0, word_end);
    while (!surname.empty() && surname.back() == '.') surname.remove_suffix(1);
    if (surname.empty()) return std::nullopt;

    std::vector<std::string> keys;
    for (const auto& y : years) keys.push_back(std::string(surname) + " " + y);
    return keys;
}

std::optional<std::vector<std::string>> parse_author_year_body(std::string_view body) {
    std::vector<std::string> keys;
    for (const auto& group : text::split(body, ';')) {
        auto k = parse_author_year_group(group);
        if (!k) return std::nullopt;
        keys.insert(keys.end(), k->begin(), k->end());
    }
    return keys;
}

}  // namespace

std::vector<CitationMarker> parse_markers(std::string_view sentence) {
    std::vector<CitationMarker> markers;
    std::size_t i = 0;
    while (i < sentence.size()) {
        const char open = sentence[i];
        if (open != '[' && open != '(') {
            ++i;
            continue;
        }
        const char close = open == '[' ? ']' : ')';
        const std::size_t close_pos = sentence.find(close, i + 1);
        if (close_pos == std::string_view::npos) break;
        const std::string_view body = sentence.substr(i + 1, close_pos - i - 1);
        if (body.find(open) != std::string_view::npos) {
            // Nested opener: restart from the inner one.
            i = i + 1 + body.find(open);
            continue;
        }
        auto keys = open == '[' ? parse_numeric_body(body) : parse_author_year_body(body);
        if (keys && !keys->empty()) {
            markers.push_back({i, close_pos + 1,
                               open == '[' ? MarkerStyle::numeric_bracket : MarkerStyle::author_year_paren,
                               std::move(*keys)});
            i = close_pos + 1;
        } else {
            ++i;
        }
    }
    return markers;
}

bool is_terminal(std::string_view sentence, std::size_t end) noexcept {
    static constexpr std::string_view kClosingQuotes[] = {"\xE2\x80\x9D", "\xE2\x80\x99", "\xC2\xBB"};
    std::size_t i = end;
    while (i < sentence.size()) {
        const char c = sentence[i];
        if (c == '.' || c == '!' || c == '?' || c == '"' || c == '\'' || text::is_space(c)) {
            ++i;
            continue;
        }
        bool matched = false;
        for (auto q : kClosingQuotes) {
            if (sentence.substr(i, q.size()) == q) {
                i += q.size();
                matched = true;
                break;
            }
        }
        if (!matched) return false;
    }
    return true;
}

CandidateCheck check_single_source(std::string_view sentence) {
    auto markers = parse_markers(sentence);
    if (markers.empty()) return {CandidateVerdict::no_marker, std::nullopt};
    if (markers.size() > 1) return {CandidateVerdict::multiple_markers, std::nullopt};
    if (!is_terminal(sentence, markers.front().end)) return {CandidateVerdict::non_terminal, std::nullopt};
    if (markers.front().keys.size() != 1) return {CandidateVerdict::multiple_keys, std::nullopt};
    return {CandidateVerdict::accepted, std::move(markers.front())};
}

std::optional<CitationMarker> is_single_source_reporting_candidate(std::string_view sentence) {
    return check_single_source(sentence).marker;
}

}  // namespace citefid
