#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace citefid {

enum class MarkerStyle { numeric_bracket, author_year_paren };

std::string_view to_string(MarkerStyle s) noexcept;
std::optional<MarkerStyle> parse_marker_style(std::string_view s) noexcept;

// One parenthetical citation. Offsets are byte offsets into the sentence,
// `end` one past the closing bracket.
struct CitationMarker {
    std::size_t start = 0;
    std::size_t end = 0;
    MarkerStyle style = MarkerStyle::numeric_bracket;
    std::vector<std::string> keys;  // "17" for numeric, "Lee 2020" for author-year

    bool operator==(const CitationMarker&) const = default;
};

// Numeric "[17]", "[1,2]", "[1-3]" and author-year "(Specht, 2019)",
// "(Lee et al. 2020)", "(A 2019; B 2020)" markers, ordered by start offset.
// Parentheticals that are not citations produce nothing.
std::vector<CitationMarker> parse_markers(std::string_view sentence);

// True when only ".", "!", "?", whitespace or closing quotes follow `end`.
bool is_terminal(std::string_view sentence, std::size_t end) noexcept;

enum class CandidateVerdict {
    accepted,
    no_marker,
    multiple_markers,
    non_terminal,
    multiple_keys,
};

std::string_view to_string(CandidateVerdict v) noexcept;

struct CandidateCheck {
    CandidateVerdict verdict = CandidateVerdict::no_marker;
    std::optional<CitationMarker> marker;  // set iff accepted
};

// Single-source terminal-parenthetical rule with the reason for rejection.
CandidateCheck check_single_source(std::string_view sentence);

// The marker iff the sentence has exactly one marker, it is terminal, and it
// carries exactly one key.
std::optional<CitationMarker> is_single_source_reporting_candidate(std::string_view sentence);

}  // namespace citefid
