#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace citefid {

// Rule-based sentence splitter. A boundary is ".", "!" or "?" (plus any closing
// quotes or brackets) followed by whitespace and an uppercase letter or digit,
// unless the token ending in "." is a guarded abbreviation ("et al.", "e.g.",
// "i.e.", "Fig.", "Eq.", "vs.", "Dr.", "No." or a lone capital initial).
// Whitespace runs inside a sentence are collapsed to one space.
std::vector<std::string> segment_sentences(std::string_view body);

}  // namespace citefid
