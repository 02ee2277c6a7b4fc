#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "citefid/citation_extract.hpp"
#include "citefid/claims.hpp"
#include "citefid/fidelity.hpp"
#include "citefid/telephone.hpp"

// Line-delimited JSON forms of the stage outputs. Each record is a single
// line with sorted keys; parse_* throws citefid::Error on malformed input.
namespace citefid::records {

std::string to_line(const CitationInstance& c);
std::string to_line(const ClaimSentence& c);
std::string to_line(const PairRecord& p);
std::string to_line(const MatchedPair& m);

CitationInstance parse_citation(std::string_view line);
ClaimSentence parse_claim(std::string_view line);
PairRecord parse_pair(std::string_view line);

std::vector<CitationInstance> read_citations(const std::filesystem::path& path);
std::vector<ClaimSentence> read_claims(const std::filesystem::path& path);
std::vector<PairRecord> read_pairs(const std::filesystem::path& path);

template <typename T>
std::string to_lines(const std::vector<T>& items) {
    std::string out;
    for (const auto& item : items) {
        out += to_line(item);
        out += '\n';
    }
    return out;
}

}  // namespace citefid::records
