#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "citefid/corpus.hpp"
#include "citefid/fidelity.hpp"
#include "citefid/graph.hpp"

namespace citefid {

enum class Stratum { low, medium, high };

std::string_view to_string(Stratum s) noexcept;
std::optional<Stratum> parse_stratum(std::string_view s) noexcept;

// high iff > 4, low iff < 3, medium on [3, 4] inclusive.
Stratum stratum_for(double intermediary_fidelity) noexcept;

// Scored records keyed by (citing, cited). When a citing paper reports the
// same cited paper more than once, the earliest sentence wins.
class PairIndex {
public:
    PairIndex() = default;
    explicit PairIndex(std::span<const PairRecord> records);

    const PairRecord* find(const PaperId& citing, const PaperId& cited) const;
    std::size_t size() const noexcept { return by_pair_.size(); }
    const std::map<std::pair<PaperId, PaperId>, PairRecord>& entries() const noexcept { return by_pair_; }

private:
    std::map<std::pair<PaperId, PaperId>, PairRecord> by_pair_;
};

// A (original, intermediary, treated) structure: B->A, C->A, C->B.
struct TelephoneTriple {
    PaperId original_a;
    PaperId intermediary_b;
    PaperId treated_c;
    PairRecord c_to_a;
    PairRecord b_to_a;
    Stratum b_fidelity_stratum = Stratum::medium;

    bool operator==(const TelephoneTriple&) const = default;
};

struct TripleStats {
    std::size_t structures = 0;         // (A,B,C) with all three edges
    std::size_t triples = 0;
    std::size_t skipped_unscored = 0;   // missing c_to_a or b_to_a record
};

// Sorted by (A, B, C).
std::vector<TelephoneTriple> find_intermediary_triples(const CitationGraph& graph,
                                                       const PairIndex& pairs,
                                                       unsigned workers = 1,
                                                       TripleStats* stats = nullptr);

struct MatchedPair {
    TelephoneTriple triple;
    PaperId control_d;
    PairRecord d_to_a;

    bool operator==(const MatchedPair&) const = default;
};

struct MatchStats {
    std::size_t triples = 0;
    std::size_t matched = 0;
    std::size_t unmatched = 0;
};

// Greedy 1:1 exact matching in (A, B, C) order. A control D cites A with a
// scored record, shares C's year, field and matched claim, cites no paper
// that cites A, and is used at most once per A.
std::vector<MatchedPair> match_controls(std::span<const TelephoneTriple> triples,
                                        const CitationGraph& graph, const PairIndex& candidates,
                                        const std::map<PaperId, Paper>& papers,
                                        unsigned workers = 1, MatchStats* stats = nullptr);

// Re-checks every matching condition for one pair against raw data.
bool satisfies_matching_invariants(const MatchedPair& pair, const CitationGraph& graph,
                                   const std::map<PaperId, Paper>& papers);

struct EffectEstimate {
    std::size_t n_pairs = 0;
    double mean_treatment = 0.0;
    double mean_control = 0.0;
    double difference = 0.0;  // mean_treatment - mean_control
    double standard_error = 0.0;  // sd of paired differences / sqrt(n)
};

// Throws InsufficientDataError for fewer than two pairs.
EffectEstimate estimate_effect(std::span<const MatchedPair> pairs);

struct StratumSummary {
    Stratum stratum = Stratum::medium;
    std::size_t n = 0;
    std::optional<double> mean_treated_fidelity;  // mean c_to_a fidelity
    std::optional<EffectEstimate> effect;          // absent when n < 2
};

// Always three entries, ordered low, medium, high.
std::vector<StratumSummary> stratify_by_intermediary_fidelity(std::span<const MatchedPair> pairs);

// TSV with rows "overall", "low", "medium", "high":
// group, n, mean_treatment, mean_control, difference, se.
std::string effects_table(std::span<const MatchedPair> pairs);

}  // namespace citefid
