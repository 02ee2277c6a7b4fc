#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "citefid/citation_extract.hpp"
#include "citefid/claims.hpp"
#include "citefid/model_id.hpp"

namespace citefid {

using ScorerId = ModelId;

inline constexpr double kMinFidelity = 1.0;
inline constexpr double kMaxFidelity = 5.0;

// Information-change score on the 1 (completely different) .. 5 (same
// information) scale.
class FidelityScore {
public:
    constexpr FidelityScore() = default;
    // Throws PreconditionError outside [1, 5] or for NaN.
    explicit FidelityScore(double value);

    constexpr double value() const noexcept { return value_; }
    auto operator<=>(const FidelityScore&) const = default;

private:
    double value_ = kMinFidelity;
};

struct TextPair {
    std::string a;
    std::string b;
};

// Pairwise scorer. Implementations must be safe to call concurrently.
class Scorer {
public:
    virtual ~Scorer() = default;
    // One score per pair, same order. Never drops pairs.
    virtual std::vector<FidelityScore> score_batch(std::span<const TextPair> pairs) const = 0;
    virtual ScorerId id() const = 0;
};

// Lowercased alphanumeric tokens of length >= 2, scored 1 + 4 * Jaccard.
class BaselineScorer final : public Scorer {
public:
    std::vector<FidelityScore> score_batch(std::span<const TextPair> pairs) const override;
    ScorerId id() const override { return {"baseline-jaccard", "1"}; }

    static FidelityScore score(std::string_view a, std::string_view b);
    static std::vector<std::string> tokens(std::string_view text);
};

FidelityScore score_pair(std::string_view a, std::string_view b, const Scorer& scorer);
std::vector<FidelityScore> score_batch(std::span<const TextPair> pairs, const Scorer& scorer);

struct BestMatch {
    std::size_t matched_claim_index = 0;  // sentence_index of the winning claim
    FidelityScore fidelity;
};

// Max over candidate claims; ties go to the smallest sentence_index. Throws
// PreconditionError for an empty claim list.
BestMatch best_match(std::string_view citing, std::span<const ClaimSentence> claims,
                     const Scorer& scorer);

// Same reduction over precomputed scores (scores[i] belongs to claims[i]).
BestMatch best_match_from_scores(std::span<const ClaimSentence> claims,
                                 std::span<const FidelityScore> scores);

struct PairRecord {
    PaperId citing_paper_id;
    std::size_t citing_sentence_index = 0;
    PaperId cited_paper_id;
    std::size_t matched_claim_index = 0;
    FidelityScore fidelity;
    std::size_t n_candidates = 1;
    ScorerId scorer;

    bool operator==(const PairRecord&) const = default;
};

struct PairStats {
    std::size_t instances = 0;
    std::size_t records = 0;
    std::size_t skipped_no_claims = 0;
    std::size_t scored_pairs = 0;

    std::map<std::string, std::size_t> as_counters() const;
};

struct PairOptions {
    unsigned workers = 1;
    std::size_t batch_size = 256;
};

// Claims grouped by paper, each list in sentence order.
using ClaimsByPaper = std::map<PaperId, std::vector<ClaimSentence>>;
ClaimsByPaper group_claims(std::span<const ClaimSentence> claims);

// One record per instance whose cited paper has at least one claim, sorted by
// (citing_paper_id, citing_sentence_index).
std::vector<PairRecord> build_pair_records(std::span<const CitationInstance> instances,
                                           const ClaimsByPaper& claims_by_paper,
                                           const Scorer& scorer, const PairOptions& options = {},
                                           PairStats* stats = nullptr);

}  // namespace citefid
