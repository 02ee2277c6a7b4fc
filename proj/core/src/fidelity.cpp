#include "citefid/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "citefid/errors.hpp"
#include "citefid/parallel.hpp"
#include "citefid/text.hpp"

namespace citefid {

FidelityScore::FidelityScore(double value) : value_(value) {
    if (!(value >= kMinFidelity && value <= kMaxFidelity)) {
        throw PreconditionError("fidelity score " + std::to_string(value) + " outside [1, 5]");
    }
}

std::vector<std::string> BaselineScorer::tokens(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (cur.size() >= 2) out.push_back(cur);
        cur.clear();
    };
    for (char c : text) {
        if (text::is_ascii_alnum(c)) {
            cur.push_back(text::to_lower(c));
        } else {
            flush();
        }
    }
    flush();
    return out;
}

FidelityScore BaselineScorer::score(std::string_view a, std::string_view b) {
    auto unique_sorted = [](std::vector<std::string> v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    };
    const auto sa = unique_sorted(tokens(a));
    const auto sb = unique_sorted(tokens(b));
    if (sa.empty() && sb.empty()) return FidelityScore(kMaxFidelity);
    if (sa.empty() || sb.empty()) return FidelityScore(kMinFidelity);
    std::size_t shared = 0;
    for (auto i = sa.begin(), j = sb.begin(); i != sa.end() && j != sb.end();) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++shared;
            ++i;
            ++j;
        }
    }
    const std::size_t unioned = sa.size() + sb.size() - shared;
    const double jaccard = static_cast<double>(shared) / static_cast<double>(unioned);
    return FidelityScore(1.0 + 4.0 * jaccard);
}

std::vector<FidelityScore> BaselineScorer::score_batch(std::span<const TextPair> pairs) const {
    std::vector<FidelityScore> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back(score(p.a, p.b));
    return out;
}

std::vector<FidelityScore> score_batch(std::span<const TextPair> pairs, const Scorer& scorer) {
    if (pairs.empty()) return {};
    auto scores = scorer.score_batch(pairs);
    if (scores.size() != pairs.size()) {
        throw TransportError("scorer returned " + std::to_string(scores.size()) + " scores for " +
                             std::to_string(pairs.size()) + " pairs");
    }
    return scores;
}

FidelityScore score_pair(std::string_view a, std::string_view b, const Scorer& scorer) {
    const TextPair pair{std::string(a), std::string(b)};
    return score_batch(std::span<const TextPair>(&pair, 1), scorer).front();
}

BestMatch best_match_from_scores(std::span<const ClaimSentence> claims, std::span<const FidelityScore> scores) {
    if (claims.empty()) throw PreconditionError("best_match needs at least one candidate claim");
    if (claims.size() != scores.size()) throw PreconditionError("one score per claim required");
    std::size_t best = 0;
    for (std::size_t i = 1; i < claims.size(); ++i) {
        const double v = scores[i].value();
        const double bv = scores[best].value();
        if (v > bv || (v == bv && claims[i].sentence_index < claims[best].sentence_index)) best = i;
    }
    return {claims[best].sentence_index, scores[best]};
}

BestMatch best_match(std::string_view citing, std::span<const ClaimSentence> claims, const Scorer& scorer) {
    if (claims.empty()) throw PreconditionError("best_match needs at least one candidate claim");
    std::vector<TextPair> pairs;
    pairs.reserve(claims.size());
    for (const auto& c : claims) pairs.push_back({std::string(citing), c.sentence_text});
    const auto scores = score_batch(pairs, scorer);
    return best_match_from_scores(claims, scores);
}

std::map<std::string, std::size_t> PairStats::as_counters() const {
    return {{"instances", instances},
            {"records", records},
            {"skipped_no_claims", skipped_no_claims},
            {"scored_pairs", scored_pairs}};
}

ClaimsByPaper group_claims(std::span<const ClaimSentence> claims) {
    ClaimsByPaper out;
    for (const auto& c : claims) out[c.paper_id].push_back(c);
    for (auto& [_, list] : out) {
        std::sort(list.begin(), list.end(),
                  [](const ClaimSentence& l, const ClaimSentence& r) { return l.sentence_index < r.sentence_index; });
    }
    return out;
}

std::vector<PairRecord> build_pair_records(std::span<const CitationInstance> instances,
                                           const ClaimsByPaper& claims_by_paper, const Scorer& scorer,
                                           const PairOptions& options, PairStats* stats) {
    if (options.batch_size == 0) throw PreconditionError("batch_size must be >= 1");

    struct Job {
        const CitationInstance* instance;
        const std::vector<ClaimSentence>* claims;
        std::size_t offset;  // first score slot
    };

    PairStats st;
    st.instances = instances.size();
    std::vector<Job> jobs;
    std::vector<TextPair> pairs;
    for (const auto& inst : instances) {
        auto it = claims_by_paper.find(inst.cited_paper_id);
        if (it == claims_by_paper.end() || it->second.empty()) {
            ++st.skipped_no_claims;
            continue;
        }
        jobs.push_back({&inst, &it->second, pairs.size()});
        for (const auto& c : it->second) pairs.push_back({inst.sentence_text, c.sentence_text});
    }
    st.scored_pairs = pairs.size();

    std::vector<FidelityScore> scores(pairs.size());
    const std::size_t n_batches = (pairs.size() + options.batch_size - 1) / options.batch_size;
    parallel_for(n_batches, options.workers, [&](std::size_t b) {
        const std::size_t begin = b * options.batch_size;
        const std::size_t len = std::min(options.batch_size, pairs.size() - begin);
        auto part = score_batch(std::span<const TextPair>(pairs).subspan(begin, len), scorer);
        std::copy(part.begin(), part.end(), scores.begin() + static_cast<std::ptrdiff_t>(begin));
    });

    const ScorerId sid = scorer.id();
    std::vector<PairRecord> records;
    records.reserve(jobs.size());
    for (const auto& job : jobs) {
        const auto& claims = *job.claims;
        const auto match = best_match_from_scores(
            claims, std::span<const FidelityScore>(scores).subspan(job.offset, claims.size()));
        records.push_back({job.instance->citing_paper_id, job.instance->sentence_index,
                           job.instance->cited_paper_id, match.matched_claim_index, match.fidelity,
                           claims.size(), sid});
    }
    std::sort(records.begin(), records.end(), [](const PairRecord& l, const PairRecord& r) {
        return std::tie(l.citing_paper_id, l.citing_sentence_index, l.cited_paper_id) <
               std::tie(r.citing_paper_id, r.citing_sentence_index, r.cited_paper_id);
    });
    st.records = records.size();
    if (stats) *stats = st;
    return records;
}

}  // namespace citefid
