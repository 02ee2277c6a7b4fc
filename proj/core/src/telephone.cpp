#include "citefid/telephone.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "citefid/errors.hpp"
#include "citefid/parallel.hpp"

namespace citefid {

std::string_view to_string(Stratum s) noexcept {
    switch (s) {
        case Stratum::low: return "low";
        case Stratum::medium: return "medium";
        case Stratum::high: return "high";
    }
    return "medium";
}

std::optional<Stratum> parse_stratum(std::string_view s) noexcept {
    if (s == "low") return Stratum::low;
    if (s == "medium") return Stratum::medium;
    if (s == "high") return Stratum::high;
    return std::nullopt;
}

Stratum stratum_for(double intermediary_fidelity) noexcept {
    if (intermediary_fidelity > 4.0) return Stratum::high;
    if (intermediary_fidelity < 3.0) return Stratum::low;
    return Stratum::medium;
}

PairIndex::PairIndex(std::span<const PairRecord> records) {
    for (const auto& r : records) {
        auto [it, inserted] = by_pair_.try_emplace({r.citing_paper_id, r.cited_paper_id}, r);
        if (!inserted && r.citing_sentence_index < it->second.citing_sentence_index) it->second = r;
    }
}

const PairRecord* PairIndex::find(const PaperId& citing, const PaperId& cited) const {
    auto it = by_pair_.find({citing, cited});
    return it == by_pair_.end() ? nullptr : &it->second;
}

std::vector<TelephoneTriple> find_intermediary_triples(const CitationGraph& graph, const PairIndex& pairs,
                                                       unsigned workers, TripleStats* stats) {
    std::vector<const PaperId*> originals;
    for (const auto& [a, _] : graph.reverse) originals.push_back(&a);

    std::vector<std::vector<TelephoneTriple>> per_a(originals.size());
    std::vector<TripleStats> per_stats(originals.size());
    parallel_for(originals.size(), workers, [&](std::size_t i) {
        const PaperId& a = *originals[i];
        const auto& citers = graph.cited_by(a);
        for (const auto& b : citers) {
            for (const auto& c : citers) {
                if (b == c || !graph.has_edge(c, b)) continue;
                ++per_stats[i].structures;
                const PairRecord* c_to_a = pairs.find(c, a);
                const PairRecord* b_to_a = pairs.find(b, a);
                if (!c_to_a || !b_to_a) {
                    ++per_stats[i].skipped_unscored;
                    continue;
                }
                per_a[i].push_back({a, b, c, *c_to_a, *b_to_a, stratum_for(b_to_a->fidelity.value())});
                ++per_stats[i].triples;
            }
        }
    });

    std::vector<TelephoneTriple> out;
    TripleStats total;
    for (std::size_t i = 0; i < per_a.size(); ++i) {
        total.structures += per_stats[i].structures;
        total.triples += per_stats[i].triples;
        total.skipped_unscored += per_stats[i].skipped_unscored;
        for (auto& t : per_a[i]) out.push_back(std::move(t));
    }
    if (stats) *stats = total;
    return out;
}

namespace {

// D cites nothing that itself cites A.
bool is_pure_control(const CitationGraph& graph, const PaperId& d, const PaperId& a) {
    const auto& citers_of_a = graph.cited_by(a);
    for (const auto& target : graph.cites(d)) {
        if (std::binary_search(citers_of_a.begin(), citers_of_a.end(), target)) return false;
    }
    return true;
}

}  // namespace

std::vector<MatchedPair> match_controls(std::span<const TelephoneTriple> triples, const CitationGraph& graph,
                                        const PairIndex& candidates, const std::map<PaperId, Paper>& papers,
                                        unsigned workers, MatchStats* stats) {
    // Contiguous groups of triples sharing an original.
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    for (std::size_t i = 0; i < triples.size();) {
        std::size_t j = i;
        while (j < triples.size() && triples[j].original_a == triples[i].original_a) ++j;
        groups.emplace_back(i, j);
        i = j;
    }

    std::vector<std::vector<MatchedPair>> per_group(groups.size());
    parallel_for(groups.size(), workers, [&](std::size_t g) {
        const auto [begin, end] = groups[g];
        const PaperId& a = triples[begin].original_a;

        std::set<PaperId> treated;
        for (std::size_t t = begin; t < end; ++t) treated.insert(triples[t].treated_c);

        struct Pool {
            const PaperId* id;
            const Paper* paper;
            const PairRecord* record;
        };
        std::vector<Pool> pool;
        for (const auto& d : graph.cited_by(a)) {
            if (treated.contains(d)) continue;
            const PairRecord* rec = candidates.find(d, a);
            auto pit = papers.find(d);
            if (!rec || pit == papers.end() || !is_pure_control(graph, d, a)) continue;
            pool.push_back({&d, &pit->second, rec});
        }

        std::vector<bool> used(pool.size(), false);
        for (std::size_t t = begin; t < end; ++t) {
            const TelephoneTriple& triple = triples[t];
            auto cit = papers.find(triple.treated_c);
            if (cit == papers.end()) continue;
            const Paper& c = cit->second;
            for (std::size_t k = 0; k < pool.size(); ++k) {
                if (used[k]) continue;
                const Pool& cand = pool[k];
                if (cand.paper->year != c.year || cand.paper->field != c.field) continue;
                if (cand.record->matched_claim_index != triple.c_to_a.matched_claim_index) continue;
                used[k] = true;
                per_group[g].push_back({triple, *cand.id, *cand.record});
                break;
            }
        }
    });

    std::vector<MatchedPair> out;
    for (auto& g : per_group) {
        for (auto& m : g) out.push_back(std::move(m));
    }
    if (stats) {
        stats->triples = triples.size();
        stats->matched = out.size();
        stats->unmatched = triples.size() - out.size();
    }
    return out;
}

bool satisfies_matching_invariants(const MatchedPair& pair, const CitationGraph& graph,
                                   const std::map<PaperId, Paper>& papers) {
    const auto& t = pair.triple;
    const PaperId& a = t.original_a;
    const PaperId& d = pair.control_d;
    if (!graph.has_edge(t.treated_c, a) || !graph.has_edge(t.treated_c, t.intermediary_b) ||
        !graph.has_edge(t.intermediary_b, a)) {
        return false;
    }
    if (!graph.has_edge(d, a) || d == t.treated_c) return false;
    if (pair.d_to_a.citing_paper_id != d || pair.d_to_a.cited_paper_id != a) return false;
    for (const auto& target : graph.cites(d)) {
        if (graph.has_edge(target, a)) return false;
    }
    auto c = papers.find(t.treated_c);
    auto dp = papers.find(d);
    if (c == papers.end() || dp == papers.end()) return false;
    if (c->second.year != dp->second.year || c->second.field != dp->second.field) return false;
    return t.c_to_a.matched_claim_index == pair.d_to_a.matched_claim_index;
}

EffectEstimate estimate_effect(std::span<const MatchedPair> pairs) {
    if (pairs.size() < 2) {
        throw InsufficientDataError("effect estimate needs at least 2 matched pairs, have " +
                                    std::to_string(pairs.size()));
    }
    const auto n = static_cast<double>(pairs.size());
    double sum_t = 0.0;
    double sum_c = 0.0;
    for (const auto& p : pairs) {
        sum_t += p.triple.c_to_a.fidelity.value();
        sum_c += p.d_to_a.fidelity.value();
    }
    EffectEstimate e;
    e.n_pairs = pairs.size();
    e.mean_treatment = sum_t / n;
    e.mean_control = sum_c / n;
    e.difference = e.mean_treatment - e.mean_control;
    double ss = 0.0;
    for (const auto& p : pairs) {
        const double d = (p.triple.c_to_a.fidelity.value() - p.d_to_a.fidelity.value()) - e.difference;
        ss += d * d;
    }
    e.standard_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    return e;
}

std::vector<StratumSummary> stratify_by_intermediary_fidelity(std::span<const MatchedPair> pairs) {
    std::vector<StratumSummary> out;
    for (auto s : {Stratum::low, Stratum::medium, Stratum::high}) {
        std::vector<MatchedPair> members;
        for (const auto& p : pairs) {
            if (p.triple.b_fidelity_stratum == s) members.push_back(p);
        }
        StratumSummary summary;
        summary.stratum = s;
        summary.n = members.size();
        if (!members.empty()) {
            double sum = 0.0;
            for (const auto& m : members) sum += m.triple.c_to_a.fidelity.value();
            summary.mean_treated_fidelity = sum / static_cast<double>(members.size());
        }
        if (members.size() >= 2) summary.effect = estimate_effect(members);
        out.push_back(std::move(summary));
    }
    return out;
}

std::string effects_table(std::span<const MatchedPair> pairs) {
    std::string out = "group\tn\tmean_treatment\tmean_control\tdifference\tse\n";
    auto row = [&](std::string_view name, std::size_t n, const std::optional<EffectEstimate>& e) {
        if (e) {
            out += fmt::format("{}\t{}\t{:.6f}\t{:.6f}\t{:.6f}\t{:.6f}\n", name, n, e->mean_treatment, e->mean_control,
                               e->difference, e->standard_error);
        } else {
            out += fmt::format("{}\t{}\tNA\tNA\tNA\tNA\n", name, n);
        }
    };
    row("overall", pairs.size(), pairs.size() >= 2 ? std::optional(estimate_effect(pairs)) : std::nullopt);
    for (const auto& s : stratify_by_intermediary_fidelity(pairs)) row(to_string(s.stratum), s.n, s.effect);
    return out;
}

}  // namespace citefid
