#include "citefid/graph.hpp"

#include <algorithm>
#include <set>

#include "citefid/parallel.hpp"

namespace citefid {
namespace {

const std::vector<PaperId>& empty_list() {
    static const std::vector<PaperId> empty;
    return empty;
}

void normalize(std::vector<PaperId>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

bool CitationGraph::has_edge(const PaperId& citing, const PaperId& cited) const {
    auto it = edges.find(citing);
    return it != edges.end() && std::binary_search(it->second.begin(), it->second.end(), cited);
}

const std::vector<PaperId>& CitationGraph::cited_by(const PaperId& cited) const {
    auto it = reverse.find(cited);
    return it == reverse.end() ? empty_list() : it->second;
}

const std::vector<PaperId>& CitationGraph::cites(const PaperId& citing) const {
    auto it = edges.find(citing);
    return it == edges.end() ? empty_list() : it->second;
}

std::size_t CitationGraph::edge_count() const {
    std::size_t n = 0;
    for (const auto& [_, targets] : edges) n += targets.size();
    return n;
}

std::map<PaperId, std::vector<PaperId>> transpose(const std::map<PaperId, std::vector<PaperId>>& edges) {
    std::map<PaperId, std::vector<PaperId>> out;
    for (const auto& [from, targets] : edges) {
        for (const auto& to : targets) out[to].push_back(from);
    }
    for (auto& [_, sources] : out) normalize(sources);
    return out;
}

CitationGraph build_citation_graph(std::span<const Paper> papers, unsigned workers, GraphStats* stats) {
    struct Partial {
        std::map<PaperId, std::vector<PaperId>> edges;
        GraphStats stats;
    };

    // Contiguous shards, merged in shard order afterwards.
    const std::size_t shards = std::max<std::size_t>(1, std::min<std::size_t>(workers, papers.size()));
    std::vector<Partial> partials(shards);
    parallel_for(shards, workers, [&](std::size_t s) {
        const std::size_t begin = papers.size() * s / shards;
        const std::size_t end = papers.size() * (s + 1) / shards;
        Partial& part = partials[s];
        for (std::size_t i = begin; i < end; ++i) {
            const Paper& p = papers[i];
            std::set<PaperId> targets;
            for (const auto& ref : p.references) {
                ++part.stats.references;
                if (!ref.cited_paper_id) {
                    ++part.stats.unresolved;
                } else if (*ref.cited_paper_id == p.paper_id) {
                    ++part.stats.self_loops;
                } else if (!targets.insert(*ref.cited_paper_id).second) {
                    ++part.stats.duplicates;
                }
            }
            auto& list = part.edges[p.paper_id];
            list.insert(list.end(), targets.begin(), targets.end());
        }
    });

    CitationGraph g;
    GraphStats total;
    for (auto& part : partials) {
        for (auto& [from, targets] : part.edges) {
            if (targets.empty()) continue;
            auto& list = g.edges[from];
            list.insert(list.end(), targets.begin(), targets.end());
        }
        total.references += part.stats.references;
        total.unresolved += part.stats.unresolved;
        total.self_loops += part.stats.self_loops;
        total.duplicates += part.stats.duplicates;
    }
    // The same citing id can only come from one record, but normalize anyway
    // in case callers pass unvalidated input.
    for (auto& [_, targets] : g.edges) normalize(targets);
    g.reverse = transpose(g.edges);

    std::set<PaperId> known;
    for (const auto& p : papers) known.insert(p.paper_id);
    for (const auto& [to, _] : g.reverse) {
        if (!known.contains(to)) total.external_targets += g.reverse.at(to).size();
    }
    if (stats) *stats = total;
    return g;
}

}  // namespace citefid
