#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "citefid/corpus.hpp"

namespace citefid {

// Directed "cites" relation between documents. Adjacency lists are sorted and
// deduplicated; `reverse` is the exact transpose of `edges`.
struct CitationGraph {
    std::map<PaperId, std::vector<PaperId>> edges;
    std::map<PaperId, std::vector<PaperId>> reverse;

    bool has_edge(const PaperId& citing, const PaperId& cited) const;
    const std::vector<PaperId>& cited_by(const PaperId& cited) const;
    const std::vector<PaperId>& cites(const PaperId& citing) const;
    std::size_t edge_count() const;
};

struct GraphStats {
    std::size_t references = 0;
    std::size_t unresolved = 0;       // no cited_paper_id
    std::size_t self_loops = 0;       // paper citing itself, dropped
    std::size_t duplicates = 0;       // repeated (citing, cited) pair, merged
    std::size_t external_targets = 0; // edges to papers not in the input
};

CitationGraph build_citation_graph(std::span<const Paper> papers, unsigned workers = 1,
                                   GraphStats* stats = nullptr);

// Recomputes the transpose of `edges` in the same normalized form.
std::map<PaperId, std::vector<PaperId>> transpose(const std::map<PaperId, std::vector<PaperId>>& edges);

}  // namespace citefid
