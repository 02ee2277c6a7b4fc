#include "citefid/claims.hpp"

#include <algorithm>
#include <tuple>

#include "citefid/errors.hpp"
#include "citefid/parallel.hpp"
#include "citefid/text.hpp"

namespace citefid {

std::string_view to_string(DiscourseCategory c) noexcept {
    switch (c) {
        case DiscourseCategory::methods: return "methods";
        case DiscourseCategory::background: return "background";
        case DiscourseCategory::objective: return "objective";
        case DiscourseCategory::results: return "results";
        case DiscourseCategory::conclusions: return "conclusions";
    }
    return "background";
}

std::optional<DiscourseCategory> parse_discourse_category(std::string_view s) noexcept {
    for (auto c : kAllDiscourseCategories) {
        if (to_string(c) == s) return c;
    }
    return std::nullopt;
}

namespace {

struct CueSet {
    DiscourseCategory category;
    std::vector<std::string_view> phrases;
};

// Checked in this order; first hit wins.
const std::vector<CueSet>& cue_sets() {
    static const std::vector<CueSet> sets{
        {DiscourseCategory::conclusions,
         {"in conclusion", "we conclude", "these findings suggest", "these results suggest", "taken together",
          "in summary", "overall"}},
        {DiscourseCategory::results,
         {"we find", "we found", "we observed", "results show", "results indicate", "was associated with",
          "were associated with", "significantly"}},
        {DiscourseCategory::methods,
         {"we used", "recruited", "was measured", "were measured", "we collected", "were randomized",
          "we performed"}},
        {DiscourseCategory::objective, {"we aim", "the goal of", "the aim of", "we sought to", "this study aims"}},
    };
    return sets;
}

}  // namespace

DiscourseLabel BaselineDiscourseClassifier::classify_one(std::string_view sentence) {
    const std::string lowered = text::lower(sentence);
    for (const auto& set : cue_sets()) {
        for (auto phrase : set.phrases) {
            if (text::contains_phrase(lowered, phrase)) return {set.category, 1.0};
        }
    }
    return {DiscourseCategory::background, 1.0};
}

std::vector<DiscourseLabel> BaselineDiscourseClassifier::classify(std::span<const std::string> sentences) const {
    std::vector<DiscourseLabel> out;
    out.reserve(sentences.size());
    for (const auto& s : sentences) out.push_back(classify_one(s));
    return out;
}

std::vector<DiscourseLabel> classify_discourse(std::span<const std::string> sentences,
                                               const DiscourseClassifier& classifier) {
    if (sentences.empty()) return {};
    auto labels = classifier.classify(sentences);
    if (labels.size() != sentences.size()) {
        throw TransportError("discourse classifier returned " + std::to_string(labels.size()) +
                             " labels for " + std::to_string(sentences.size()) + " sentences");
    }
    return labels;
}

std::size_t ClaimStats::claims() const {
    std::size_t n = 0;
    for (const auto& [c, count] : by_category) {
        if (is_claim_category(c)) n += count;
    }
    return n;
}

ClaimStats& ClaimStats::operator+=(const ClaimStats& o) {
    sentences += o.sentences;
    for (const auto& [c, count] : o.by_category) by_category[c] += count;
    return *this;
}

std::map<std::string, std::size_t> ClaimStats::as_counters() const {
    std::map<std::string, std::size_t> out{{"sentences", sentences}, {"claims", claims()}};
    for (auto c : kAllDiscourseCategories) {
        auto it = by_category.find(c);
        out["category_" + std::string(to_string(c))] = it == by_category.end() ? 0 : it->second;
    }
    return out;
}

std::vector<ClaimSentence> select_corpus_claims(std::span<const Paper> papers,
                                                const DiscourseClassifier& classifier, unsigned workers,
                                                ClaimStats* stats) {
    // Flatten so remote classifiers see full batches rather than one call per paper.
    std::vector<std::pair<std::size_t, std::size_t>> where;
    std::vector<std::string> texts;
    for (std::size_t p = 0; p < papers.size(); ++p) {
        for (std::size_t s = 0; s < papers[p].body_sentences.size(); ++s) {
            where.emplace_back(p, s);
            texts.push_back(papers[p].body_sentences[s]);
        }
    }

    std::vector<DiscourseLabel> labels(texts.size());
    parallel_ranges(texts.size(), workers, [&](std::size_t begin, std::size_t end) {
        auto part = classify_discourse(std::span<const std::string>(texts).subspan(begin, end - begin), classifier);
        std::move(part.begin(), part.end(), labels.begin() + static_cast<std::ptrdiff_t>(begin));
    });

    ClaimStats total;
    std::vector<ClaimSentence> claims;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        ++total.sentences;
        ++total.by_category[labels[i].category];
        if (!is_claim_category(labels[i].category)) continue;
        const auto [p, s] = where[i];
        claims.push_back({papers[p].paper_id, s, std::move(texts[i]), labels[i].category, labels[i].confidence});
    }
    std::sort(claims.begin(), claims.end(), [](const ClaimSentence& l, const ClaimSentence& r) {
        return std::tie(l.paper_id, l.sentence_index) < std::tie(r.paper_id, r.sentence_index);
    });
    if (stats) *stats += total;
    return claims;
}

std::vector<ClaimSentence> select_claims(const Paper& paper, const DiscourseClassifier& classifier,
                                         ClaimStats* stats) {
    return select_corpus_claims(std::span<const Paper>(&paper, 1), classifier, 1, stats);
}

}  // namespace citefid
