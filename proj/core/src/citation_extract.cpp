#include "citefid/citation_extract.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <tuple>

#include "citefid/errors.hpp"
#include "citefid/parallel.hpp"
#include "citefid/text.hpp"

namespace citefid {
namespace {

constexpr std::array<std::string_view, 19> kReportingCues{
    "show",     "shown",       "showed",   "found",    "find",      "demonstrate", "demonstrated",
    "report",   "reported",    "reveal",   "revealed", "suggest",   "suggested",   "indicate",
    "indicated", "observe",    "observed", "estimate", "estimated"};

bool is_cue(std::string_view word) {
    auto match = [](std::string_view w) {
        return std::find(kReportingCues.begin(), kReportingCues.end(), w) != kReportingCues.end();
    };
    if (match(word)) return true;
    // Third person: "shows", "finds", "reports", ...
    return word.size() > 1 && word.back() == 's' && match(word.substr(0, word.size() - 1));
}

struct Candidate {
    std::size_t paper = 0;
    std::size_t sentence = 0;
    CitationMarker marker;
};

}  // namespace

bool BaselineBackgroundClassifier::has_reporting_cue(std::string_view sentence) {
    std::string word;
    auto flush = [&] {
        const bool hit = !word.empty() && is_cue(word);
        word.clear();
        return hit;
    };
    for (char c : sentence) {
        if (text::is_ascii_alpha(c)) {
            word.push_back(text::to_lower(c));
        } else if (flush()) {
            return true;
        }
    }
    return flush();
}

std::vector<BackgroundLabel> BaselineBackgroundClassifier::classify(std::span<const std::string> sentences) const {
    std::vector<BackgroundLabel> out;
    out.reserve(sentences.size());
    for (const auto& s : sentences) {
        const double confidence = has_reporting_cue(s) ? 1.0 : 0.0;
        out.push_back({confidence >= kClassifierThreshold, confidence});
    }
    return out;
}

std::vector<BackgroundLabel> classify_background(std::span<const std::string> sentences,
                                                 const BackgroundClassifier& classifier) {
    if (sentences.empty()) return {};
    auto labels = classifier.classify(sentences);
    if (labels.size() != sentences.size()) {
        throw TransportError("background classifier returned " + std::to_string(labels.size()) +
                             " labels for " + std::to_string(sentences.size()) + " sentences");
    }
    return labels;
}

ExtractStats& ExtractStats::operator+=(const ExtractStats& o) {
    sentences += o.sentences;
    instances += o.instances;
    no_marker += o.no_marker;
    multiple_markers += o.multiple_markers;
    non_terminal += o.non_terminal;
    multiple_keys += o.multiple_keys;
    not_background += o.not_background;
    unresolved_key += o.unresolved_key;
    return *this;
}

std::size_t ExtractStats::rejected() const {
    return no_marker + multiple_markers + non_terminal + multiple_keys + not_background + unresolved_key;
}

std::map<std::string, std::size_t> ExtractStats::as_counters() const {
    return {{"sentences", sentences},
            {"instances", instances},
            {"rejected_no_marker", no_marker},
            {"rejected_multiple_markers", multiple_markers},
            {"rejected_non_terminal", non_terminal},
            {"rejected_multiple_keys", multiple_keys},
            {"rejected_not_background", not_background},
            {"rejected_unresolved_key", unresolved_key}};
}

std::vector<CitationInstance> extract_corpus(std::span<const Paper> papers,
                                             const BackgroundClassifier& classifier, unsigned workers,
                                             ExtractStats* stats) {
    // Rule filter, per paper.
    std::vector<std::vector<Candidate>> per_paper(papers.size());
    std::vector<ExtractStats> rule_stats(papers.size());
    parallel_for(papers.size(), workers, [&](std::size_t p) {
        const Paper& paper = papers[p];
        ExtractStats& st = rule_stats[p];
        for (std::size_t s = 0; s < paper.body_sentences.size(); ++s) {
            ++st.sentences;
            auto check = check_single_source(paper.body_sentences[s]);
            switch (check.verdict) {
                case CandidateVerdict::accepted:
                    per_paper[p].push_back({p, s, std::move(*check.marker)});
                    break;
                case CandidateVerdict::no_marker: ++st.no_marker; break;
                case CandidateVerdict::multiple_markers: ++st.multiple_markers; break;
                case CandidateVerdict::non_terminal: ++st.non_terminal; break;
                case CandidateVerdict::multiple_keys: ++st.multiple_keys; break;
            }
        }
    });

    std::vector<Candidate> candidates;
    ExtractStats total;
    for (std::size_t p = 0; p < papers.size(); ++p) {
        total += rule_stats[p];
        for (auto& c : per_paper[p]) candidates.push_back(std::move(c));
    }

    // Background gate over all candidates at once.
    std::vector<std::string> texts;
    texts.reserve(candidates.size());
    for (const auto& c : candidates) texts.push_back(papers[c.paper].body_sentences[c.sentence]);
    std::vector<BackgroundLabel> labels(texts.size());
    parallel_ranges(texts.size(), workers, [&](std::size_t begin, std::size_t end) {
        auto part = classify_background(std::span<const std::string>(texts).subspan(begin, end - begin), classifier);
        std::move(part.begin(), part.end(), labels.begin() + static_cast<std::ptrdiff_t>(begin));
    });

    std::vector<CitationInstance> instances;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const Candidate& c = candidates[i];
        if (!labels[i].is_background) {
            ++total.not_background;
            continue;
        }
        const Paper& paper = papers[c.paper];
        const ReferenceEntry* ref = paper.find_reference(c.marker.keys.front());
        if (ref == nullptr || !ref->cited_paper_id) {
            ++total.unresolved_key;
            continue;
        }
        CitationInstance inst;
        inst.citing_paper_id = paper.paper_id;
        inst.sentence_index = c.sentence;
        inst.sentence_text = paper.body_sentences[c.sentence];
        inst.cited_paper_id = *ref->cited_paper_id;
        inst.marker = c.marker;
        inst.is_background = true;
        inst.background_confidence = labels[i].confidence;
        instances.push_back(std::move(inst));
        ++total.instances;
    }

    std::sort(instances.begin(), instances.end(), [](const CitationInstance& l, const CitationInstance& r) {
        return std::tie(l.citing_paper_id, l.sentence_index) < std::tie(r.citing_paper_id, r.sentence_index);
    });
    if (stats) *stats += total;
    return instances;
}

std::vector<CitationInstance> extract_reporting_citations(const Paper& paper,
                                                          const BackgroundClassifier& classifier,
                                                          ExtractStats* stats) {
    return extract_corpus(std::span<const Paper>(&paper, 1), classifier, 1, stats);
}

}  // namespace citefid
