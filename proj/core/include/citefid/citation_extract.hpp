#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "citefid/corpus.hpp"
#include "citefid/markers.hpp"
#include "citefid/model_id.hpp"

namespace citefid {

inline constexpr double kClassifierThreshold = 0.5;

struct BackgroundLabel {
    bool is_background = false;
    double confidence = 0.0;

    bool operator==(const BackgroundLabel&) const = default;
};

// Binary background-citation gate. Implementations must be callable from
// several threads at once.
class BackgroundClassifier {
public:
    virtual ~BackgroundClassifier() = default;
    virtual std::vector<BackgroundLabel> classify(std::span<const std::string> sentences) const = 0;
    virtual ModelId id() const = 0;
};

// Fires on reporting verbs (show, found, demonstrated, ...) matched as whole
// words, with an optional third-person "s". Confidence is 1 or 0.
class BaselineBackgroundClassifier final : public BackgroundClassifier {
public:
    std::vector<BackgroundLabel> classify(std::span<const std::string> sentences) const override;
    ModelId id() const override { return {"baseline-background-cues", "1"}; }

    static bool has_reporting_cue(std::string_view sentence);
};

std::vector<BackgroundLabel> classify_background(std::span<const std::string> sentences,
                                                 const BackgroundClassifier& classifier);

struct CitationInstance {
    PaperId citing_paper_id;
    std::size_t sentence_index = 0;
    std::string sentence_text;
    PaperId cited_paper_id;
    CitationMarker marker;
    bool is_background = true;
    double background_confidence = 0.0;

    bool operator==(const CitationInstance&) const = default;
};

// Why each body sentence did or did not become an instance. Every sentence
// lands in exactly one bucket.
struct ExtractStats {
    std::size_t sentences = 0;
    std::size_t instances = 0;
    std::size_t no_marker = 0;
    std::size_t multiple_markers = 0;
    std::size_t non_terminal = 0;
    std::size_t multiple_keys = 0;
    std::size_t not_background = 0;
    std::size_t unresolved_key = 0;  // key missing from bibliography or entry unresolved

    ExtractStats& operator+=(const ExtractStats& o);
    std::size_t rejected() const;
    std::map<std::string, std::size_t> as_counters() const;
};

std::vector<CitationInstance> extract_reporting_citations(const Paper& paper,
                                                          const BackgroundClassifier& classifier,
                                                          ExtractStats* stats = nullptr);

// Parallel over papers; output sorted by (citing_paper_id, sentence_index).
std::vector<CitationInstance> extract_corpus(std::span<const Paper> papers,
                                             const BackgroundClassifier& classifier,
                                             unsigned workers, ExtractStats* stats = nullptr);

}  // namespace citefid
