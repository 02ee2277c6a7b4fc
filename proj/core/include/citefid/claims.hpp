#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "citefid/corpus.hpp"
#include "citefid/model_id.hpp"

namespace citefid {

enum class DiscourseCategory { methods, background, objective, results, conclusions };

inline constexpr std::array kAllDiscourseCategories{
    DiscourseCategory::methods, DiscourseCategory::background, DiscourseCategory::objective,
    DiscourseCategory::results, DiscourseCategory::conclusions};

std::string_view to_string(DiscourseCategory c) noexcept;
std::optional<DiscourseCategory> parse_discourse_category(std::string_view s) noexcept;

constexpr bool is_claim_category(DiscourseCategory c) noexcept {
    return c == DiscourseCategory::results || c == DiscourseCategory::conclusions;
}

struct DiscourseLabel {
    DiscourseCategory category = DiscourseCategory::background;
    double confidence = 0.0;

    bool operator==(const DiscourseLabel&) const = default;
};

class DiscourseClassifier {
public:
    virtual ~DiscourseClassifier() = default;
    virtual std::vector<DiscourseLabel> classify(std::span<const std::string> sentences) const = 0;
    virtual ModelId id() const = 0;
};

// Phrase lexicons checked in the order conclusions, results, methods,
// objective; anything unmatched is background. Phrases match on word
// boundaries, case-insensitively.
class BaselineDiscourseClassifier final : public DiscourseClassifier {
public:
    std::vector<DiscourseLabel> classify(std::span<const std::string> sentences) const override;
    ModelId id() const override { return {"baseline-discourse-cues", "1"}; }

    static DiscourseLabel classify_one(std::string_view sentence);
};

std::vector<DiscourseLabel> classify_discourse(std::span<const std::string> sentences,
                                               const DiscourseClassifier& classifier);

struct ClaimSentence {
    PaperId paper_id;
    std::size_t sentence_index = 0;
    std::string sentence_text;
    DiscourseCategory category = DiscourseCategory::results;
    double confidence = 0.0;

    bool operator==(const ClaimSentence&) const = default;
};

struct ClaimStats {
    std::size_t sentences = 0;
    std::map<DiscourseCategory, std::size_t> by_category;

    std::size_t claims() const;
    ClaimStats& operator+=(const ClaimStats& o);
    std::map<std::string, std::size_t> as_counters() const;
};

std::vector<ClaimSentence> select_claims(const Paper& paper, const DiscourseClassifier& classifier,
                                         ClaimStats* stats = nullptr);

// Parallel over papers; output sorted by (paper_id, sentence_index).
std::vector<ClaimSentence> select_corpus_claims(std::span<const Paper> papers,
                                                const DiscourseClassifier& classifier,
                                                unsigned workers, ClaimStats* stats = nullptr);

}  // namespace citefid
