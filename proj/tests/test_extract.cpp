#include <gtest/gtest.h>

#include "citefid/citation_extract.hpp"
#include "citefid/corpus.hpp"
#include "citefid/errors.hpp"
#include "citefid/markers.hpp"
#include "citefid/synthetic.hpp"
#include "test_util.hpp"

namespace citefid {
namespace {

const std::string kRow1 =
    "Past work has shown that active contributors in r/science are largely already involved in scientific "
    "activity [17].";
const std::string kRow2 =
    "Existing studies in NLP to help automate the study have examined exaggeration [17], certainty [18], and "
    "fact checking [19], among others.";
const std::string kRow3 = "We use GROBID [12], a more commonly used and actively developed tool.";
const std::string kRow4 = "The finding was in accordance with former studies (Lee et al. 2020).";

TEST(Markers, NumericTerminal) {
    const auto ms = parse_markers(kRow1);
    ASSERT_EQ(ms.size(), 1u);
    EXPECT_EQ(ms[0].style, MarkerStyle::numeric_bracket);
    EXPECT_EQ(ms[0].keys, (std::vector<std::string>{"17"}));
    EXPECT_EQ(kRow1.substr(ms[0].start, ms[0].end - ms[0].start), "[17]");
    EXPECT_TRUE(is_terminal(kRow1, ms[0].end));
}

TEST(Markers, ThreeMarkers) { EXPECT_EQ(parse_markers(kRow2).size(), 3u); }

TEST(Markers, AuthorYearComma) {
    const std::string s = "Load rises with task switching or cognitive load (Specht, 2019).";
    const auto ms = parse_markers(s);
    ASSERT_EQ(ms.size(), 1u);
    EXPECT_EQ(ms[0].style, MarkerStyle::author_year_paren);
    EXPECT_EQ(ms[0].keys, (std::vector<std::string>{"Specht 2019"}));
    EXPECT_TRUE(is_terminal(s, ms[0].end));
}

TEST(Markers, AuthorYearEtAlAndGroups) {
    auto ms = parse_markers(kRow4);
    ASSERT_EQ(ms.size(), 1u);
    EXPECT_EQ(ms[0].keys, (std::vector<std::string>{"Lee 2020"}));
    ms = parse_markers("Shown twice (Lee, 2020; Park and Kim, 2019b).");
    ASSERT_EQ(ms.size(), 1u);
    EXPECT_EQ(ms[0].keys, (std::vector<std::string>{"Lee 2020", "Park 2019b"}));
}

TEST(Markers, RangesAndLists) {
    auto keys = [](const std::string& s) { return parse_markers(s).at(0).keys; };
    EXPECT_EQ(keys("[1-3]"), (std::vector<std::string>{"1", "2", "3"}));
    EXPECT_EQ(keys("[2, 5]"), (std::vector<std::string>{"2", "5"}));
    EXPECT_EQ(keys("[4\xE2\x80\x93" "6]"), (std::vector<std::string>{"4", "5", "6"}));  // en dash
}

TEST(Markers, NonMarkersIgnored) {
    EXPECT_TRUE(parse_markers("An interval [a, b] and (see above) and (n = 12).").empty());
    EXPECT_TRUE(parse_markers("Reversed range [9-3].").empty());
    EXPECT_TRUE(parse_markers("Unclosed [12 bracket.").empty());
    EXPECT_TRUE(parse_markers("").empty());
}

TEST(Markers, Terminality) {
    const std::string mid = kRow3;
    const auto ms = parse_markers(mid);
    ASSERT_EQ(ms.size(), 1u);
    EXPECT_FALSE(is_terminal(mid, ms[0].end));
    EXPECT_TRUE(is_terminal("x [1]", 5));
    EXPECT_TRUE(is_terminal("x [1] .", 5));
    EXPECT_TRUE(is_terminal("x [1]\xE2\x80\x9D.", 5));  // closing curly quote
}

TEST(Candidate, Verdicts) {
    EXPECT_EQ(check_single_source(kRow1).verdict, CandidateVerdict::accepted);
    EXPECT_TRUE(is_single_source_reporting_candidate(kRow1).has_value());
    EXPECT_EQ(check_single_source(kRow2).verdict, CandidateVerdict::multiple_markers);
    EXPECT_EQ(check_single_source(kRow3).verdict, CandidateVerdict::non_terminal);
    EXPECT_FALSE(is_single_source_reporting_candidate(kRow3).has_value());
    EXPECT_EQ(check_single_source("Both work [17] [18].").verdict, CandidateVerdict::multiple_markers);
    EXPECT_EQ(check_single_source("Grouped result [3, 4].").verdict, CandidateVerdict::multiple_keys);
    EXPECT_EQ(check_single_source("No citation here.").verdict, CandidateVerdict::no_marker);
}

TEST(Background, BaselineCues) {
    BaselineBackgroundClassifier clf;
    const std::vector<std::string> s{kRow1, kRow4, "It was found to work [1].", "He finds it [2].",
                                     "The finding holds [3]."};
    const auto labels = classify_background(s, clf);
    ASSERT_EQ(labels.size(), 5u);
    EXPECT_TRUE(labels[0].is_background);
    EXPECT_GE(labels[0].confidence, kClassifierThreshold);
    EXPECT_FALSE(labels[1].is_background);
    EXPECT_LT(labels[1].confidence, kClassifierThreshold);
    EXPECT_TRUE(labels[2].is_background);
    EXPECT_TRUE(labels[3].is_background);
    EXPECT_FALSE(labels[4].is_background);
    EXPECT_TRUE(classify_background({}, clf).empty());
}

class WrongLength final : public BackgroundClassifier {
public:
    std::vector<BackgroundLabel> classify(std::span<const std::string>) const override { return {}; }
    ModelId id() const override { return {"bad", "0"}; }
};

TEST(Background, LengthMismatchIsTransportError) {
    const std::vector<std::string> s{"a"};
    EXPECT_THROW(classify_background(s, WrongLength{}), TransportError);
}

Paper fixture_paper() {
    return load_corpus(test::fixture("four_sentence_paper.jsonl"), {}).at(0);
}

TEST(Extract, FourSentenceFixture) {
    ExtractStats st;
    const auto out = extract_reporting_citations(fixture_paper(), BaselineBackgroundClassifier{}, &st);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].sentence_index, 0u);
    EXPECT_EQ(out[0].cited_paper_id, "P17");
    EXPECT_EQ(out[0].citing_paper_id, "F4");
    EXPECT_TRUE(out[0].is_background);
    EXPECT_EQ(st.sentences, 4u);
    EXPECT_EQ(st.instances, 1u);
    EXPECT_EQ(st.multiple_markers, 1u);
    EXPECT_EQ(st.non_terminal, 1u);
    EXPECT_EQ(st.not_background, 1u);
    EXPECT_EQ(st.rejected(), 3u);
}

TEST(Extract, HandLabeledMix) {
    Paper p;
    p.paper_id = "H";
    p.body_sentences = {"Earlier trials showed that dosing matters [1].", "Two groups reported it [1], [2].",
                        "We use Stan [2], which is fast.", "Prior surveys found a decline [3].",
                        "Others reported the same [9].", "No citation at all."};
    p.references = {{"1", "Q1"}, {"2", "Q2"}, {"3", std::nullopt}};
    ExtractStats st;
    const auto out = extract_reporting_citations(p, BaselineBackgroundClassifier{}, &st);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].cited_paper_id, "Q1");
    EXPECT_EQ(st.unresolved_key, 2u);  // null entry and missing key
    EXPECT_EQ(st.no_marker, 1u);
    EXPECT_EQ(st.sentences, st.instances + st.rejected());
}

TEST(Extract, ZeroCitations) {
    Paper p;
    p.paper_id = "Z";
    p.body_sentences = {"Plain.", "Text."};
    EXPECT_TRUE(extract_reporting_citations(p, BaselineBackgroundClassifier{}).empty());
}

TEST(Extract, InvariantsAndWorkerIndependence) {
    const auto papers = synthetic::generate_corpus({.n_papers = 80, .seed = 11});
    ExtractStats base_stats;
    const auto base = extract_corpus(papers, BaselineBackgroundClassifier{}, 1, &base_stats);
    ASSERT_FALSE(base.empty());
    EXPECT_EQ(base_stats.sentences, base_stats.instances + base_stats.rejected());
    for (const auto& c : base) {
        const auto ms = parse_markers(c.sentence_text);
        ASSERT_EQ(ms.size(), 1u);
        EXPECT_TRUE(is_terminal(c.sentence_text, ms[0].end));
        EXPECT_EQ(ms[0].keys.size(), 1u);
        EXPECT_TRUE(c.is_background);
        EXPECT_EQ(c.marker, ms[0]);
    }
    for (unsigned w : {2u, 7u}) {
        ExtractStats st;
        EXPECT_EQ(extract_corpus(papers, BaselineBackgroundClassifier{}, w, &st), base);
        EXPECT_EQ(st.as_counters(), base_stats.as_counters());
    }
}

}  // namespace
}  // namespace citefid
