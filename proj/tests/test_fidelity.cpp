#include <random>

#include <gtest/gtest.h>

#include "citefid/citation_extract.hpp"
#include "citefid/claims.hpp"
#include "citefid/errors.hpp"
#include "citefid/fidelity.hpp"
#include "citefid/synthetic.hpp"
#include "oracles.hpp"

namespace citefid {
namespace {

TEST(FidelityScore, RangeEnforced) {
    EXPECT_NO_THROW(FidelityScore(1.0));
    EXPECT_NO_THROW(FidelityScore(5.0));
    EXPECT_THROW(FidelityScore(0.999), PreconditionError);
    EXPECT_THROW(FidelityScore(5.0001), PreconditionError);
    EXPECT_THROW(FidelityScore(std::nan("")), PreconditionError);
}

TEST(Baseline, HandComputedExamples) {
    EXPECT_DOUBLE_EQ(BaselineScorer::score("same words here", "same words here").value(), 5.0);
    EXPECT_DOUBLE_EQ(BaselineScorer::score("alpha beta", "gamma delta").value(), 1.0);
    EXPECT_DOUBLE_EQ(BaselineScorer::score("alpha beta gamma", "alpha beta delta").value(), 3.0);
    EXPECT_DOUBLE_EQ(BaselineScorer::score("", "").value(), 5.0);
    EXPECT_DOUBLE_EQ(BaselineScorer::score("", "alpha").value(), 1.0);
    // Case and punctuation are ignored; single characters are not tokens.
    EXPECT_DOUBLE_EQ(BaselineScorer::score("Alpha, BETA!", "alpha beta a").value(), 5.0);
}

TEST(Baseline, BatchMatchesElementwise) {
    BaselineScorer s;
    const std::vector<TextPair> pairs{{"same words here", "same words here"},
                                      {"alpha beta", "gamma delta"},
                                      {"alpha beta gamma", "alpha beta delta"}};
    const auto out = score_batch(pairs, s);
    ASSERT_EQ(out.size(), 3u);
    EXPECT_DOUBLE_EQ(out[0].value(), 5.0);
    EXPECT_DOUBLE_EQ(out[1].value(), 1.0);
    EXPECT_DOUBLE_EQ(out[2].value(), 3.0);
    EXPECT_TRUE(score_batch({}, s).empty());
    EXPECT_DOUBLE_EQ(score_pair("alpha beta gamma", "alpha beta delta", s).value(), 3.0);
}

TEST(Baseline, BatchingInvariance) {
    std::mt19937 rng(1);
    const std::vector<std::string> vocab{"cell", "gene", "rate", "sleep", "mouse", "model", "trial", "dose"};
    auto sentence = [&] {
        std::string s;
        const int n = std::uniform_int_distribution<int>(0, 6)(rng);
        for (int i = 0; i < n; ++i) s += vocab[rng() % vocab.size()] + " ";
        return s;
    };
    std::vector<TextPair> pairs;
    for (int i = 0; i < 10000; ++i) pairs.push_back({sentence(), sentence()});
    BaselineScorer s;
    const auto whole = score_batch(pairs, s);
    std::vector<FidelityScore> pieces;
    for (std::size_t off = 0; off < pairs.size(); off += 1000) {
        const auto part = score_batch(std::span(pairs).subspan(off, 1000), s);
        pieces.insert(pieces.end(), part.begin(), part.end());
    }
    EXPECT_EQ(whole, pieces);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        EXPECT_DOUBLE_EQ(whole[i].value(), 1.0 + 4.0 * oracle::jaccard(pairs[i].a, pairs[i].b));
    }
}

std::vector<ClaimSentence> claims_with_text(const std::vector<std::string>& texts) {
    std::vector<ClaimSentence> out;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        out.push_back({"P", i * 2 + 1, texts[i], DiscourseCategory::results, 1.0});
    }
    return out;
}

TEST(BestMatch, PicksMaximum) {
    const auto claims = claims_with_text({"a", "b", "c"});
    const std::vector<FidelityScore> scores{FidelityScore(2.1), FidelityScore(4.0), FidelityScore(3.3)};
    const auto m = best_match_from_scores(claims, scores);
    EXPECT_EQ(m.matched_claim_index, 3u);
    EXPECT_DOUBLE_EQ(m.fidelity.value(), 4.0);
}

TEST(BestMatch, TieGoesToLowestSentenceIndex) {
    std::vector<ClaimSentence> claims{{"P", 9, "x", DiscourseCategory::results, 1.0},
                                      {"P", 4, "y", DiscourseCategory::results, 1.0},
                                      {"P", 6, "z", DiscourseCategory::results, 1.0}};
    const std::vector<FidelityScore> scores{FidelityScore(3.5), FidelityScore(3.5), FidelityScore(2.0)};
    EXPECT_EQ(best_match_from_scores(claims, scores).matched_claim_index, 4u);
}

TEST(BestMatch, EmptyOrMismatchedIsPrecondition) {
    EXPECT_THROW(best_match("x", {}, BaselineScorer{}), PreconditionError);
    const auto claims = claims_with_text({"a"});
    EXPECT_THROW(best_match_from_scores(claims, {}), PreconditionError);
}

TEST(BestMatch, EqualsBruteForceScan) {
    std::mt19937 rng(77);
    const std::vector<std::string> vocab{"cell", "gene", "rate", "sleep", "mouse", "model"};
    auto sentence = [&] {
        std::string s;
        for (int i = 0; i < 3; ++i) s += vocab[rng() % vocab.size()] + " ";
        return s;
    };
    BaselineScorer scorer;
    for (int trial = 0; trial < 50; ++trial) {
        const std::string citing = sentence();
        std::vector<std::string> texts;
        for (int i = 0; i < 100; ++i) texts.push_back(sentence());
        const auto claims = claims_with_text(texts);
        double best = -1.0;
        std::size_t best_idx = 0;
        for (const auto& c : claims) {
            const double v = 1.0 + 4.0 * oracle::jaccard(citing, c.sentence_text);
            if (v > best || (v == best && c.sentence_index < best_idx)) {
                best = v;
                best_idx = c.sentence_index;
            }
        }
        const auto m = best_match(citing, claims, scorer);
        EXPECT_EQ(m.matched_claim_index, best_idx);
        EXPECT_DOUBLE_EQ(m.fidelity.value(), best);
    }
}

CitationInstance instance(const std::string& citing, std::size_t idx, const std::string& cited, std::string text) {
    CitationInstance c;
    c.citing_paper_id = citing;
    c.sentence_index = idx;
    c.cited_paper_id = cited;
    c.sentence_text = std::move(text);
    return c;
}

TEST(Pairs, OneInstanceThreeClaims) {
    const std::vector<CitationInstance> inst{instance("C", 2, "P", "gene rate sleep [1].")};
    auto claims = claims_with_text({"gene rate", "sleep", "mouse"});
    PairStats st;
    const auto recs = build_pair_records(inst, group_claims(claims), BaselineScorer{}, {}, &st);
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_EQ(recs[0].n_candidates, 3u);
    EXPECT_EQ(recs[0].matched_claim_index, 1u);
    EXPECT_DOUBLE_EQ(recs[0].fidelity.value(), 1.0 + 4.0 * 2.0 / 3.0);
    EXPECT_EQ(recs[0].scorer, BaselineScorer{}.id());
    EXPECT_EQ(st.scored_pairs, 3u);
}

TEST(Pairs, NoClaimsIsSkippedAndCounted) {
    const std::vector<CitationInstance> inst{instance("C", 2, "P", "x [1]."), instance("C", 3, "Q", "y [2].")};
    const auto claims = claims_with_text({"x"});
    PairStats st;
    const auto recs = build_pair_records(inst, group_claims(claims), BaselineScorer{}, {}, &st);
    EXPECT_EQ(recs.size(), 1u);
    EXPECT_EQ(st.instances, 2u);
    EXPECT_EQ(st.skipped_no_claims, 1u);
    EXPECT_EQ(st.instances, st.records + st.skipped_no_claims);
}

TEST(Pairs, SyntheticCorpusMatchesBruteForce) {
    const auto papers = synthetic::generate_corpus({});
    const auto inst = extract_corpus(papers, BaselineBackgroundClassifier{}, 2);
    const auto claims = select_corpus_claims(papers, BaselineDiscourseClassifier{}, 2);
    std::map<PaperId, std::vector<const ClaimSentence*>> by_paper;
    for (const auto& c : claims) by_paper[c.paper_id].push_back(&c);

    std::size_t expected = 0;
    std::map<std::pair<PaperId, std::size_t>, double> expected_scores;
    for (const auto& i : inst) {
        auto it = by_paper.find(i.cited_paper_id);
        if (it == by_paper.end()) continue;
        ++expected;
        double best = 0.0;
        for (const auto* c : it->second) best = std::max(best, 1.0 + 4.0 * oracle::jaccard(i.sentence_text, c->sentence_text));
        expected_scores[{i.citing_paper_id, i.sentence_index}] = best;
    }
    for (unsigned w : {1u, 4u}) {
        for (std::size_t batch : {1u, 7u, 256u}) {
            PairStats st;
            const auto recs = build_pair_records(inst, group_claims(claims), BaselineScorer{}, {w, batch}, &st);
            ASSERT_EQ(recs.size(), expected);
            for (const auto& r : recs) {
                EXPECT_DOUBLE_EQ(r.fidelity.value(), (expected_scores[{r.citing_paper_id, r.citing_sentence_index}]));
            }
        }
    }
}

class ShortScorer final : public Scorer {
public:
    std::vector<FidelityScore> score_batch(std::span<const TextPair> p) const override {
        return std::vector<FidelityScore>(p.size() > 0 ? p.size() - 1 : 0);
    }
    ScorerId id() const override { return {"short", "0"}; }
};

TEST(Pairs, ScorerLengthMismatchIsTransportError) {
    const std::vector<TextPair> pairs{{"a", "b"}, {"c", "d"}};
    EXPECT_THROW(score_batch(pairs, ShortScorer{}), TransportError);
}

}  // namespace
}  // namespace citefid
