#include <random>

#include <gtest/gtest.h>

#include "citefid/errors.hpp"
#include "citefid/graph.hpp"
#include "citefid/synthetic.hpp"
#include "citefid/telephone.hpp"
#include "random_graph.hpp"

namespace citefid {
namespace {

using test::World;

PairRecord rec(const std::string& citing, const std::string& cited, double f, std::size_t claim = 0,
               std::size_t sentence = 0) {
    return test::pair_record(citing, cited, f, claim, sentence);
}

TEST(Strata, Boundaries) {
    EXPECT_EQ(stratum_for(2.99), Stratum::low);
    EXPECT_EQ(stratum_for(3.0), Stratum::medium);
    EXPECT_EQ(stratum_for(4.0), Stratum::medium);
    EXPECT_EQ(stratum_for(4.5), Stratum::high);
    for (auto s : {Stratum::low, Stratum::medium, Stratum::high}) EXPECT_EQ(parse_stratum(to_string(s)), s);
    EXPECT_FALSE(parse_stratum("mid").has_value());
}

TEST(PairIndexTest, KeepsEarliestSentence) {
    const std::vector<PairRecord> r{rec("C", "A", 2.0, 0, 9), rec("C", "A", 4.0, 0, 3), rec("C", "B", 1.0)};
    const PairIndex idx(r);
    EXPECT_EQ(idx.size(), 2u);
    EXPECT_EQ(idx.find("C", "A")->citing_sentence_index, 3u);
    EXPECT_EQ(idx.find("A", "C"), nullptr);
}

TEST(Triples, SingleStructure) {
    World w;
    w.add("A", 2000, "F", {});
    w.add("B", 2001, "F", {"A"});
    w.add("C", 2002, "F", {"A", "B"});
    w.build();
    const std::vector<PairRecord> r{rec("B", "A", 4.5), rec("C", "A", 3.0)};
    TripleStats st;
    const auto t = find_intermediary_triples(w.graph, PairIndex(r), 1, &st);
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t[0].original_a, "A");
    EXPECT_EQ(t[0].intermediary_b, "B");
    EXPECT_EQ(t[0].treated_c, "C");
    EXPECT_EQ(t[0].b_fidelity_stratum, Stratum::high);
    EXPECT_EQ(st.structures, 1u);
}

TEST(Triples, MissingEdgeOrRecord) {
    World w;
    w.add("A", 2000, "F", {});
    w.add("B", 2001, "F", {});
    w.add("C", 2002, "F", {"A", "B"});
    w.build();
    const std::vector<PairRecord> r{rec("B", "A", 4.5), rec("C", "A", 3.0)};
    EXPECT_TRUE(find_intermediary_triples(w.graph, PairIndex(r)).empty());

    World v;
    v.add("A", 2000, "F", {});
    v.add("B", 2001, "F", {"A"});
    v.add("C", 2002, "F", {"A", "B"});
    v.build();
    const std::vector<PairRecord> only_c{rec("C", "A", 3.0)};
    TripleStats st;
    EXPECT_TRUE(find_intermediary_triples(v.graph, PairIndex(only_c), 1, &st).empty());
    EXPECT_EQ(st.structures, 1u);
    EXPECT_EQ(st.skipped_unscored, 1u);
}

TEST(Matching, ExactControlMatched) {
    World w;
    w.add("A", 2000, "F", {});
    w.add("B", 2001, "F", {"A"});
    w.add("C", 2005, "F", {"A", "B"});
    w.add("D", 2005, "F", {"A"});
    w.build();
    const std::vector<PairRecord> r{rec("B", "A", 4.5, 1), rec("C", "A", 3.0, 2), rec("D", "A", 3.2, 2)};
    const PairIndex idx(r);
    const auto t = find_intermediary_triples(w.graph, idx);
    MatchStats st;
    const auto m = match_controls(t, w.graph, idx, w.papers, 1, &st);
    ASSERT_EQ(m.size(), 1u);
    EXPECT_EQ(m[0].control_d, "D");
    EXPECT_TRUE(satisfies_matching_invariants(m[0], w.graph, w.papers));
    EXPECT_EQ(st.matched, 1u);
    EXPECT_EQ(st.unmatched, 0u);
}

TEST(Matching, FieldMismatchUnmatched) {
    World w;
    w.add("A", 2000, "F", {});
    w.add("B", 2001, "F", {"A"});
    w.add("C", 2005, "F", {"A", "B"});
    w.add("D", 2005, "G", {"A"});
    w.build();
    const std::vector<PairRecord> r{rec("B", "A", 4.5), rec("C", "A", 3.0), rec("D", "A", 3.2)};
    const PairIndex idx(r);
    MatchStats st;
    EXPECT_TRUE(match_controls(find_intermediary_triples(w.graph, idx), w.graph, idx, w.papers, 1, &st).empty());
    EXPECT_EQ(st.unmatched, 1u);
}

TEST(Matching, ImpureAndClaimMismatchedControlsRejected) {
    World w;
    w.add("A", 2000, "F", {});
    w.add("B", 2001, "F", {"A"});
    w.add("X", 2001, "F", {"A"});
    w.add("C", 2005, "F", {"A", "B"});
    w.add("D1", 2005, "F", {"A", "X"});  // cites a citer of A
    w.add("D2", 2005, "F", {"A"});       // different claim
    w.build();
    const std::vector<PairRecord> r{rec("B", "A", 4.5), rec("C", "A", 3.0, 1), rec("D1", "A", 3.2, 1),
                                    rec("D2", "A", 3.2, 2)};
    const PairIndex idx(r);
    EXPECT_TRUE(match_controls(find_intermediary_triples(w.graph, idx), w.graph, idx, w.papers).empty());
}

TEST(Triples, EqualBruteForceOnRandomGraphs) {
    for (std::uint32_t seed : {1u, 2u, 3u}) {
        const World w = test::random_world(seed, 100, 0.08);
        const auto o = test::oracle_inputs(w);
        const auto expected = oracle::triples(o.nodes, o.edges, o.scored);
        for (unsigned workers : {1u, 4u}) {
            const auto got = find_intermediary_triples(w.graph, PairIndex(w.records), workers);
            EXPECT_EQ(test::as_oracle(got), expected) << "seed " << seed;
        }
    }
}

TEST(Matching, EqualsGreedyOracleOnRandomGraphs) {
    for (std::uint32_t seed : {4u, 5u, 6u}) {
        const World w = test::random_world(seed, 150, 0.06);
        const auto o = test::oracle_inputs(w);
        const PairIndex idx(w.records);
        const auto triples = find_intermediary_triples(w.graph, idx);
        const auto expected =
            oracle::greedy_match(oracle::triples(o.nodes, o.edges, o.scored), o.nodes, o.edges, o.info, o.claim);
        ASSERT_FALSE(expected.empty()) << "seed " << seed;
        for (unsigned workers : {1u, 8u}) {
            const auto got = match_controls(triples, w.graph, idx, w.papers, workers);
            for (const auto& m : got) EXPECT_TRUE(satisfies_matching_invariants(m, w.graph, w.papers));
            EXPECT_EQ(test::as_oracle(got), expected) << "seed " << seed;
        }
    }
}

MatchedPair pair_with(double treated, double control, Stratum s = Stratum::medium) {
    MatchedPair m;
    m.triple.c_to_a = rec("C", "A", treated);
    m.triple.b_fidelity_stratum = s;
    m.d_to_a = rec("D", "A", control);
    return m;
}

TEST(Effect, SimpleDifferences) {
    std::vector<MatchedPair> ps(5, pair_with(3.0, 3.1));
    auto e = estimate_effect(ps);
    EXPECT_NEAR(e.difference, -0.1, 1e-12);
    EXPECT_NEAR(e.standard_error, 0.0, 1e-12);

    std::vector<MatchedPair> same(4, pair_with(2.5, 2.5));
    e = estimate_effect(same);
    EXPECT_EQ(e.difference, 0.0);
    EXPECT_EQ(e.standard_error, 0.0);

    std::vector<MatchedPair> mixed{pair_with(3.0, 2.0), pair_with(2.0, 2.0), pair_with(4.0, 3.0)};
    e = estimate_effect(mixed);
    // differences 1, 0, 1: mean 2/3, sd sqrt(1/3), se sqrt(1/9)
    EXPECT_NEAR(e.difference, 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(e.standard_error, 1.0 / 3.0, 1e-12);
    EXPECT_EQ(e.n_pairs, 3u);

    EXPECT_THROW(estimate_effect(std::span(mixed).first(1)), InsufficientDataError);
}

TEST(Effect, StrataAndTable) {
    std::vector<MatchedPair> ps{pair_with(2.0, 2.5, Stratum::low), pair_with(2.2, 2.4, Stratum::low),
                                pair_with(3.0, 3.0, Stratum::medium), pair_with(4.0, 3.9, Stratum::high),
                                pair_with(4.2, 4.0, Stratum::high)};
    const auto strata = stratify_by_intermediary_fidelity(ps);
    ASSERT_EQ(strata.size(), 3u);
    EXPECT_EQ(strata[0].n, 2u);
    EXPECT_NEAR(*strata[0].mean_treated_fidelity, 2.1, 1e-12);
    EXPECT_EQ(strata[1].n, 1u);
    EXPECT_FALSE(strata[1].effect.has_value());
    EXPECT_TRUE(strata[2].effect.has_value());
    const std::string table = effects_table(ps);
    EXPECT_NE(table.find("\nmedium\t1\tNA\tNA\tNA\tNA\n"), std::string::npos);
    EXPECT_EQ(table.substr(0, table.find('\n')), "group\tn\tmean_treatment\tmean_control\tdifference\tse");
    EXPECT_NE(table.find("\nlow\t2\t2.100000\t2.450000\t-0.350000\t"), std::string::npos);
}

TEST(Planted, RecoversEffectAndMonotoneStrata) {
    const auto ds = synthetic::generate_telephone_dataset({});
    const PairIndex idx(ds.records);
    const auto triples = find_intermediary_triples(ds.graph, idx, 4);
    MatchStats st;
    const auto matched = match_controls(triples, ds.graph, idx, ds.papers, 4, &st);
    ASSERT_GT(matched.size(), 1000u);
    for (const auto& m : matched) {
        ASSERT_TRUE(satisfies_matching_invariants(m, ds.graph, ds.papers));
        ASSERT_EQ(m.control_d[0], 'D');
    }
    const auto e = estimate_effect(matched);
    EXPECT_LE(std::abs(e.difference - (-0.06)), 2.0 * e.standard_error);
    const auto strata = stratify_by_intermediary_fidelity(matched);
    EXPECT_LT(*strata[0].mean_treated_fidelity, *strata[1].mean_treated_fidelity);
    EXPECT_LT(*strata[1].mean_treated_fidelity, *strata[2].mean_treated_fidelity);
}

}  // namespace
}  // namespace citefid
