#include <benchmark/benchmark.h>

#include "citefid/analysis.hpp"
#include "citefid/citation_extract.hpp"
#include "citefid/claims.hpp"
#include "citefid/fidelity.hpp"
#include "citefid/markers.hpp"
#include "citefid/segment.hpp"
#include "citefid/synthetic.hpp"
#include "citefid/telephone.hpp"

namespace {

using namespace citefid;

const std::vector<Paper>& corpus() {
    static const auto papers = [] {
        synthetic::CorpusOptions o;
        o.n_papers = 400;
        return synthetic::generate_corpus(o);
    }();
    return papers;
}

std::string joined_body() {
    std::string s;
    for (const auto& p : corpus()) {
        for (const auto& sentence : p.body_sentences) s += sentence + " ";
    }
    return s;
}

void BM_Segment(benchmark::State& state) {
    const std::string body = joined_body();
    for (auto _ : state) benchmark::DoNotOptimize(segment_sentences(body));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * body.size()));
}
BENCHMARK(BM_Segment);

void BM_ParseMarkers(benchmark::State& state) {
    std::vector<std::string> sentences;
    for (const auto& p : corpus()) sentences.insert(sentences.end(), p.body_sentences.begin(), p.body_sentences.end());
    for (auto _ : state) {
        for (const auto& s : sentences) benchmark::DoNotOptimize(check_single_source(s));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * sentences.size()));
}
BENCHMARK(BM_ParseMarkers);

void BM_BaselineScore(benchmark::State& state) {
    std::vector<TextPair> pairs;
    const auto& papers = corpus();
    for (std::size_t i = 0; i + 1 < papers.size(); ++i) {
        pairs.push_back({papers[i].body_sentences.front(), papers[i + 1].body_sentences.back()});
    }
    const BaselineScorer scorer;
    for (auto _ : state) benchmark::DoNotOptimize(scorer.score_batch(pairs));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * pairs.size()));
}
BENCHMARK(BM_BaselineScore);

void BM_BuildPairs(benchmark::State& state) {
    const auto workers = static_cast<unsigned>(state.range(0));
    const auto instances = extract_corpus(corpus(), BaselineBackgroundClassifier{}, workers);
    const auto claims = select_corpus_claims(corpus(), BaselineDiscourseClassifier{}, workers);
    const auto grouped = group_claims(claims);
    const BaselineScorer scorer;
    for (auto _ : state) benchmark::DoNotOptimize(build_pair_records(instances, grouped, scorer, {workers, 256}));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * instances.size()));
}
BENCHMARK(BM_BuildPairs)->Arg(1)->Arg(4)->UseRealTime();

void BM_Ols(benchmark::State& state) {
    const auto planted = synthetic::generate_feature_rows(static_cast<std::size_t>(state.range(0)), 0.5, 1);
    const auto m = encode_design_matrix(planted.rows, planted.spec);
    for (auto _ : state) benchmark::DoNotOptimize(fit_ols(m));
}
BENCHMARK(BM_Ols)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_TelephoneMatch(benchmark::State& state) {
    const auto ds = synthetic::generate_telephone_dataset({});
    const PairIndex idx(ds.records);
    const auto triples = find_intermediary_triples(ds.graph, idx);
    for (auto _ : state) benchmark::DoNotOptimize(match_controls(triples, ds.graph, idx, ds.papers));
}
BENCHMARK(BM_TelephoneMatch)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
