// Acceptance checks. Each criterion prints one PASS or FAIL line with its
// measured quantity and wall time; the exit status is nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "citefid/analysis.hpp"
#include "citefid/citation_extract.hpp"
#include "citefid/corpus.hpp"
#include "citefid/errors.hpp"
#include "citefid/fidelity.hpp"
#include "citefid/pipeline.hpp"
#include "citefid/records.hpp"
#include "citefid/synthetic.hpp"
#include "citefid/telephone.hpp"
#include "oracles.hpp"
#include "random_graph.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace citefid;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

int failures = 0;

void criterion(const std::string& name, double limit_seconds, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.ok = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.ok && secs > limit_seconds) {
        o.ok = false;
        o.detail = fmt::format("took {:.2f}s, limit {:.0f}s", secs, limit_seconds);
    }
    if (!o.ok) ++failures;
    std::cout << (o.ok ? "PASS " : "FAIL ") << name << fmt::format(" [{:.3f}s]", secs);
    if (!o.detail.empty()) std::cout << " " << o.detail;
    std::cout << std::endl;
}

std::string random_sentence(std::mt19937_64& rng, int vocab, int max_words) {
    std::uniform_int_distribution<int> len(0, max_words);
    std::uniform_int_distribution<int> word(0, vocab - 1);
    std::string s;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) {
        if (i) s += (rng() % 5 == 0) ? ", " : " ";
        std::string w = "w" + std::to_string(word(rng));
        if (rng() % 4 == 0) w[0] = 'W';
        s += w;
    }
    return s;
}

Outcome four_sentence_extraction() {
    Outcome o;
    const auto papers = load_corpus(test::fixture("four_sentence_paper.jsonl"), {});
    o.require(papers.size() == 1, "fixture did not load");
    ExtractStats st;
    const auto out = extract_reporting_citations(papers.at(0), BaselineBackgroundClassifier{}, &st);
    o.require(out.size() == 1, fmt::format("{} instances", out.size()));
    if (out.size() == 1) {
        o.require(out[0].sentence_index == 0 && out[0].cited_paper_id == "P17", "instance is not row 1 citing P17");
    }
    o.require(st.multiple_markers == 1 && st.non_terminal == 1 && st.not_background == 1 && st.rejected() == 3,
              "rejection reasons differ");
    if (o.ok) {
        o.detail = fmt::format("instances=1 multiple_markers={} non_terminal={} not_background={}",
                               st.multiple_markers, st.non_terminal, st.not_background);
    }
    return o;
}

Outcome scorer_laws() {
    Outcome o;
    constexpr double tol = 1e-12;
    std::mt19937_64 rng(11);
    std::vector<TextPair> pairs;
    for (int i = 0; i < 10000; ++i) pairs.push_back({random_sentence(rng, 40, 12), random_sentence(rng, 40, 12)});
    const BaselineScorer scorer;
    const auto forward = scorer.score_batch(pairs);
    std::vector<TextPair> swapped;
    for (const auto& p : pairs) swapped.push_back({p.b, p.a});
    const auto backward = scorer.score_batch(swapped);

    std::vector<std::pair<double, double>> by_jaccard;
    double worst = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double s = forward[i].value();
        o.require(s >= 1.0 && s <= 5.0, "score out of range");
        o.require(std::abs(s - backward[i].value()) <= tol, "asymmetric score");
        o.require(std::abs(BaselineScorer::score(pairs[i].a, pairs[i].a).value() - 5.0) <= tol, "identity != 5");
        const double j = oracle::jaccard(pairs[i].a, pairs[i].b);
        worst = std::max(worst, std::abs(s - (1.0 + 4.0 * j)));
        by_jaccard.emplace_back(j, s);
    }
    o.require(worst <= tol, fmt::format("max |score - (1+4J)| = {:.3e}", worst));
    std::sort(by_jaccard.begin(), by_jaccard.end());
    for (std::size_t i = 1; i < by_jaccard.size(); ++i) {
        o.require(by_jaccard[i].second + tol >= by_jaccard[i - 1].second, "not monotone in Jaccard");
    }
    // Disjoint vocabularies.
    for (int i = 0; i < 1000; ++i) {
        std::string a = "x" + random_sentence(rng, 30, 8);
        std::string b = "y" + random_sentence(rng, 30, 8);
        std::replace(a.begin(), a.end(), 'w', 'p');
        std::replace(b.begin(), b.end(), 'w', 'q');
        std::replace(a.begin(), a.end(), 'W', 'p');
        std::replace(b.begin(), b.end(), 'W', 'q');
        if (oracle::token_set(a).empty() || oracle::token_set(b).empty()) continue;
        o.require(std::abs(BaselineScorer::score(a, b).value() - 1.0) <= tol, "token-disjoint != 1");
    }
    if (o.ok) o.detail = fmt::format("pairs=10000 max_dev={:.1e}", worst);
    return o;
}

Outcome best_match_brute_force() {
    Outcome o;
    std::mt19937_64 rng(5);
    const BaselineScorer scorer;
    std::size_t ties = 0;
    for (int inst = 0; inst < 1000; ++inst) {
        const std::size_t n = 1 + rng() % 100;
        std::vector<ClaimSentence> claims;
        std::size_t idx = rng() % 3;
        for (std::size_t k = 0; k < n; ++k) {
            ClaimSentence c;
            c.paper_id = "P";
            c.sentence_index = idx;
            idx += 1 + rng() % 3;
            // Small vocabularies and repeated sentences produce exact ties.
            c.sentence_text = (k > 0 && rng() % 6 == 0) ? claims[rng() % k].sentence_text : random_sentence(rng, 12, 5);
            claims.push_back(c);
        }
        const std::string citing = random_sentence(rng, 12, 6);
        const auto got = best_match(citing, claims, scorer);

        double best = -1.0;
        std::size_t best_idx = 0;
        std::size_t n_best = 0;
        for (const auto& c : claims) {
            const double s = 1.0 + 4.0 * oracle::jaccard(citing, c.sentence_text);
            if (s > best + 1e-12) {
                best = s;
                best_idx = c.sentence_index;
                n_best = 1;
            } else if (std::abs(s - best) <= 1e-12) {
                ++n_best;
            }
        }
        if (n_best > 1) ++ties;
        o.require(got.matched_claim_index == best_idx, fmt::format("instance {}: index {} vs {}", inst,
                                                                   got.matched_claim_index, best_idx));
        o.require(std::abs(got.fidelity.value() - best) <= 1e-12, fmt::format("instance {}: score differs", inst));
    }
    o.require(ties > 100, fmt::format("only {} instances had ties", ties));
    if (o.ok) o.detail = fmt::format("instances=1000 with_ties={}", ties);
    return o;
}

DesignMatrix dense(const std::vector<std::vector<double>>& x, const std::vector<double>& y) {
    DesignMatrix m;
    const auto n = static_cast<Eigen::Index>(x.size());
    const auto p = static_cast<Eigen::Index>(x.at(0).size());
    m.rows.resize(n, p);
    m.response.resize(n);
    for (Eigen::Index j = 0; j < p; ++j) m.columns.push_back(j == 0 ? "(Intercept)" : "x" + std::to_string(j));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) m.rows(i, j) = x[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        m.response(i) = y[static_cast<std::size_t>(i)];
    }
    return m;
}

Outcome ols() {
    Outcome o;
    std::mt19937_64 rng(17);
    std::normal_distribution<double> z(0.0, 1.0);
    double worst_rel = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::vector<double>> x;
        std::vector<double> y;
        std::vector<double> beta;
        for (int j = 0; j < 6; ++j) beta.push_back(3.0 * z(rng));
        for (int i = 0; i < 200; ++i) {
            std::vector<double> row{1.0};
            for (int j = 1; j < 6; ++j) row.push_back(z(rng) * (1.0 + j));
            double yi = 0.0;
            for (int j = 0; j < 6; ++j) yi += row[static_cast<std::size_t>(j)] * beta[static_cast<std::size_t>(j)];
            y.push_back(yi + z(rng));
            x.push_back(row);
        }
        const auto fit = fit_ols(dense(x, y));
        const auto expected = oracle::normal_equations(x, y);
        double num = 0.0;
        double den = 0.0;
        for (std::size_t j = 0; j < 6; ++j) {
            num = std::max(num, std::abs(fit.coefficients[j].estimate - expected[j]));
            den = std::max(den, std::abs(expected[j]));
        }
        worst_rel = std::max(worst_rel, num / den);
    }
    o.require(worst_rel <= 1e-8, fmt::format("relative error {:.3e} vs normal equations", worst_rel));

    const auto planted = synthetic::generate_feature_rows(10000, 0.5, 42);
    const auto m = encode_design_matrix(planted.rows, planted.spec);
    const auto fit = fit_ols(m);
    double worst_z = 0.0;
    for (const auto& [name, truth] : planted.true_coefficients) {
        const auto& c = fit.at(name);
        const double zscore = std::abs(c.estimate - truth) / c.std_error;
        worst_z = std::max(worst_z, zscore);
        o.require(zscore < 3.0, fmt::format("{} off by {:.2f} se", name, zscore));
    }
    const Eigen::VectorXd resid = m.response - m.rows * fit.beta();
    const Eigen::VectorXd g = m.rows.transpose() * resid;
    const double scale = m.rows.cwiseAbs().maxCoeff() * m.response.cwiseAbs().maxCoeff();
    const double orth = g.cwiseAbs().maxCoeff() / scale;
    o.require(orth <= 1e-8, fmt::format("residual orthogonality {:.3e}", orth));
    if (o.ok) {
        o.detail = fmt::format("oracle_rel_err={:.1e} planted_max_z={:.2f} orthogonality={:.1e}", worst_rel, worst_z,
                               orth);
    }
    return o;
}

Outcome reference_row() {
    Outcome o;
    auto planted = synthetic::generate_feature_rows(500, 0.5, 3);
    FeatureRow r;
    r.fidelity = 3.0;
    r.field_of_study = planted.spec.reference_for(Predictor::field_of_study);
    r.publication_year = std::stoi(planted.spec.reference_for(Predictor::publication_year));
    r.publication_type = *parse_publication_type(planted.spec.reference_for(Predictor::publication_type));
    r.open_access = planted.spec.reference_for(Predictor::open_access) == "true";
    r.self_citation = planted.spec.reference_for(Predictor::self_citation) == "true";
    r.within_field = planted.spec.reference_for(Predictor::within_field) == "true";
    r.context_length = 120;
    r.paper_citation = 10;
    r.author_seniority = 4;
    r.team_size = 3;
    planted.rows.insert(planted.rows.begin() + 17, r);
    const auto m = encode_design_matrix(planted.rows, planted.spec);
    std::size_t categorical = 0;
    for (std::size_t j = 1; j < m.columns.size(); ++j) {
        bool is_cat = false;
        for (auto p : planted.spec.predictors) {
            if (kind_of(p) != PredictorKind::continuous && m.columns[j].starts_with(column_name(p))) is_cat = true;
        }
        if (!is_cat) continue;
        ++categorical;
        o.require(m.rows(17, static_cast<Eigen::Index>(j)) == 0.0, m.columns[j] + " is nonzero");
    }
    o.require(m.rows(17, 0) == 1.0, "intercept is not 1");
    o.require(categorical > 0, "no categorical columns");
    if (o.ok) o.detail = fmt::format("categorical_columns={}", categorical);
    return o;
}

Outcome telephone() {
    Outcome o;
    const auto ds = synthetic::generate_telephone_dataset({});
    const PairIndex idx(ds.records);
    const auto triples = find_intermediary_triples(ds.graph, idx, 4);
    const auto matched = match_controls(triples, ds.graph, idx, ds.papers, 4);
    for (const auto& mp : matched) {
        if (!satisfies_matching_invariants(mp, ds.graph, ds.papers)) {
            o.require(false, "matching invariant violated");
            break;
        }
    }
    const auto e = estimate_effect(matched);
    const double dev = std::abs(e.difference - (-0.06));
    o.require(dev <= 2.0 * e.standard_error,
              fmt::format("delta {:.4f} se {:.4f} not within 2se of -0.06", e.difference, e.standard_error));
    const auto strata = stratify_by_intermediary_fidelity(matched);
    const double lo = strata[0].mean_treated_fidelity.value_or(NAN);
    const double mid = strata[1].mean_treated_fidelity.value_or(NAN);
    const double hi = strata[2].mean_treated_fidelity.value_or(NAN);
    o.require(lo < mid && mid < hi, fmt::format("strata means {:.4f} {:.4f} {:.4f}", lo, mid, hi));

    std::size_t graphs = 0;
    std::size_t oracle_matches = 0;
    for (std::uint32_t seed = 1; seed <= 6; ++seed) {
        const int n = seed % 2 ? 200 : 120;
        const auto w = test::random_world(seed, n, n == 200 ? 0.04 : 0.07);
        const auto oi = test::oracle_inputs(w);
        const PairIndex widx(w.records);
        const auto t = find_intermediary_triples(w.graph, widx, 4);
        const auto expected_t = oracle::triples(oi.nodes, oi.edges, oi.scored);
        o.require(test::as_oracle(t) == expected_t, fmt::format("triples differ on graph seed {}", seed));
        const auto mm = match_controls(t, w.graph, widx, w.papers, 4);
        const auto expected_m = oracle::greedy_match(expected_t, oi.nodes, oi.edges, oi.info, oi.claim);
        o.require(test::as_oracle(mm) == expected_m, fmt::format("matching differs on graph seed {}", seed));
        oracle_matches += expected_m.size();
        ++graphs;
    }
    if (o.ok) {
        o.detail = fmt::format("pairs={} delta={:.4f} se={:.4f} strata={:.3f}<{:.3f}<{:.3f} oracle_graphs={} "
                               "oracle_matches={}",
                               e.n_pairs, e.difference, e.standard_error, lo, mid, hi, graphs, oracle_matches);
    }
    return o;
}

std::vector<std::string> sorted_lines(const fs::path& p) {
    std::istringstream in(test::read_file(p));
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    std::sort(lines.begin(), lines.end());
    return lines;
}

std::size_t count(const RunManifest& m, const std::string& key) {
    auto it = m.record_counts.find(key);
    if (it == m.record_counts.end()) throw std::runtime_error("manifest " + m.stage + " lacks counter " + key);
    return it->second;
}

Outcome end_to_end() {
    Outcome o;
    test::TempDir dir;
    synthetic::CorpusOptions co;
    co.n_papers = 200;
    write_corpus(dir.path() / "corpus.jsonl", synthetic::generate_corpus(co));

    std::vector<fs::path> out_dirs;
    for (unsigned workers : {1u, 4u, 16u}) {
        PipelineConfig c;
        c.corpus_path = dir.path() / "corpus.jsonl";
        c.output_dir = dir.path() / ("w" + std::to_string(workers));
        c.workers = workers;
        out_dirs.push_back(c.output_dir);
        std::map<Stage, RunManifest> ms;
        for (auto s : kAllStages) ms[s] = run_stage(s, c);

        for (auto s : {Stage::extract, Stage::claims, Stage::regress, Stage::telephone}) {
            const auto& m = ms[s];
            o.require(count(m, "corpus_lines") == count(m, "papers_loaded") + count(m, "papers_skipped"),
                      m.stage + ": corpus counters do not add up");
        }
        const auto& ex = ms[Stage::extract];
        std::size_t rejected = 0;
        for (const auto& [k, v] : ex.record_counts) {
            if (k.starts_with("rejected_")) rejected += v;
        }
        o.require(count(ex, "sentences") == count(ex, "instances") + rejected, "extract counters do not add up");
        const auto& cl = ms[Stage::claims];
        std::size_t by_cat = 0;
        for (const auto& [k, v] : cl.record_counts) {
            if (k.starts_with("category_")) by_cat += v;
        }
        o.require(count(cl, "sentences") == by_cat, "claims categories do not add up");
        const auto& pr = ms[Stage::pairs];
        o.require(count(pr, "instances") == count(ex, "instances"), "pairs did not consume every instance");
        o.require(count(pr, "claims_in") == count(cl, "claims"), "pairs did not consume every claim");
        o.require(count(pr, "instances") == count(pr, "records") + count(pr, "skipped_no_claims"),
                  "pairs counters do not add up");
        const auto& rg = ms[Stage::regress];
        o.require(count(rg, "pairs_in") == count(pr, "records"), "regress did not consume every pair");
        o.require(count(rg, "pairs_in") == count(rg, "rows_derived") + count(rg, "skipped_missing_paper"),
                  "regress derivation counters do not add up");
        o.require(count(rg, "rows_derived") == count(rg, "rows_used") + count(rg, "excluded_missing"),
                  "regress exclusion counters do not add up");
        const auto& tp = ms[Stage::telephone];
        o.require(count(tp, "structures") == count(tp, "triples") + count(tp, "skipped_unscored"),
                  "telephone structure counters do not add up");
        o.require(count(tp, "triples") == count(tp, "matched") + count(tp, "unmatched"),
                  "telephone matching counters do not add up");
        const auto& rp = ms[Stage::report];
        o.require(count(rp, "pairs") == count(pr, "records") && count(rp, "histogram_total") == count(rp, "pairs"),
                  "histogram does not cover every pair");

        for (const auto& p : records::read_pairs(c.output_dir / outputs::pairs)) {
            const double s = p.fidelity.value();
            o.require(s >= 1.0 && s <= 5.0, fmt::format("score {} outside [1, 5]", s));
        }
    }

    std::size_t files = 0;
    for (auto s : kAllStages) {
        for (const auto& rel : stage_outputs(s)) {
            const auto base = sorted_lines(out_dirs[0] / rel);
            for (std::size_t k = 1; k < out_dirs.size(); ++k) {
                o.require(sorted_lines(out_dirs[k] / rel) == base,
                          fmt::format("{} differs between workers 1 and {}", rel.string(), k == 1 ? 4 : 16));
            }
            ++files;
        }
    }
    if (o.ok) o.detail = fmt::format("papers=200 workers=1,4,16 files_compared={}", files);
    return o;
}

}  // namespace

int main() {
    spdlog::set_level(spdlog::level::warn);
    criterion("extraction_fixture_one_instance_three_rejections", 1, four_sentence_extraction);
    criterion("baseline_scorer_laws", 5, scorer_laws);
    criterion("best_match_equals_brute_force", 10, best_match_brute_force);
    criterion("ols_oracle_and_planted_recovery", 30, ols);
    criterion("reference_row_zero_categoricals", 30, reference_row);
    criterion("telephone_effect_strata_and_oracles", 60, telephone);
    criterion("end_to_end_determinism_and_conservation", 120, end_to_end);
    std::cout << (failures == 0 ? "ALL PASS" : fmt::format("{} FAILED", failures)) << std::endl;
    return failures == 0 ? 0 : 1;
}
