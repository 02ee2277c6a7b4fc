#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "citefid/analysis.hpp"
#include "citefid/corpus.hpp"
#include "citefid/fidelity.hpp"
#include "citefid/graph.hpp"

namespace citefid::synthetic {

struct CorpusOptions {
    std::size_t n_papers = 200;
    std::uint64_t seed = 42;
    double claim_fraction = 0.30;  // share of body sentences written as claims
};

// Seeded corpus with metadata, body text and resolved bibliographies. Citing
// sentences paraphrase claims of the cited paper so the baseline scorer sees
// a spread of overlaps; some citations are multi-source, mid-sentence,
// author-year, or point at unresolved entries. Identical options give
// identical papers.
std::vector<Paper> generate_corpus(const CorpusOptions& options);

struct PlantedRegression {
    RegressionSpec spec;
    std::map<std::string, double> true_coefficients;  // by design column
    std::vector<FeatureRow> rows;
};

// Rows drawn from small category sets with response = X * beta + N(0, sigma).
// The noise sequence depends only on `seed`, so scaling sigma scales the
// realized noise exactly.
PlantedRegression generate_feature_rows(std::size_t n, double sigma, std::uint64_t seed);

struct TelephoneOptions {
    std::size_t n_originals = 600;
    std::size_t treated_per_original = 5;
    double control_mean = 3.5;
    double noise_sd = 0.25;
    double treatment_effect = -0.06;
    // Added to treated fidelity by intermediary stratum; equal stratum
    // probabilities keep the average offset at zero.
    double low_offset = -0.1;
    double medium_offset = 0.0;
    double high_offset = 0.1;
    std::uint64_t seed = 7;
};

struct TelephoneDataset {
    std::map<PaperId, Paper> papers;
    CitationGraph graph;
    std::vector<PairRecord> records;
};

// Originals A, intermediaries B citing A, treated C citing A and B, exactly
// matching controls D citing only A, plus decoys (wrong field, wrong year,
// impure controls).
TelephoneDataset generate_telephone_dataset(const TelephoneOptions& options);

}  // namespace citefid::synthetic
