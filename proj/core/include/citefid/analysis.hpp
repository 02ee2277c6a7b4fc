#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "citefid/corpus.hpp"
#include "citefid/fidelity.hpp"
#include "citefid/regression_spec.hpp"

namespace citefid {

// One regression observation: a scored citation with citing/cited metadata.
struct FeatureRow {
    double fidelity = 0.0;
    std::string field_of_study;    // citing paper
    int publication_year = 0;      // citing paper, categorical
    PublicationType publication_type = PublicationType::other;  // citing paper
    bool open_access = false;      // cited paper
    double context_length = 0.0;   // characters in citing sentence
    int reference_frequency = 1;
    double publication_interval = 0.0;  // citing year - cited year
    double paper_citation = 0.0;        // cited paper's citation count
    std::optional<double> author_seniority;        // max h-index over citing authors
    int team_size = 0;
    bool self_citation = false;
    bool within_field = false;
    std::optional<double> first_author_seniority;
    std::optional<double> last_author_seniority;

    bool operator==(const FeatureRow&) const = default;
};

// Reporting-instance count per (citing, cited) pair.
using ReferenceFrequencies = std::map<std::pair<PaperId, PaperId>, int>;
ReferenceFrequencies count_reference_frequencies(std::span<const CitationInstance> instances);

FeatureRow derive_features(const PairRecord& record, const Paper& citing, const Paper& cited,
                           int reference_frequency);

// Value of a numeric predictor (continuous or boolean as 0/1); nullopt when
// the row is missing it.
std::optional<double> numeric_value(const FeatureRow& row, Predictor p);
std::string categorical_value(const FeatureRow& row, Predictor p);

struct DesignMatrix {
    std::vector<std::string> columns;  // "(Intercept)" first
    Eigen::MatrixXd rows;
    Eigen::VectorXd response;

    std::size_t column_index(std::string_view name) const;  // throws if absent
};

struct EncodeStats {
    std::size_t rows_in = 0;
    std::size_t rows_used = 0;
    std::size_t excluded_missing = 0;
};

// Intercept, then predictors in spec order: non-reference dummies per level,
// booleans as 0/1, continuous as is. Throws SingularityError naming the
// dependent columns if the result is rank deficient, InsufficientDataError
// with fewer than 2 usable rows, ConfigError for a level outside the registry.
DesignMatrix encode_design_matrix(std::span<const FeatureRow> rows, const RegressionSpec& spec,
                                  EncodeStats* stats = nullptr);

struct Coefficient {
    std::string column;
    double estimate = 0.0;
    double std_error = 0.0;
    double t_value = 0.0;
    double p_value = 1.0;
};

struct FitResult {
    std::vector<Coefficient> coefficients;  // design column order
    double r_squared = 0.0;
    double adjusted_r_squared = 0.0;
    double residual_sum_of_squares = 0.0;
    std::size_t n_observations = 0;
    std::size_t degrees_of_freedom = 0;

    const Coefficient& at(std::string_view column) const;
    Eigen::VectorXd beta() const;
};

// Ordinary least squares via column-pivoted Householder QR. Standard errors
// from RSS/(n-k) * diag((X'X)^-1), two-sided p from Student-t with n-k df.
FitResult fit_ols(const DesignMatrix& m);

struct Bin {
    std::string label;
    double lower = 0.0;
    double upper = 0.0;
    std::size_t count = 0;
    double mean_fidelity = 0.0;  // 0 for empty bins
};

// Equal-width bins over the observed range of a numeric predictor; rows
// missing the variable are ignored. Throws PreconditionError for empty input,
// n_bins < 2, non-numeric variables, or a constant variable.
std::vector<Bin> bin_continuous(std::span<const FeatureRow> rows, Predictor variable,
                                std::size_t n_bins);

// TSV: variable, coefficient, std_error, t, p, stars; six decimals.
std::string summarize(const FitResult& fit);

std::string_view significance_stars(double p) noexcept;

}  // namespace citefid
