#include "citefid/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "citefid/errors.hpp"
#include "citefid/text.hpp"

namespace citefid {

ReferenceFrequencies count_reference_frequencies(std::span<const CitationInstance> instances) {
    ReferenceFrequencies out;
    for (const auto& inst : instances) ++out[{inst.citing_paper_id, inst.cited_paper_id}];
    return out;
}

FeatureRow derive_features(const PairRecord& record, const Paper& citing, const Paper& cited,
                           int reference_frequency) {
    if (record.citing_paper_id != citing.paper_id || record.cited_paper_id != cited.paper_id) {
        throw PreconditionError("pair record does not match the supplied papers");
    }
    if (record.citing_sentence_index >= citing.body_sentences.size()) {
        throw PreconditionError("citing sentence index out of range for paper '" + citing.paper_id + "'");
    }
    if (reference_frequency < 1) throw PreconditionError("reference frequency must be >= 1");

    FeatureRow row;
    row.fidelity = record.fidelity.value();
    row.field_of_study = citing.field;
    row.publication_year = citing.year;
    row.publication_type = citing.publication_type;
    row.open_access = cited.is_open_access;
    row.context_length = static_cast<double>(text::utf8_length(citing.body_sentences[record.citing_sentence_index]));
    row.reference_frequency = reference_frequency;
    row.publication_interval = static_cast<double>(citing.year - cited.year);
    row.paper_citation = static_cast<double>(cited.citation_count);
    row.team_size = static_cast<int>(citing.authors.size());
    row.within_field = citing.field == cited.field;

    std::set<std::string> cited_authors;
    for (const auto& a : cited.authors) cited_authors.insert(a.author_id);
    for (const auto& a : citing.authors) {
        if (cited_authors.contains(a.author_id)) {
            row.self_citation = true;
            break;
        }
    }

    if (!citing.authors.empty()) {
        bool complete = true;
        int best = 0;
        for (const auto& a : citing.authors) {
            if (!a.h_index) {
                complete = false;
                break;
            }
            best = std::max(best, *a.h_index);
        }
        if (complete) row.author_seniority = best;
        if (const auto& h = citing.authors.front().h_index) row.first_author_seniority = *h;
        if (const auto& h = citing.authors.back().h_index) row.last_author_seniority = *h;
    }
    return row;
}

std::optional<double> numeric_value(const FeatureRow& row, Predictor p) {
    switch (p) {
        case Predictor::open_access: return row.open_access ? 1.0 : 0.0;
        case Predictor::self_citation: return row.self_citation ? 1.0 : 0.0;
        case Predictor::within_field: return row.within_field ? 1.0 : 0.0;
        case Predictor::context_length: return row.context_length;
        case Predictor::reference_frequency: return static_cast<double>(row.reference_frequency);
        case Predictor::publication_interval: return row.publication_interval;
        case Predictor::paper_citation: return row.paper_citation;
        case Predictor::author_seniority: return row.author_seniority;
        case Predictor::team_size:
            return row.team_size >= 1 ? std::optional<double>(row.team_size) : std::nullopt;
        case Predictor::first_author_seniority: return row.first_author_seniority;
        case Predictor::last_author_seniority: return row.last_author_seniority;
        case Predictor::field_of_study:
        case Predictor::publication_year:
        case Predictor::publication_type: return std::nullopt;
    }
    return std::nullopt;
}

std::string categorical_value(const FeatureRow& row, Predictor p) {
    switch (p) {
        case Predictor::field_of_study: return row.field_of_study;
        case Predictor::publication_year: return std::to_string(row.publication_year);
        case Predictor::publication_type: return std::string(to_string(row.publication_type));
        case Predictor::open_access: return row.open_access ? "true" : "false";
        case Predictor::self_citation: return row.self_citation ? "true" : "false";
        case Predictor::within_field: return row.within_field ? "true" : "false";
        default: throw PreconditionError("predictor '" + std::string(config_name(p)) + "' is not categorical");
    }
}

std::size_t DesignMatrix::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return i;
    }
    throw PreconditionError("no design column named '" + std::string(name) + "'");
}

namespace {

struct ColumnPlan {
    Predictor predictor;
    std::optional<std::string> level;  // dummy level; nullopt for numeric columns
    bool invert_boolean = false;        // boolean with reference "true"
};

bool row_usable(const FeatureRow& row, const RegressionSpec& spec) {
    if (!std::isfinite(row.fidelity)) return false;
    for (auto p : spec.predictors) {
        if (kind_of(p) == PredictorKind::continuous) {
            auto v = numeric_value(row, p);
            if (!v || !std::isfinite(*v)) return false;
        }
    }
    return true;
}

// Scales columns to unit norm so rank decisions do not depend on units.
Eigen::VectorXd column_norms(const Eigen::MatrixXd& x) {
    Eigen::VectorXd d = x.colwise().norm().transpose();
    for (Eigen::Index j = 0; j < d.size(); ++j) {
        if (d[j] == 0.0) d[j] = 1.0;
    }
    return d;
}

constexpr double kRankThreshold = 1e-10;

void check_rank(const Eigen::MatrixXd& x, const std::vector<std::string>& columns) {
    const Eigen::VectorXd d = column_norms(x);
    Eigen::MatrixXd scaled = x * d.cwiseInverse().asDiagonal();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
    qr.setThreshold(kRankThreshold);
    const auto rank = qr.rank();
    if (rank == x.cols()) return;
    const auto& perm = qr.colsPermutation().indices();
    std::vector<std::string> dependent;
    for (Eigen::Index i = rank; i < x.cols(); ++i) dependent.push_back(columns[static_cast<std::size_t>(perm[i])]);
    std::sort(dependent.begin(), dependent.end());
    std::string names;
    for (const auto& n : dependent) names += (names.empty() ? "" : ", ") + n;
    throw SingularityError("design matrix is rank deficient (rank " + std::to_string(rank) + " of " +
                           std::to_string(x.cols()) + "); collinear columns: " + names);
}

}  // namespace

DesignMatrix encode_design_matrix(std::span<const FeatureRow> rows, const RegressionSpec& spec, EncodeStats* stats) {
    EncodeStats st;
    st.rows_in = rows.size();
    std::vector<const FeatureRow*> used;
    used.reserve(rows.size());
    for (const auto& r : rows) {
        if (row_usable(r, spec)) {
            used.push_back(&r);
        } else {
            ++st.excluded_missing;
        }
    }
    st.rows_used = used.size();
    if (stats) *stats = st;
    if (used.size() < 2) throw InsufficientDataError("need at least 2 usable rows, have " + std::to_string(used.size()));

    std::vector<std::string> columns{"(Intercept)"};
    std::vector<ColumnPlan> plan;
    for (auto p : spec.predictors) {
        const std::string name(column_name(p));
        switch (kind_of(p)) {
            case PredictorKind::continuous:
                columns.push_back(name);
                plan.push_back({p, std::nullopt});
                break;
            case PredictorKind::boolean: {
                const std::string ref = spec.reference_for(p);
                if (ref != "false" && ref != "true") throw ConfigError("boolean reference must be true or false");
                const bool invert = ref == "true";
                columns.push_back(invert ? name + "[false]" : name);
                plan.push_back({p, std::nullopt, invert});
                break;
            }
            case PredictorKind::categorical: {
                const std::string ref = spec.reference_for(p);
                std::set<std::string> observed;
                for (const auto* r : used) observed.insert(categorical_value(*r, p));
                std::vector<std::string> levels;
                if (auto it = spec.levels.find(p); it != spec.levels.end()) {
                    const std::set<std::string> registry(it->second.begin(), it->second.end());
                    for (const auto& lv : observed) {
                        if (!registry.contains(lv)) {
                            throw ConfigError("level '" + lv + "' of " + name + " is not in the regression spec registry");
                        }
                    }
                    for (const auto& lv : it->second) {
                        if (observed.contains(lv)) levels.push_back(lv);
                    }
                } else {
                    levels.assign(observed.begin(), observed.end());
                }
                if (std::find(levels.begin(), levels.end(), ref) == levels.end()) {
                    throw SingularityError("reference level '" + ref + "' of " + name +
                                           " does not occur in the data; its dummies would be collinear with the "
                                           "intercept");
                }
                for (const auto& lv : levels) {
                    if (lv == ref) continue;
                    columns.push_back(name + "[" + lv + "]");
                    plan.push_back({p, lv});
                }
                break;
            }
        }
    }

    const auto n = static_cast<Eigen::Index>(used.size());
    const auto k = static_cast<Eigen::Index>(columns.size());
    DesignMatrix m;
    m.columns = std::move(columns);
    m.rows.resize(n, k);
    m.response.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const FeatureRow& r = *used[static_cast<std::size_t>(i)];
        m.response[i] = r.fidelity;
        m.rows(i, 0) = 1.0;
        for (std::size_t c = 0; c < plan.size(); ++c) {
            const ColumnPlan& cp = plan[c];
            double v = 0.0;
            if (cp.level) {
                v = categorical_value(r, cp.predictor) == *cp.level ? 1.0 : 0.0;
            } else {
                v = *numeric_value(r, cp.predictor);
                if (cp.invert_boolean) v = 1.0 - v;
            }
            m.rows(i, static_cast<Eigen::Index>(c) + 1) = v;
        }
    }
    if (n < k) {
        throw InsufficientDataError("design has " + std::to_string(k) + " columns but only " + std::to_string(n) +
                                    " rows");
    }
    check_rank(m.rows, m.columns);
    return m;
}

const Coefficient& FitResult::at(std::string_view column) const {
    for (const auto& c : coefficients) {
        if (c.column == column) return c;
    }
    throw PreconditionError("no coefficient named '" + std::string(column) + "'");
}

Eigen::VectorXd FitResult::beta() const {
    Eigen::VectorXd b(static_cast<Eigen::Index>(coefficients.size()));
    for (std::size_t i = 0; i < coefficients.size(); ++i) b[static_cast<Eigen::Index>(i)] = coefficients[i].estimate;
    return b;
}

namespace {

double two_sided_p(double t, std::size_t df) {
    if (std::isnan(t)) return 1.0;
    if (std::isinf(t)) return 0.0;
    const double at = std::fabs(t);
    double p = 0.0;
    if (df > 1'000'000) {
        p = 2.0 * boost::math::cdf(boost::math::complement(boost::math::normal_distribution<double>(), at));
    } else {
        p = 2.0 * boost::math::cdf(
                      boost::math::complement(boost::math::students_t_distribution<double>(static_cast<double>(df)), at));
    }
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace

FitResult fit_ols(const DesignMatrix& m) {
    const Eigen::Index n = m.rows.rows();
    const Eigen::Index k = m.rows.cols();
    if (m.response.size() != n || static_cast<Eigen::Index>(m.columns.size()) != k) {
        throw PreconditionError("design matrix dimensions are inconsistent");
    }
    if (n <= k) {
        throw InsufficientDataError("OLS needs more rows than columns (" + std::to_string(n) + " <= " +
                                    std::to_string(k) + ")");
    }

    const Eigen::VectorXd scale = column_norms(m.rows);
    const Eigen::MatrixXd scaled = m.rows * scale.cwiseInverse().asDiagonal();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
    qr.setThreshold(kRankThreshold);
    if (qr.rank() < k) check_rank(m.rows, m.columns);

    const Eigen::VectorXd beta_scaled = qr.solve(m.response);
    const Eigen::VectorXd beta = beta_scaled.cwiseQuotient(scale);
    const Eigen::VectorXd residual = m.response - m.rows * beta;
    const double rss = residual.squaredNorm();
    const auto df = static_cast<std::size_t>(n - k);
    const double sigma2 = rss / static_cast<double>(df);

    // (X'X)^-1 = P R^-1 R^-T P' for the scaled design.
    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    const Eigen::MatrixXd cov_perm = r_inv * r_inv.transpose();
    const Eigen::MatrixXd cov_scaled =
        qr.colsPermutation() * cov_perm * qr.colsPermutation().transpose();

    FitResult fit;
    fit.n_observations = static_cast<std::size_t>(n);
    fit.degrees_of_freedom = df;
    fit.residual_sum_of_squares = rss;
    for (Eigen::Index j = 0; j < k; ++j) {
        Coefficient c;
        c.column = m.columns[static_cast<std::size_t>(j)];
        c.estimate = beta[j];
        c.std_error = std::sqrt(std::max(0.0, sigma2 * cov_scaled(j, j))) / scale[j];
        if (c.std_error > 0.0) {
            c.t_value = c.estimate / c.std_error;
        } else {
            c.t_value = c.estimate == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), c.estimate);
        }
        c.p_value = c.std_error > 0.0 ? two_sided_p(c.t_value, df) : (c.estimate == 0.0 ? 1.0 : 0.0);
        fit.coefficients.push_back(std::move(c));
    }

    const double mean = m.response.mean();
    const double tss = (m.response.array() - mean).square().sum();
    fit.r_squared = tss > 0.0 ? std::clamp(1.0 - rss / tss, 0.0, 1.0) : 1.0;
    fit.adjusted_r_squared =
        1.0 - (1.0 - fit.r_squared) * static_cast<double>(n - 1) / static_cast<double>(df);
    return fit;
}

std::vector<Bin> bin_continuous(std::span<const FeatureRow> rows, Predictor variable, std::size_t n_bins) {
    if (kind_of(variable) != PredictorKind::continuous) {
        throw PreconditionError("'" + std::string(config_name(variable)) + "' is not a continuous variable");
    }
    if (n_bins < 2) throw PreconditionError("need at least 2 bins");
    std::vector<std::pair<double, double>> values;  // (value, fidelity)
    for (const auto& r : rows) {
        if (auto v = numeric_value(r, variable)) values.emplace_back(*v, r.fidelity);
    }
    if (values.empty()) throw PreconditionError("no rows to bin");
    auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end(),
                                              [](const auto& a, const auto& b) { return a.first < b.first; });
    const double lo = lo_it->first;
    const double hi = hi_it->first;
    if (!(hi > lo)) throw PreconditionError("'" + std::string(config_name(variable)) + "' is constant; cannot bin");

    const double width = (hi - lo) / static_cast<double>(n_bins);
    std::vector<Bin> bins(n_bins);
    std::vector<double> sums(n_bins, 0.0);
    for (std::size_t b = 0; b < n_bins; ++b) {
        bins[b].lower = lo + width * static_cast<double>(b);
        bins[b].upper = b + 1 == n_bins ? hi : lo + width * static_cast<double>(b + 1);
        bins[b].label = fmt::format("[{:.6g}, {:.6g}{}", bins[b].lower, bins[b].upper, b + 1 == n_bins ? "]" : ")");
    }
    for (const auto& [v, f] : values) {
        auto b = static_cast<std::size_t>(std::floor((v - lo) / width));
        b = std::min(b, n_bins - 1);
        // Membership follows the published edges, not the rounded quotient.
        while (b > 0 && v < bins[b].lower) --b;
        while (b + 1 < n_bins && v >= bins[b + 1].lower) ++b;
        ++bins[b].count;
        sums[b] += f;
    }
    for (std::size_t b = 0; b < n_bins; ++b) {
        bins[b].mean_fidelity = bins[b].count ? sums[b] / static_cast<double>(bins[b].count) : 0.0;
    }
    return bins;
}

std::string_view significance_stars(double p) noexcept {
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "";
}

std::string summarize(const FitResult& fit) {
    std::string out = "variable\tcoefficient\tstd_error\tt\tp\tstars\n";
    for (const auto& c : fit.coefficients) {
        out += fmt::format("{}\t{:.6f}\t{:.6f}\t{:.6f}\t{:.6f}\t{}\n", c.column, c.estimate, c.std_error, c.t_value,
                           c.p_value, significance_stars(c.p_value));
    }
    return out;
}

}  // namespace citefid
