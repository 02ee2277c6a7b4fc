#include "citefid/pipeline.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include "citefid/analysis.hpp"
#include "citefid/citation_extract.hpp"
#include "citefid/claims.hpp"
#include "citefid/errors.hpp"
#include "citefid/fidelity.hpp"
#include "citefid/graph.hpp"
#include "citefid/records.hpp"
#include "citefid/remote.hpp"
#include "citefid/telephone.hpp"
#include "citefid/text.hpp"

namespace citefid {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------- config

void PipelineConfig::validate() const {
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (batch_size < 1 || batch_size > kMaxWireBatch) throw ConfigError("batch_size must be in [1, 256]");
    if (scorer == ScorerKind::remote && (!remote_url || remote_url->empty())) {
        throw ConfigError("scorer = remote requires remote_url");
    }
    if (scorer == ScorerKind::baseline && remote_url) {
        throw ConfigError("remote_url is only valid with scorer = remote");
    }
    if (output_dir.empty()) throw ConfigError("output directory not set");
}

namespace {

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
    T v{};
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ConfigError("config key '" + std::string(key) + "' expects an integer, got '" + std::string(value) + "'");
    }
    return v;
}

}  // namespace

PipelineConfig parse_config_text(std::string_view text_in, PipelineConfig base) {
    std::istringstream in{std::string(text_in)};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = text::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key(text::trim(line.substr(0, eq)));
        const std::string value(text::trim(line.substr(eq + 1)));
        if (key == "corpus" || key == "corpus_path") {
            base.corpus_path = value;
        } else if (key == "out" || key == "output_dir") {
            base.output_dir = value;
        } else if (key == "scorer") {
            if (value == "baseline") {
                base.scorer = ScorerKind::baseline;
            } else if (value == "remote") {
                base.scorer = ScorerKind::remote;
            } else {
                throw ConfigError("scorer must be baseline or remote");
            }
        } else if (key == "remote_url") {
            base.remote_url = value;
        } else if (key == "workers") {
            base.workers = parse_number<unsigned>(key, value);
        } else if (key == "batch_size") {
            base.batch_size = parse_number<std::size_t>(key, value);
        } else if (key == "seed") {
            base.seed = parse_number<std::uint64_t>(key, value);
        } else if (key == "regression_spec" || key == "regression_spec_path") {
            base.regression_spec_path = value;
        } else if (key == "schema_mode") {
            if (value == "sentences") {
                base.schema_mode = SchemaMode::sentences;
            } else if (value == "raw_text") {
                base.schema_mode = SchemaMode::raw_text;
            } else {
                throw ConfigError("schema_mode must be sentences or raw_text");
            }
        } else if (key == "synthetic_papers") {
            base.synthetic_papers = parse_number<std::size_t>(key, value);
        } else {
            throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    return base;
}

PipelineConfig load_config_file(const fs::path& path, PipelineConfig base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), std::move(base));
}

std::string_view to_string(Stage s) noexcept {
    switch (s) {
        case Stage::extract: return "extract";
        case Stage::claims: return "claims";
        case Stage::pairs: return "pairs";
        case Stage::regress: return "regress";
        case Stage::telephone: return "telephone";
        case Stage::report: return "report";
    }
    return "extract";
}

std::optional<Stage> parse_stage(std::string_view s) noexcept {
    for (auto st : kAllStages) {
        if (to_string(st) == s) return st;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------- manifest

std::string RunManifest::to_json() const {
    json j{{"stage", stage},
           {"input_digest", input_digest},
           {"record_counts", record_counts},
           {"scorer", {{"name", scorer.name}, {"version", scorer.version}}},
           {"started", started},
           {"finished", finished}};
    return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(std::string_view text_in) {
    try {
        const json j = json::parse(text_in);
        RunManifest m;
        m.stage = j.at("stage").get<std::string>();
        m.input_digest = j.at("input_digest").get<std::string>();
        m.record_counts = j.at("record_counts").get<std::map<std::string, std::size_t>>();
        m.scorer = {j.at("scorer").at("name").get<std::string>(), j.at("scorer").at("version").get<std::string>()};
        m.started = j.at("started").get<std::string>();
        m.finished = j.at("finished").get<std::string>();
        return m;
    } catch (const json::exception& e) {
        throw Error(std::string("malformed run manifest: ") + e.what());
    }
}

// ---------------------------------------------------------------- files

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 computation failed");
    }
    std::string hex;
    hex.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

void write_file_atomic(const fs::path& path, std::string_view content) {
    static std::atomic<unsigned> counter{0};
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += fmt::format(".tmp-{}-{}", static_cast<long>(::getpid()), counter++);
    try {
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw Error("cannot write '" + tmp.string() + "'");
            out.write(content.data(), static_cast<std::streamsize>(content.size()));
            out.flush();
            if (!out) throw Error("write to '" + tmp.string() + "' failed");
        }
        fs::rename(tmp, path);
    } catch (...) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
    }
}

DirectoryLock::DirectoryLock(const fs::path& dir) : lock_path_(dir / ".citefid.lock") {
    fs::create_directories(dir);
    const int fd = ::open(lock_path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        throw LockError("output directory '" + dir.string() + "' is locked by another run (remove " +
                        lock_path_.string() + " if no run is active)");
    }
    const std::string pid = std::to_string(static_cast<long>(::getpid())) + "\n";
    [[maybe_unused]] auto written = ::write(fd, pid.data(), pid.size());
    ::close(fd);
}

DirectoryLock::~DirectoryLock() {
    std::error_code ec;
    fs::remove(lock_path_, ec);
}

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    ::gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

// ---------------------------------------------------------------- histogram

std::size_t histogram_bin(double score) {
    if (!(score >= kMinFidelity && score <= kMaxFidelity)) {
        throw PreconditionError("score " + std::to_string(score) + " outside [1, 5]");
    }
    // Edges are the doubles nearest to 1.0, 1.1, ..., 5.0; start from the
    // arithmetic guess and settle against the exact edges.
    auto edge = [](std::size_t i) { return static_cast<double>(10 + i) / 10.0; };
    auto idx = static_cast<std::size_t>(std::clamp(std::floor((score - 1.0) * 10.0), 0.0, double(kHistogramBins - 1)));
    while (idx + 1 < kHistogramBins && score >= edge(idx + 1)) ++idx;
    while (idx > 0 && score < edge(idx)) --idx;
    return idx;
}

std::array<std::size_t, kHistogramBins> fidelity_histogram(std::span<const double> scores) {
    std::array<std::size_t, kHistogramBins> counts{};
    for (double s : scores) ++counts[histogram_bin(s)];
    return counts;
}

std::string histogram_table(const std::array<std::size_t, kHistogramBins>& counts) {
    std::string out = "bin_lower\tbin_upper\tcount\n";
    for (std::size_t i = 0; i < kHistogramBins; ++i) {
        out += fmt::format("{:.1f}\t{:.1f}\t{}\n", static_cast<double>(10 + i) / 10.0,
                           static_cast<double>(11 + i) / 10.0, counts[i]);
    }
    return out;
}

// ---------------------------------------------------------------- stages

std::vector<fs::path> stage_outputs(Stage stage) {
    switch (stage) {
        case Stage::extract: return {fs::path(outputs::citations)};
        case Stage::claims: return {fs::path(outputs::claims)};
        case Stage::pairs: return {fs::path(outputs::pairs)};
        case Stage::regress:
            return {fs::path(outputs::features), fs::path(outputs::coefficients),
                    fs::path(outputs::coefficients_author_position), fs::path(outputs::fit), fs::path(outputs::bins)};
        case Stage::telephone: return {fs::path(outputs::matched_pairs), fs::path(outputs::telephone_effects)};
        case Stage::report:
            return {fs::path(outputs::report_dir) / outputs::histogram, fs::path(outputs::report_dir) / outputs::summary};
    }
    return {};
}

namespace {

fs::path manifest_path(const PipelineConfig& c, Stage s) {
    return c.output_dir / "manifests" / (std::string(to_string(s)) + ".json");
}

struct Input {
    std::string label;
    fs::path path;
};

// Inputs produced by an earlier stage must exist together with its manifest.
fs::path require_stage_output(const PipelineConfig& c, Stage stage, Stage producer, std::string_view file) {
    const fs::path p = c.output_dir / file;
    if (!fs::exists(p) || !fs::exists(manifest_path(c, producer))) {
        throw DependencyError(std::string(to_string(stage)), std::string(to_string(producer)),
                              "stage '" + std::string(to_string(stage)) + "' needs " + std::string(file) +
                                  "; run 'citefid " + std::string(to_string(producer)) + "' first");
    }
    return p;
}

fs::path require_corpus(const PipelineConfig& c) {
    if (c.corpus_path.empty()) throw ConfigError("corpus path not set");
    if (!fs::exists(c.corpus_path)) throw ConfigError("corpus file '" + c.corpus_path.string() + "' not found");
    return c.corpus_path;
}

struct Models {
    std::unique_ptr<RemoteModelClient> remote;
    BaselineScorer baseline_scorer;
    BaselineBackgroundClassifier baseline_background;
    BaselineDiscourseClassifier baseline_discourse;
    std::unique_ptr<RemoteDiscourseClassifier> remote_discourse;

    const Scorer& scorer() const { return remote ? static_cast<const Scorer&>(*remote) : baseline_scorer; }
    const BackgroundClassifier& background() const {
        return remote ? static_cast<const BackgroundClassifier&>(*remote) : baseline_background;
    }
    const DiscourseClassifier& discourse() const {
        return remote_discourse ? static_cast<const DiscourseClassifier&>(*remote_discourse) : baseline_discourse;
    }
};

Models make_models(const PipelineConfig& c) {
    Models m;
    if (c.scorer == ScorerKind::remote) {
        RemoteOptions o;
        o.base_url = *c.remote_url;
        o.batch_size = c.batch_size;
        o.max_in_flight = std::max(1u, c.workers);
        m.remote = std::make_unique<RemoteModelClient>(o);
        m.remote->check_health();
        m.remote_discourse = std::make_unique<RemoteDiscourseClassifier>(*m.remote);
    }
    return m;
}

std::vector<Paper> load_papers(const PipelineConfig& c, std::map<std::string, std::size_t>& counts) {
    LoadStats ls;
    auto papers = load_corpus(require_corpus(c), LoadOptions{c.schema_mode, c.workers}, &ls);
    counts["corpus_lines"] = ls.lines;
    counts["papers_loaded"] = ls.loaded;
    counts["papers_skipped"] = ls.skipped;
    for (std::size_t i = 0; i < ls.errors.size() && i < 20; ++i) {
        spdlog::warn("corpus line {} skipped: {}", ls.errors[i].line, ls.errors[i].message);
    }
    if (ls.errors.size() > 20) spdlog::warn("{} more corpus records skipped", ls.errors.size() - 20);
    return papers;
}

RegressionSpec load_regression_spec(const PipelineConfig& c) {
    if (!c.regression_spec_path) return RegressionSpec::main_model();
    return RegressionSpec::parse(read_file(*c.regression_spec_path));
}

RegressionSpec author_position_variant(const RegressionSpec& spec) {
    RegressionSpec alt = spec;
    alt.predictors.clear();
    for (auto p : spec.predictors) {
        if (p == Predictor::author_seniority) {
            alt.predictors.push_back(Predictor::first_author_seniority);
            alt.predictors.push_back(Predictor::last_author_seniority);
        } else {
            alt.predictors.push_back(p);
        }
    }
    return alt;
}

std::string features_table(std::span<const FeatureRow> rows) {
    auto opt = [](const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string("NA"); };
    std::string out =
        "fidelity\tfield_of_study\tpublication_year\tpublication_type\topen_access\tcontext_length\t"
        "reference_frequency\tpublication_interval\tpaper_citation\tauthor_seniority\tteam_size\tself_citation\t"
        "within_field\tfirst_author_seniority\tlast_author_seniority\n";
    for (const auto& r : rows) {
        out += fmt::format("{}\t{}\t{}\t{}\t{:d}\t{}\t{}\t{}\t{}\t{}\t{}\t{:d}\t{:d}\t{}\t{}\n", r.fidelity,
                           r.field_of_study, r.publication_year, to_string(r.publication_type), r.open_access,
                           r.context_length, r.reference_frequency, r.publication_interval, r.paper_citation,
                           opt(r.author_seniority), r.team_size, r.self_citation, r.within_field,
                           opt(r.first_author_seniority), opt(r.last_author_seniority));
    }
    return out;
}

void log_counts(Stage stage, const std::map<std::string, std::size_t>& counts) {
    std::string line;
    for (const auto& [k, v] : counts) line += fmt::format(" {}={}", k, v);
    spdlog::info("stage={}{}", to_string(stage), line);
}

using Outputs = std::vector<std::pair<fs::path, std::string>>;

struct StageResult {
    Outputs files;
    std::map<std::string, std::size_t> counts;
};

StageResult run_extract(const PipelineConfig& c, const Models& models) {
    StageResult r;
    const auto papers = load_papers(c, r.counts);
    ExtractStats st;
    const auto instances = extract_corpus(papers, models.background(), c.workers, &st);
    for (const auto& [k, v] : st.as_counters()) r.counts[k] = v;
    r.files.emplace_back(outputs::citations, records::to_lines(instances));
    return r;
}

StageResult run_claims(const PipelineConfig& c, const Models& models) {
    StageResult r;
    const auto papers = load_papers(c, r.counts);
    ClaimStats st;
    const auto claims = select_corpus_claims(papers, models.discourse(), c.workers, &st);
    for (const auto& [k, v] : st.as_counters()) r.counts[k] = v;
    r.files.emplace_back(outputs::claims, records::to_lines(claims));
    return r;
}

StageResult run_pairs(const PipelineConfig& c, const Models& models) {
    StageResult r;
    const auto instances = records::read_citations(c.output_dir / outputs::citations);
    const auto claims = records::read_claims(c.output_dir / outputs::claims);
    PairStats st;
    const auto pairs = build_pair_records(instances, group_claims(claims), models.scorer(),
                                          PairOptions{c.workers, c.batch_size}, &st);
    r.counts = st.as_counters();
    r.counts["claims_in"] = claims.size();
    if (models.remote) r.counts["protocol_warnings"] = models.remote->protocol_warnings();
    r.files.emplace_back(outputs::pairs, records::to_lines(pairs));
    return r;
}

StageResult run_regress(const PipelineConfig& c) {
    StageResult r;
    const auto papers = load_papers(c, r.counts);
    std::map<PaperId, const Paper*> by_id;
    for (const auto& p : papers) by_id[p.paper_id] = &p;
    const auto instances = records::read_citations(c.output_dir / outputs::citations);
    const auto pairs = records::read_pairs(c.output_dir / outputs::pairs);
    const auto freq = count_reference_frequencies(instances);

    std::vector<FeatureRow> rows;
    std::size_t missing_paper = 0;
    for (const auto& rec : pairs) {
        auto citing = by_id.find(rec.citing_paper_id);
        auto cited = by_id.find(rec.cited_paper_id);
        if (citing == by_id.end() || cited == by_id.end()) {
            ++missing_paper;
            continue;
        }
        auto f = freq.find({rec.citing_paper_id, rec.cited_paper_id});
        rows.push_back(derive_features(rec, *citing->second, *cited->second, f == freq.end() ? 1 : f->second));
    }
    r.counts["pairs_in"] = pairs.size();
    r.counts["rows_derived"] = rows.size();
    r.counts["skipped_missing_paper"] = missing_paper;

    const RegressionSpec spec = load_regression_spec(c);
    EncodeStats es;
    const FitResult fit = fit_ols(encode_design_matrix(rows, spec, &es));
    r.counts["rows_used"] = es.rows_used;
    r.counts["excluded_missing"] = es.excluded_missing;

    const RegressionSpec alt = author_position_variant(spec);
    EncodeStats es_alt;
    const FitResult fit_alt = fit_ols(encode_design_matrix(rows, alt, &es_alt));
    r.counts["rows_used_author_position"] = es_alt.rows_used;
    r.counts["excluded_missing_author_position"] = es_alt.excluded_missing;

    std::string bins = "variable\tbin\tlower\tupper\tcount\tmean_fidelity\n";
    for (auto p : spec.predictors) {
        if (kind_of(p) != PredictorKind::continuous) continue;
        try {
            for (const auto& b : bin_continuous(rows, p, spec.bins_for(p))) {
                bins += fmt::format("{}\t{}\t{:.6f}\t{:.6f}\t{}\t{:.6f}\n", config_name(p), b.label, b.lower, b.upper,
                                    b.count, b.mean_fidelity);
            }
        } catch (const PreconditionError& e) {
            spdlog::warn("no bins for {}: {}", config_name(p), e.what());
        }
    }

    auto fit_json = [](const FitResult& f, const EncodeStats& s) {
        return json{{"n_observations", f.n_observations},
                    {"degrees_of_freedom", f.degrees_of_freedom},
                    {"r_squared", f.r_squared},
                    {"adjusted_r_squared", f.adjusted_r_squared},
                    {"residual_sum_of_squares", f.residual_sum_of_squares},
                    {"rows_in", s.rows_in},
                    {"excluded_missing", s.excluded_missing}};
    };
    const json fits{{"main", fit_json(fit, es)}, {"author_position", fit_json(fit_alt, es_alt)}};

    r.files.emplace_back(outputs::features, features_table(rows));
    r.files.emplace_back(outputs::coefficients, summarize(fit));
    r.files.emplace_back(outputs::coefficients_author_position, summarize(fit_alt));
    r.files.emplace_back(outputs::fit, fits.dump(2) + "\n");
    r.files.emplace_back(outputs::bins, bins);
    return r;
}

StageResult run_telephone(const PipelineConfig& c) {
    StageResult r;
    const auto papers = load_papers(c, r.counts);
    GraphStats gs;
    const auto graph = build_citation_graph(papers, c.workers, &gs);
    r.counts["graph_references"] = gs.references;
    r.counts["graph_unresolved"] = gs.unresolved;
    r.counts["graph_self_loops"] = gs.self_loops;
    r.counts["graph_duplicates"] = gs.duplicates;
    r.counts["graph_edges"] = graph.edge_count();
    r.counts["graph_external_targets"] = gs.external_targets;

    std::map<PaperId, Paper> by_id;
    for (const auto& p : papers) by_id.emplace(p.paper_id, p);
    const auto pairs = records::read_pairs(c.output_dir / outputs::pairs);
    const PairIndex index(pairs);

    TripleStats ts;
    const auto triples = find_intermediary_triples(graph, index, c.workers, &ts);
    MatchStats ms;
    const auto matched = match_controls(triples, graph, index, by_id, c.workers, &ms);
    r.counts["structures"] = ts.structures;
    r.counts["triples"] = ts.triples;
    r.counts["skipped_unscored"] = ts.skipped_unscored;
    r.counts["matched"] = ms.matched;
    r.counts["unmatched"] = ms.unmatched;

    r.files.emplace_back(outputs::matched_pairs, records::to_lines(matched));
    r.files.emplace_back(outputs::telephone_effects, effects_table(matched));
    return r;
}

StageResult run_report(const PipelineConfig& c) {
    StageResult r;
    const auto pairs = records::read_pairs(c.output_dir / outputs::pairs);
    std::vector<double> scores;
    scores.reserve(pairs.size());
    for (const auto& p : pairs) scores.push_back(p.fidelity.value());
    const auto hist = fidelity_histogram(scores);
    std::size_t total = 0;
    for (auto n : hist) total += n;
    r.counts["pairs"] = pairs.size();
    r.counts["histogram_total"] = total;

    const fs::path dir(outputs::report_dir);
    r.files.emplace_back(dir / outputs::histogram, histogram_table(hist));

    double mean = 0.0;
    double sd = 0.0;
    std::size_t mode_bin = 0;
    if (!scores.empty()) {
        for (double s : scores) mean += s;
        mean /= static_cast<double>(scores.size());
        for (double s : scores) sd += (s - mean) * (s - mean);
        sd = scores.size() > 1 ? std::sqrt(sd / static_cast<double>(scores.size() - 1)) : 0.0;
        mode_bin = static_cast<std::size_t>(std::max_element(hist.begin(), hist.end()) - hist.begin());
    }
    std::string summary = "statistic\tvalue\n";
    summary += fmt::format("n_pairs\t{}\n", scores.size());
    summary += fmt::format("mean_fidelity\t{:.6f}\n", mean);
    summary += fmt::format("sd_fidelity\t{:.6f}\n", sd);
    summary += fmt::format("modal_bin\t[{:.1f}, {:.1f})\n", static_cast<double>(10 + mode_bin) / 10.0,
                           static_cast<double>(11 + mode_bin) / 10.0);
    r.files.emplace_back(dir / outputs::summary, summary);

    for (auto name : {outputs::coefficients, outputs::coefficients_author_position, outputs::telephone_effects}) {
        const fs::path src = c.output_dir / name;
        if (fs::exists(src)) r.files.emplace_back(dir / name, read_file(src));
    }
    return r;
}

std::vector<Input> stage_inputs(Stage stage, const PipelineConfig& c) {
    std::vector<Input> in;
    auto corpus = [&] { in.push_back({"corpus", require_corpus(c)}); };
    auto from = [&](Stage producer, std::string_view file) {
        in.push_back({std::string(file), require_stage_output(c, stage, producer, file)});
    };
    switch (stage) {
        case Stage::extract:
        case Stage::claims: corpus(); break;
        case Stage::pairs:
            from(Stage::extract, outputs::citations);
            from(Stage::claims, outputs::claims);
            break;
        case Stage::regress:
            corpus();
            from(Stage::extract, outputs::citations);
            from(Stage::pairs, outputs::pairs);
            break;
        case Stage::telephone:
            corpus();
            from(Stage::pairs, outputs::pairs);
            break;
        case Stage::report:
            from(Stage::pairs, outputs::pairs);
            for (auto name : {outputs::coefficients, outputs::coefficients_author_position, outputs::telephone_effects}) {
                if (fs::exists(c.output_dir / name)) in.push_back({std::string(name), c.output_dir / name});
            }
            break;
    }
    return in;
}

bool uses_models(Stage s) { return s == Stage::extract || s == Stage::claims || s == Stage::pairs; }

}  // namespace

RunManifest run_stage(Stage stage, const PipelineConfig& config, const RunOptions& options) {
    config.validate();
    DirectoryLock lock(config.output_dir);

    const auto inputs = stage_inputs(stage, config);
    const Models models = uses_models(stage) ? make_models(config) : Models{};

    ModelId model_id = models.scorer().id();
    if (stage == Stage::extract) model_id = models.background().id();
    if (stage == Stage::claims) model_id = models.discourse().id();
    if (!uses_models(stage)) {
        const fs::path pairs_manifest = manifest_path(config, Stage::pairs);
        if (fs::exists(pairs_manifest)) model_id = RunManifest::from_json(read_file(pairs_manifest)).scorer;
    }

    std::string fingerprint = fmt::format("stage={}\nmodel={}/{}\nschema_mode={}\n", to_string(stage), model_id.name,
                                          model_id.version,
                                          config.schema_mode == SchemaMode::raw_text ? "raw_text" : "sentences");
    if (stage == Stage::regress) fingerprint += "spec=" + load_regression_spec(config).to_text();
    for (const auto& in : inputs) fingerprint += in.label + "=" + sha256_hex(read_file(in.path)) + "\n";
    const std::string digest = sha256_hex(fingerprint);

    const fs::path mpath = manifest_path(config, stage);
    if (!options.force && fs::exists(mpath)) {
        RunManifest previous = RunManifest::from_json(read_file(mpath));
        bool outputs_present = true;
        for (const auto& out : stage_outputs(stage)) outputs_present = outputs_present && fs::exists(config.output_dir / out);
        if (previous.input_digest == digest && outputs_present) {
            previous.reused = true;
            spdlog::info("stage={} unchanged inputs; skipping (use --force to rerun)", to_string(stage));
            return previous;
        }
    }

    RunManifest manifest;
    manifest.stage = std::string(to_string(stage));
    manifest.input_digest = digest;
    manifest.scorer = model_id;
    manifest.started = utc_now();

    StageResult result;
    switch (stage) {
        case Stage::extract: result = run_extract(config, models); break;
        case Stage::claims: result = run_claims(config, models); break;
        case Stage::pairs: result = run_pairs(config, models); break;
        case Stage::regress: result = run_regress(config); break;
        case Stage::telephone: result = run_telephone(config); break;
        case Stage::report: result = run_report(config); break;
    }
    for (const auto& [rel, content] : result.files) write_file_atomic(config.output_dir / rel, content);

    manifest.record_counts = std::move(result.counts);
    manifest.finished = utc_now();
    write_file_atomic(mpath, manifest.to_json());
    log_counts(stage, manifest.record_counts);
    return manifest;
}

}  // namespace citefid
