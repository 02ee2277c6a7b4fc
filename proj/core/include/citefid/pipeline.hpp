#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "citefid/corpus.hpp"
#include "citefid/model_id.hpp"

namespace citefid {

enum class ScorerKind { baseline, remote };

struct PipelineConfig {
    std::filesystem::path corpus_path;
    std::filesystem::path output_dir;
    ScorerKind scorer = ScorerKind::baseline;
    std::optional<std::string> remote_url;
    unsigned workers = 1;
    std::size_t batch_size = 256;
    std::uint64_t seed = 42;
    std::optional<std::filesystem::path> regression_spec_path;
    SchemaMode schema_mode = SchemaMode::sentences;
    std::size_t synthetic_papers = 200;

    // Throws ConfigError when an invariant fails (remote_url iff remote,
    // workers >= 1, batch_size in [1, 256]).
    void validate() const;
};

// Applies "key = value" lines on top of `base`. Unknown keys are errors.
PipelineConfig parse_config_text(std::string_view text, PipelineConfig base = {});
PipelineConfig load_config_file(const std::filesystem::path& path, PipelineConfig base = {});

enum class Stage { extract, claims, pairs, regress, telephone, report };

inline constexpr std::array kAllStages{Stage::extract, Stage::claims,    Stage::pairs,
                                       Stage::regress, Stage::telephone, Stage::report};

std::string_view to_string(Stage s) noexcept;
std::optional<Stage> parse_stage(std::string_view s) noexcept;

struct RunManifest {
    std::string stage;
    std::string input_digest;  // hex SHA-256
    std::map<std::string, std::size_t> record_counts;
    ModelId scorer;
    std::string started;   // UTC ISO-8601
    std::string finished;
    bool reused = false;   // not persisted: true when the run was a no-op

    std::string to_json() const;
    static RunManifest from_json(std::string_view text);
};

struct RunOptions {
    bool force = false;
};

// Runs one stage. Outputs are written via temp file + rename; the manifest
// lands in <output_dir>/manifests/<stage>.json. With identical inputs and no
// `force`, returns the stored manifest without touching outputs.
//
// Throws DependencyError when an input stage has not run, TransportError
// when the remote model service fails its health check, LockError when the
// output directory is busy.
RunManifest run_stage(Stage stage, const PipelineConfig& config, const RunOptions& options = {});

// Output file names inside output_dir.
namespace outputs {
inline constexpr std::string_view citations = "citations.jsonl";
inline constexpr std::string_view claims = "claims.jsonl";
inline constexpr std::string_view pairs = "pairs.jsonl";
inline constexpr std::string_view features = "features.tsv";
inline constexpr std::string_view coefficients = "coefficients.tsv";
inline constexpr std::string_view coefficients_author_position = "coefficients_author_position.tsv";
inline constexpr std::string_view fit = "fit.json";
inline constexpr std::string_view bins = "bins.tsv";
inline constexpr std::string_view matched_pairs = "matched_pairs.jsonl";
inline constexpr std::string_view telephone_effects = "telephone_effects.tsv";
inline constexpr std::string_view report_dir = "report";
inline constexpr std::string_view histogram = "fidelity_histogram.tsv";
inline constexpr std::string_view summary = "summary.tsv";
}  // namespace outputs

// Files a stage writes, relative to output_dir.
std::vector<std::filesystem::path> stage_outputs(Stage stage);

inline constexpr std::size_t kHistogramBins = 40;  // 0.1 wide over [1, 5]

// Bin i covers [1 + i/10, 1 + (i+1)/10); the last bin also holds 5.0. Scores
// outside [1, 5] throw PreconditionError.
std::size_t histogram_bin(double score);
std::array<std::size_t, kHistogramBins> fidelity_histogram(std::span<const double> scores);
std::string histogram_table(const std::array<std::size_t, kHistogramBins>& counts);

// Writes `content` to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string sha256_hex(std::string_view data);

// Exclusive lock on an output directory, held for the object's lifetime.
class DirectoryLock {
public:
    explicit DirectoryLock(const std::filesystem::path& dir);
    ~DirectoryLock();
    DirectoryLock(const DirectoryLock&) = delete;
    DirectoryLock& operator=(const DirectoryLock&) = delete;

private:
    std::filesystem::path lock_path_;
};

}  // namespace citefid
