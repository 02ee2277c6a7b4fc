#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace citefid {

using PaperId = std::string;

enum class PublicationType { review, journal, conference, other };

std::string_view to_string(PublicationType t) noexcept;
std::optional<PublicationType> parse_publication_type(std::string_view s) noexcept;

struct AuthorRef {
    std::string author_id;
    std::optional<int> h_index;  // absent when the source has no author metadata
    int position = 0;

    bool operator==(const AuthorRef&) const = default;
};

struct ReferenceEntry {
    std::string marker_key;
    std::optional<PaperId> cited_paper_id;  // unresolved entries stay for marker lookup

    bool operator==(const ReferenceEntry&) const = default;
};

struct Paper {
    PaperId paper_id;
    std::string title;
    int year = 0;
    std::string field;
    PublicationType publication_type = PublicationType::other;
    bool is_open_access = false;
    std::int64_t citation_count = 0;
    std::vector<AuthorRef> authors;  // byline order, position i at index i
    std::vector<std::string> body_sentences;
    std::vector<ReferenceEntry> references;

    // Bibliography lookup by in-text key; nullptr when absent.
    const ReferenceEntry* find_reference(std::string_view marker_key) const noexcept;

    bool operator==(const Paper&) const = default;
};

enum class SchemaMode { sentences, raw_text };

struct LoadError {
    std::size_t line = 0;  // 1-based
    std::string message;
};

struct LoadStats {
    std::size_t lines = 0;  // non-blank lines seen
    std::size_t loaded = 0;
    std::size_t skipped = 0;
    std::vector<LoadError> errors;
};

struct LoadOptions {
    SchemaMode schema_mode = SchemaMode::sentences;
    unsigned workers = 1;
    std::size_t chunk_lines = 4096;  // lines parsed per parallel round
};

// Parses one corpus record. Throws citefid::Error describing the first problem.
// In sentences mode a record carrying only body_text is still segmented.
Paper parse_paper(std::string_view json_line, SchemaMode mode);

// Canonical single-line form (sorted keys, body_sentences always present).
std::string serialize_paper(const Paper& paper);

// Streams papers to `sink` in file order regardless of worker count. Malformed
// records and duplicate paper_ids are skipped and recorded in the stats.
LoadStats load_corpus(const std::filesystem::path& path, const LoadOptions& options,
                      const std::function<void(Paper&&)>& sink);

// Convenience wrapper collecting everything in memory.
std::vector<Paper> load_corpus(const std::filesystem::path& path, const LoadOptions& options,
                               LoadStats* stats = nullptr);

void write_corpus(const std::filesystem::path& path, const std::vector<Paper>& papers);

}  // namespace citefid
