#include "citefid/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <variant>

#include <json.hpp>

#include "citefid/errors.hpp"
#include "citefid/parallel.hpp"
#include "citefid/segment.hpp"
#include "citefid/text.hpp"

namespace citefid {

using nlohmann::json;

std::string_view to_string(PublicationType t) noexcept {
    switch (t) {
        case PublicationType::review: return "review";
        case PublicationType::journal: return "journal";
        case PublicationType::conference: return "conference";
        case PublicationType::other: return "other";
    }
    return "other";
}

std::optional<PublicationType> parse_publication_type(std::string_view s) noexcept {
    const std::string l = text::lower(s);
    if (l == "review") return PublicationType::review;
    if (l == "journal") return PublicationType::journal;
    if (l == "conference") return PublicationType::conference;
    if (l == "other") return PublicationType::other;
    return std::nullopt;
}

const ReferenceEntry* Paper::find_reference(std::string_view marker_key) const noexcept {
    for (const auto& r : references) {
        if (r.marker_key == marker_key) return &r;
    }
    return nullptr;
}

namespace {

const json& require(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) throw Error(std::string("missing required field '") + key + "'");
    return *it;
}

template <typename T>
T require_as(const json& obj, const char* key) {
    const json& v = require(obj, key);
    try {
        if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw Error("");
        } else if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw Error("");
        } else {
            if (!v.is_number_integer()) throw Error("");
        }
        return v.get<T>();
    } catch (const std::exception&) {
        throw Error(std::string("field '") + key + "' has the wrong type");
    }
}

std::string read_field(const json& obj) {
    const json& v = require(obj, "field");
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array() && !v.empty() && v.front().is_string()) return v.front().get<std::string>();
    throw Error("field 'field' must be a string or a non-empty list of strings");
}

std::vector<AuthorRef> read_authors(const json& obj) {
    const json& arr = require(obj, "authors");
    if (!arr.is_array()) throw Error("field 'authors' must be a list");
    std::vector<AuthorRef> authors;
    authors.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const json& a = arr[i];
        if (!a.is_object()) throw Error("author entries must be objects");
        AuthorRef ref;
        ref.author_id = require_as<std::string>(a, "author_id");
        if (auto h = a.find("h_index"); h != a.end() && !h->is_null()) {
            if (!h->is_number_integer() || h->get<long long>() < 0) throw Error("h_index must be an integer >= 0");
            ref.h_index = h->get<int>();
        }
        if (auto p = a.find("position"); p != a.end() && !p->is_null()) {
            if (!p->is_number_integer()) throw Error("author position must be an integer");
            ref.position = p->get<int>();
        } else {
            ref.position = static_cast<int>(i);
        }
        authors.push_back(std::move(ref));
    }
    std::stable_sort(authors.begin(), authors.end(),
                     [](const AuthorRef& l, const AuthorRef& r) { return l.position < r.position; });
    for (std::size_t i = 0; i < authors.size(); ++i) {
        if (authors[i].position != static_cast<int>(i)) {
            throw Error("author positions must be 0..n-1 without gaps");
        }
    }
    return authors;
}

std::vector<ReferenceEntry> read_references(const json& obj) {
    const json& arr = require(obj, "references");
    if (!arr.is_array()) throw Error("field 'references' must be a list");
    std::vector<ReferenceEntry> refs;
    refs.reserve(arr.size());
    std::set<std::string> seen;
    for (const json& r : arr) {
        if (!r.is_object()) throw Error("reference entries must be objects");
        ReferenceEntry entry;
        entry.marker_key = require_as<std::string>(r, "marker_key");
        if (auto c = r.find("cited_paper_id"); c != r.end() && !c->is_null()) {
            if (!c->is_string()) throw Error("cited_paper_id must be a string or null");
            entry.cited_paper_id = c->get<std::string>();
        }
        if (!seen.insert(entry.marker_key).second) {
            throw Error("duplicate reference marker_key '" + entry.marker_key + "'");
        }
        refs.push_back(std::move(entry));
    }
    return refs;
}

std::vector<std::string> read_body(const json& obj, SchemaMode mode) {
    auto sentences = obj.find("body_sentences");
    auto raw = obj.find("body_text");
    const bool has_sentences = sentences != obj.end() && !sentences->is_null();
    const bool has_raw = raw != obj.end() && !raw->is_null();
    const bool use_raw = has_raw && (mode == SchemaMode::raw_text || !has_sentences);
    if (use_raw) {
        if (!raw->is_string()) throw Error("field 'body_text' must be a string");
        return segment_sentences(raw->get_ref<const std::string&>());
    }
    if (!has_sentences) throw Error("missing required field 'body_sentences' or 'body_text'");
    if (!sentences->is_array()) throw Error("field 'body_sentences' must be a list");
    std::vector<std::string> body;
    body.reserve(sentences->size());
    for (const json& s : *sentences) {
        if (!s.is_string()) throw Error("body_sentences entries must be strings");
        body.push_back(s.get<std::string>());
    }
    return body;
}

}  // namespace

Paper parse_paper(std::string_view json_line, SchemaMode mode) {
    json obj;
    try {
        obj = json::parse(json_line);
    } catch (const json::parse_error& e) {
        throw Error(std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) throw Error("record is not a JSON object");

    Paper p;
    p.paper_id = require_as<std::string>(obj, "paper_id");
    if (p.paper_id.empty()) throw Error("paper_id must be non-empty");
    if (auto t = obj.find("title"); t != obj.end() && t->is_string()) p.title = t->get<std::string>();
    p.year = require_as<int>(obj, "year");
    if (p.year < 1500 || p.year > 2100) throw Error("year out of range [1500, 2100]");
    p.field = read_field(obj);
    const auto type = parse_publication_type(require_as<std::string>(obj, "publication_type"));
    if (!type) throw Error("unknown publication_type");
    p.publication_type = *type;
    p.is_open_access = require_as<bool>(obj, "is_open_access");
    p.citation_count = require_as<std::int64_t>(obj, "citation_count");
    if (p.citation_count < 0) throw Error("citation_count must be >= 0");
    p.authors = read_authors(obj);
    p.body_sentences = read_body(obj, mode);
    p.references = read_references(obj);
    return p;
}

std::string serialize_paper(const Paper& paper) {
    json authors = json::array();
    for (const auto& a : paper.authors) {
        authors.push_back({{"author_id", a.author_id},
                           {"h_index", a.h_index ? json(*a.h_index) : json(nullptr)},
                           {"position", a.position}});
    }
    json refs = json::array();
    for (const auto& r : paper.references) {
        refs.push_back({{"marker_key", r.marker_key},
                        {"cited_paper_id", r.cited_paper_id ? json(*r.cited_paper_id) : json(nullptr)}});
    }
    json obj = {
        {"paper_id", paper.paper_id},
        {"title", paper.title},
        {"year", paper.year},
        {"field", paper.field},
        {"publication_type", std::string(to_string(paper.publication_type))},
        {"is_open_access", paper.is_open_access},
        {"citation_count", paper.citation_count},
        {"authors", std::move(authors)},
        {"body_sentences", paper.body_sentences},
        {"references", std::move(refs)},
    };
    return obj.dump();
}

LoadStats load_corpus(const std::filesystem::path& path, const LoadOptions& options,
                      const std::function<void(Paper&&)>& sink) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open corpus file '" + path.string() + "'");

    LoadStats stats;
    std::set<PaperId> seen_ids;
    using Parsed = std::variant<Paper, std::string>;

    std::vector<std::string> lines;
    std::vector<std::size_t> line_numbers;
    std::size_t line_no = 0;
    const std::size_t chunk = std::max<std::size_t>(1, options.chunk_lines);

    auto drain = [&] {
        std::vector<Parsed> parsed(lines.size());
        parallel_for(lines.size(), options.workers, [&](std::size_t i) {
            try {
                parsed[i] = parse_paper(lines[i], options.schema_mode);
            } catch (const std::exception& e) {
                parsed[i] = std::string(e.what());
            }
        });
        for (std::size_t i = 0; i < parsed.size(); ++i) {
            if (auto* err = std::get_if<std::string>(&parsed[i])) {
                ++stats.skipped;
                stats.errors.push_back({line_numbers[i], std::move(*err)});
                continue;
            }
            auto& paper = std::get<Paper>(parsed[i]);
            if (!seen_ids.insert(paper.paper_id).second) {
                ++stats.skipped;
                stats.errors.push_back({line_numbers[i], "duplicate paper_id '" + paper.paper_id + "'"});
                continue;
            }
            ++stats.loaded;
            sink(std::move(paper));
        }
        lines.clear();
        line_numbers.clear();
    };

    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty()) continue;
        ++stats.lines;
        lines.push_back(std::move(line));
        line_numbers.push_back(line_no);
        if (lines.size() >= chunk) drain();
    }
    drain();
    return stats;
}

std::vector<Paper> load_corpus(const std::filesystem::path& path, const LoadOptions& options,
                               LoadStats* stats) {
    std::vector<Paper> papers;
    LoadStats s = load_corpus(path, options, [&](Paper&& p) { papers.push_back(std::move(p)); });
    if (stats) *stats = std::move(s);
    return papers;
}

void write_corpus(const std::filesystem::path& path, const std::vector<Paper>& papers) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write corpus file '" + path.string() + "'");
    for (const auto& p : papers) out << serialize_paper(p) << '\n';
}

}  // namespace citefid
