#include "citefid/records.hpp"

#include <fstream>

#include <json.hpp>

#include "citefid/errors.hpp"
#include "citefid/text.hpp"

namespace citefid::records {

using nlohmann::json;

namespace {

json parse_object(std::string_view line) {
    try {
        json j = json::parse(line);
        if (!j.is_object()) throw Error("record is not a JSON object");
        return j;
    } catch (const json::exception& e) {
        throw Error(std::string("malformed record: ") + e.what());
    }
}

template <typename T>
T get(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw Error(std::string("record lacks '") + key + "'");
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw Error(std::string("record field '") + key + "' has the wrong type");
    }
}

template <typename T, typename Parse>
std::vector<T> read_lines(const std::filesystem::path& path, Parse parse) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::vector<T> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        try {
            out.push_back(parse(line));
        } catch (const Error& e) {
            throw Error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace

std::string to_line(const CitationInstance& c) {
    return json{{"citing_paper_id", c.citing_paper_id},
                {"sentence_index", c.sentence_index},
                {"sentence_text", c.sentence_text},
                {"cited_paper_id", c.cited_paper_id},
                {"marker_span", {c.marker.start, c.marker.end}},
                {"marker_style", std::string(to_string(c.marker.style))},
                {"marker_keys", c.marker.keys},
                {"background_confidence", c.background_confidence}}
        .dump();
}

std::string to_line(const ClaimSentence& c) {
    return json{{"paper_id", c.paper_id},
                {"sentence_index", c.sentence_index},
                {"sentence_text", c.sentence_text},
                {"category", std::string(to_string(c.category))},
                {"confidence", c.confidence}}
        .dump();
}

std::string to_line(const PairRecord& p) {
    return json{{"citing_paper_id", p.citing_paper_id},
                {"citing_sentence_index", p.citing_sentence_index},
                {"cited_paper_id", p.cited_paper_id},
                {"matched_claim_index", p.matched_claim_index},
                {"fidelity", p.fidelity.value()},
                {"n_candidates", p.n_candidates},
                {"scorer", {{"name", p.scorer.name}, {"version", p.scorer.version}}}}
        .dump();
}

std::string to_line(const MatchedPair& m) {
    const auto& t = m.triple;
    return json{{"original_a", t.original_a},
                {"intermediary_b", t.intermediary_b},
                {"treated_c", t.treated_c},
                {"control_d", m.control_d},
                {"matched_claim_index", t.c_to_a.matched_claim_index},
                {"c_to_a_fidelity", t.c_to_a.fidelity.value()},
                {"b_to_a_fidelity", t.b_to_a.fidelity.value()},
                {"d_to_a_fidelity", m.d_to_a.fidelity.value()},
                {"c_sentence_index", t.c_to_a.citing_sentence_index},
                {"b_sentence_index", t.b_to_a.citing_sentence_index},
                {"d_sentence_index", m.d_to_a.citing_sentence_index},
                {"stratum", std::string(to_string(t.b_fidelity_stratum))}}
        .dump();
}

CitationInstance parse_citation(std::string_view line) {
    const json j = parse_object(line);
    CitationInstance c;
    c.citing_paper_id = get<std::string>(j, "citing_paper_id");
    c.sentence_index = get<std::size_t>(j, "sentence_index");
    c.sentence_text = get<std::string>(j, "sentence_text");
    c.cited_paper_id = get<std::string>(j, "cited_paper_id");
    const auto span = get<std::vector<std::size_t>>(j, "marker_span");
    if (span.size() != 2 || span[0] >= span[1]) throw Error("marker_span must be [start, end] with start < end");
    c.marker.start = span[0];
    c.marker.end = span[1];
    const auto style = parse_marker_style(get<std::string>(j, "marker_style"));
    if (!style) throw Error("unknown marker_style");
    c.marker.style = *style;
    if (j.contains("marker_keys")) c.marker.keys = get<std::vector<std::string>>(j, "marker_keys");
    c.background_confidence = get<double>(j, "background_confidence");
    c.is_background = true;
    return c;
}

ClaimSentence parse_claim(std::string_view line) {
    const json j = parse_object(line);
    ClaimSentence c;
    c.paper_id = get<std::string>(j, "paper_id");
    c.sentence_index = get<std::size_t>(j, "sentence_index");
    c.sentence_text = get<std::string>(j, "sentence_text");
    const auto cat = parse_discourse_category(get<std::string>(j, "category"));
    if (!cat) throw Error("unknown discourse category");
    c.category = *cat;
    c.confidence = get<double>(j, "confidence");
    return c;
}

PairRecord parse_pair(std::string_view line) {
    const json j = parse_object(line);
    PairRecord p;
    p.citing_paper_id = get<std::string>(j, "citing_paper_id");
    p.citing_sentence_index = get<std::size_t>(j, "citing_sentence_index");
    p.cited_paper_id = get<std::string>(j, "cited_paper_id");
    p.matched_claim_index = get<std::size_t>(j, "matched_claim_index");
    p.fidelity = FidelityScore(get<double>(j, "fidelity"));
    p.n_candidates = get<std::size_t>(j, "n_candidates");
    const json scorer = get<json>(j, "scorer");
    p.scorer = {get<std::string>(scorer, "name"), get<std::string>(scorer, "version")};
    return p;
}

std::vector<CitationInstance> read_citations(const std::filesystem::path& path) {
    return read_lines<CitationInstance>(path, parse_citation);
}

std::vector<ClaimSentence> read_claims(const std::filesystem::path& path) {
    return read_lines<ClaimSentence>(path, parse_claim);
}

std::vector<PairRecord> read_pairs(const std::filesystem::path& path) {
    return read_lines<PairRecord>(path, parse_pair);
}

}  // namespace citefid::records
