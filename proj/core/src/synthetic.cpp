#include "citefid/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <set>

#include <fmt/format.h>

#include "citefid/errors.hpp"
#include "citefid/telephone.hpp"

namespace citefid::synthetic {
namespace {

using Rng = std::mt19937_64;

constexpr std::array<std::string_view, 5> kFields{"Physics", "Computer Science", "Biology", "Medicine",
                                                  "Psychology"};
constexpr std::array<std::string_view, 40> kSurnames{
    "Smith",   "Lee",     "Garcia",  "Chen",    "Okafor",  "Novak",   "Silva",   "Tanaka",  "Muller",  "Rossi",
    "Kowal",   "Dubois",  "Ahmed",   "Jensen",  "Ivanova", "Moreau",  "Hughes",  "Park",    "Nguyen",  "Costa",
    "Berg",    "Fischer", "Khan",    "Lopez",   "Sato",    "Brown",   "Wright",  "Specht",  "Olsen",   "Petrov",
    "Haddad",  "Kim",     "Martin",  "Weber",   "Santos",  "Ali",     "Young",   "Walker",  "Reyes",   "Bianchi"};
constexpr std::array<std::string_view, 36> kSubjects{
    "sleep duration",    "gene expression",   "citation count",    "neural activity",   "dopamine release",
    "crystal lattice",   "model accuracy",    "blood pressure",    "reading speed",     "photon yield",
    "protein folding",   "network latency",   "immune response",   "memory recall",     "soil moisture",
    "heart rate",        "battery capacity",  "tumor growth",      "gut microbiota",    "spin coherence",
    "word frequency",    "muscle strength",   "insulin sensitivity", "code review time", "plasma density",
    "social trust",      "antibody titer",    "learning rate",     "cortisol level",    "ice thickness",
    "vaccine uptake",    "query latency",     "enzyme activity",   "attention span",    "grain size",
    "signal noise"};
constexpr std::array<std::string_view, 12> kVerbs{
    "increases", "reduces",  "predicts", "modulates", "improves",   "impairs",
    "doubles",   "stabilizes", "weakens", "amplifies", "correlates with", "depends on"};
constexpr std::array<std::string_view, 24> kContexts{
    "older adults",        "undergraduate students", "mouse models",       "large language models",
    "rural clinics",       "thin films",             "urban schools",      "clinical trials",
    "open source projects", "coastal wetlands",      "intensive care units", "primary schools",
    "transgenic zebrafish", "superconducting qubits", "online forums",     "dairy cattle",
    "shift workers",       "graphene samples",       "twin cohorts",       "mobile networks",
    "pediatric patients",  "alpine lakes",           "retail markets",     "hospital wards"};
constexpr std::array<std::string_view, 16> kQualifiers{
    "under controlled conditions", "after six weeks",        "across three cohorts",   "in a dose dependent manner",
    "at high temperature",        "during the first year",  "in the long term",       "compared with baseline",
    "after adjustment for age",   "in replication samples", "at low concentrations",  "within a single session",
    "over repeated trials",       "in cross sectional data", "across all conditions", "after the intervention"};
constexpr std::array<std::string_view, 12> kFillers{
    "notably", "substantially", "modestly", "reliably", "strongly", "partially",
    "clearly", "consistently", "markedly", "slightly", "largely", "robustly"};
constexpr std::array<std::string_view, 8> kTools{"GROBID", "spaCy", "PyTorch", "Stan", "ImageJ", "FSL", "SciPy",
                                                 "Gephi"};

template <typename C>
std::string pick(Rng& rng, const C& c) {
    std::uniform_int_distribution<std::size_t> d(0, c.size() - 1);
    return std::string(c[d(rng)]);
}

bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// Content of a finding without the discourse cue, e.g.
// "sleep duration reduces memory recall in older adults after six weeks".
struct Finding {
    std::string subject;
    std::string verb;
    std::string object;
    std::string context;
    std::string qualifier;

    std::string text() const { return subject + " " + verb + " " + object + " in " + context + " " + qualifier; }
};

Finding random_finding(Rng& rng, const std::string& topic) {
    Finding f;
    f.subject = chance(rng, 0.6) ? topic : pick(rng, kSubjects);
    f.verb = pick(rng, kVerbs);
    do {
        f.object = pick(rng, kSubjects);
    } while (f.object == f.subject);
    f.context = pick(rng, kContexts);
    f.qualifier = pick(rng, kQualifiers);
    return f;
}

// Rewrites a finding with a random number of substitutions so citing
// sentences span the whole overlap range.
std::string paraphrase(Rng& rng, Finding f) {
    const int edits = uniform_int(rng, 0, 4);
    for (int e = 0; e < edits; ++e) {
        switch (uniform_int(rng, 0, 4)) {
            case 0: f.verb = pick(rng, kVerbs); break;
            case 1: f.context = pick(rng, kContexts); break;
            case 2: f.qualifier = pick(rng, kQualifiers); break;
            case 3: f.object = pick(rng, kSubjects); break;
            default: f.qualifier = pick(rng, kFillers); break;
        }
    }
    std::string out = f.text();
    if (chance(rng, 0.3)) out = pick(rng, kFillers) + " " + out;
    return out;
}

std::string capitalize(std::string s) {
    if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
    return s;
}

std::string claim_sentence(Rng& rng, const Finding& f) {
    switch (uniform_int(rng, 0, 7)) {
        case 0: return "We find that " + f.text() + ".";
        case 1: return "Our results show that " + f.text() + ".";
        case 2: return "In conclusion, " + f.text() + ".";
        case 3: return "Overall, " + f.text() + ".";
        case 4: return "These findings suggest that " + f.text() + ".";
        case 5: return capitalize(f.subject) + " was associated with " + f.object + " in " + f.context + ".";
        case 6: return capitalize(f.subject) + " significantly " + f.verb + " " + f.object + " in " + f.context + ".";
        default: return "We conclude that " + f.text() + ".";
    }
}

std::string other_sentence(Rng& rng, const std::string& topic) {
    switch (uniform_int(rng, 0, 7)) {
        case 0: return "We used " + pick(rng, kTools) + " to process the " + topic + " data.";
        case 1: return "Participants were recruited from " + pick(rng, kContexts) + ".";
        case 2: return capitalize(topic) + " was measured at " + std::to_string(uniform_int(rng, 2, 12)) +
                       " time points.";
        case 3: return "We aim to characterize " + topic + " in " + pick(rng, kContexts) + ".";
        case 4: return "The goal of this study is to examine " + pick(rng, kSubjects) + ".";
        case 5: return capitalize(topic) + " has long been studied in " + pick(rng, kContexts) + ".";
        case 6: return "Many open questions remain about " + pick(rng, kSubjects) + ".";
        default: return "Data collection followed a standard protocol for " + topic + ".";
    }
}

struct Author {
    std::string id;
    std::string surname;
    std::optional<int> h_index;
};

struct Draft {
    Paper paper;
    std::string topic;
    std::vector<Finding> findings;
};

std::string reporting_prefix(Rng& rng) {
    switch (uniform_int(rng, 0, 5)) {
        case 0: return "Past work has shown that ";
        case 1: return "Previous studies found that ";
        case 2: return "Earlier experiments demonstrated that ";
        case 3: return "A recent survey reported that ";
        case 4: return "Prior analyses suggest that ";
        default: return "It has been observed that ";
    }
}

}  // namespace

std::vector<Paper> generate_corpus(const CorpusOptions& options) {
    if (options.n_papers == 0) return {};
    Rng rng(options.seed);

    std::vector<Author> authors;
    for (int i = 0; i < 160; ++i) {
        Author a;
        a.id = fmt::format("au{:04d}", i);
        a.surname = std::string(kSurnames[static_cast<std::size_t>(i) % kSurnames.size()]);
        if (!chance(rng, 0.03)) a.h_index = uniform_int(rng, 0, 90);
        authors.push_back(std::move(a));
    }

    const std::size_t n = options.n_papers;
    std::vector<Draft> drafts(n);
    for (std::size_t i = 0; i < n; ++i) {
        Draft& d = drafts[i];
        Paper& p = d.paper;
        p.paper_id = fmt::format("P{:05d}", i);
        // Older papers first so references always point backwards in time.
        p.year = 1996 + static_cast<int>((i * 15) / n);
        p.field = pick(rng, kFields);
        const int type_roll = uniform_int(rng, 0, 9);
        p.publication_type = type_roll < 5   ? PublicationType::journal
                             : type_roll < 7 ? PublicationType::conference
                             : type_roll < 8 ? PublicationType::review
                                             : PublicationType::other;
        p.is_open_access = chance(rng, 0.45);
        p.citation_count = static_cast<std::int64_t>(std::floor(std::exp(uniform_real(rng, 0.0, 7.0))));
        const int team = uniform_int(rng, 1, 8);
        std::set<std::size_t> chosen;
        while (static_cast<int>(chosen.size()) < team) {
            chosen.insert(static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(authors.size()) - 1)));
        }
        int pos = 0;
        for (auto idx : chosen) p.authors.push_back({authors[idx].id, authors[idx].h_index, pos++});
        std::shuffle(p.authors.begin(), p.authors.end(), rng);
        for (std::size_t k = 0; k < p.authors.size(); ++k) p.authors[k].position = static_cast<int>(k);
        d.topic = pick(rng, kSubjects);
        p.title = capitalize(d.topic) + " in " + pick(rng, kContexts);
        const int n_findings = uniform_int(rng, 4, 8);
        for (int f = 0; f < n_findings; ++f) d.findings.push_back(random_finding(rng, d.topic));
    }

    auto surname_of = [&](const Paper& p) {
        for (const auto& a : authors) {
            if (!p.authors.empty() && a.id == p.authors.front().author_id) return a.surname;
        }
        return std::string("Anon");
    };

    for (std::size_t i = 0; i < n; ++i) {
        Draft& d = drafts[i];
        Paper& p = d.paper;
        const bool author_year = chance(rng, 0.25);

        // Cited papers: random earlier papers, plus one of their references
        // half of the time to create intermediary structures.
        std::vector<std::size_t> cited;
        if (i > 0) {
            const int k = uniform_int(rng, 2, 9);
            std::set<std::size_t> set;
            for (int t = 0; t < k; ++t) {
                // Bias toward a small canon of early papers.
                const std::size_t upper = chance(rng, 0.4) ? std::min<std::size_t>(i, std::max<std::size_t>(1, n / 10)) : i;
                const auto target = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(upper) - 1));
                set.insert(target);
                if (chance(rng, 0.5)) {
                    for (const auto& r : drafts[target].paper.references) {
                        if (r.cited_paper_id && r.cited_paper_id->starts_with("P") && chance(rng, 0.5)) {
                            set.insert(static_cast<std::size_t>(std::stoul(r.cited_paper_id->substr(1))));
                            break;
                        }
                    }
                }
            }
            cited.assign(set.begin(), set.end());
            std::shuffle(cited.begin(), cited.end(), rng);
        }

        std::vector<std::string> citing_sentences;
        std::set<std::string> used_keys;
        auto key_for = [&](const Paper& target, std::size_t ordinal) {
            if (!author_year) return std::to_string(ordinal);
            std::string base = surname_of(target) + " " + std::to_string(target.year);
            std::string key = base;
            for (char suffix = 'a'; used_keys.contains(key); ++suffix) key = base + suffix;
            return key;
        };
        auto marker_text = [&](const std::string& key) {
            if (!author_year) return "[" + key + "]";
            const auto space = key.find(' ');
            const std::string name = key.substr(0, space);
            const std::string year = key.substr(space + 1);
            return chance(rng, 0.5) ? "(" + name + " et al. " + year + ")" : "(" + name + ", " + year + ")";
        };

        std::size_t ordinal = 1;
        std::vector<std::string> keys;
        for (auto target : cited) {
            const Paper& t = drafts[target].paper;
            const std::string key = key_for(t, ordinal++);
            used_keys.insert(key);
            keys.push_back(key);
            p.references.push_back({key, t.paper_id});
            const Draft& td = drafts[target];
            const Finding& f = td.findings[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(td.findings.size()) - 1))];
            const int form = uniform_int(rng, 0, 9);
            if (form < 7) {
                citing_sentences.push_back(reporting_prefix(rng) + paraphrase(rng, f) + " " + marker_text(key) + ".");
            } else if (form == 7) {
                citing_sentences.push_back("We use " + pick(rng, kTools) + " " + marker_text(key) +
                                           ", a commonly used tool for " + td.topic + ".");
            } else if (form == 8) {
                citing_sentences.push_back("The pattern was in accordance with former studies " + marker_text(key) + ".");
            } else {
                citing_sentences.push_back("See " + marker_text(key) + " for a review of " + td.topic + ".");
            }
            // Some references are reported on more than once.
            if (chance(rng, 0.3)) {
                const Finding& g =
                    td.findings[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(td.findings.size()) - 1))];
                citing_sentences.push_back(reporting_prefix(rng) + paraphrase(rng, g) + " " + marker_text(key) + ".");
            }
        }
        if (keys.size() >= 2 && chance(rng, 0.5)) {
            citing_sentences.push_back("Existing studies have examined " + pick(rng, kSubjects) + " " +
                                       marker_text(keys[0]) + " and " + pick(rng, kSubjects) + " " +
                                       marker_text(keys[1]) + ", among others.");
        }
        if (chance(rng, 0.3)) {
            // Bibliography entry the metadata could not resolve.
            const std::string key = author_year ? "Unknown " + std::to_string(p.year - 3) : std::to_string(ordinal++);
            if (!used_keys.contains(key)) {
                used_keys.insert(key);
                p.references.push_back({key, std::nullopt});
                citing_sentences.push_back(reporting_prefix(rng) + paraphrase(rng, random_finding(rng, d.topic)) + " " +
                                           marker_text(key) + ".");
            }
        }
        if (chance(rng, 0.2) && !author_year) {
            const std::string key = std::to_string(ordinal++);
            p.references.push_back({key, fmt::format("EXT{:05d}", uniform_int(rng, 0, 99999))});
        }

        // Own sentences sized so claims are about claim_fraction of the body.
        const std::size_t own = static_cast<std::size_t>(uniform_int(rng, 12, 24));
        const std::size_t total = own + citing_sentences.size();
        const std::size_t n_claims = std::min<std::size_t>(
            own, static_cast<std::size_t>(std::lround(options.claim_fraction * static_cast<double>(total))));
        std::vector<std::string> body;
        for (std::size_t c = 0; c < n_claims; ++c) body.push_back(claim_sentence(rng, d.findings[c % d.findings.size()]));
        for (std::size_t o = n_claims; o < own; ++o) body.push_back(other_sentence(rng, d.topic));
        body.insert(body.end(), citing_sentences.begin(), citing_sentences.end());
        std::shuffle(body.begin(), body.end(), rng);
        p.body_sentences = std::move(body);
    }

    std::vector<Paper> out;
    out.reserve(n);
    for (auto& d : drafts) out.push_back(std::move(d.paper));
    return out;
}

PlantedRegression generate_feature_rows(std::size_t n, double sigma, std::uint64_t seed) {
    static constexpr std::array<std::string_view, 4> fields{"Physics", "Biology", "Computer Science", "Medicine"};
    static constexpr std::array<int, 4> years{2000, 2005, 2010, 2015};
    static constexpr std::array<PublicationType, 4> types{PublicationType::other, PublicationType::journal,
                                                          PublicationType::conference, PublicationType::review};

    PlantedRegression out;
    out.spec = RegressionSpec::main_model();
    auto& beta = out.true_coefficients;
    beta = {{"(Intercept)", 3.2},
            {"Field.of.Study[Biology]", 0.15},
            {"Field.of.Study[Computer Science]", -0.10},
            {"Field.of.Study[Medicine]", 0.12},
            {"Publication.Year[2005]", 0.02},
            {"Publication.Year[2010]", 0.05},
            {"Publication.Year[2015]", 0.08},
            {"Publication.Type[conference]", -0.03},
            {"Publication.Type[journal]", 0.02},
            {"Publication.Type[review]", -0.05},
            {"Open.Access", 0.05},
            {"Context.Length", 0.001},
            {"Reference.Frequency", 0.02},
            {"Publication.Interval", -0.01},
            {"Paper.Citation", -0.00002},
            {"Author.Seniority", -0.002},
            {"Team.Size", 0.01},
            {"Self.Citation", 0.10},
            {"Within.Field", 0.08}};

    Rng design(seed);
    Rng noise(seed ^ 0x9E3779B97F4A7C15ULL);
    std::normal_distribution<double> z(0.0, 1.0);
    out.rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        FeatureRow r;
        const std::string field(fields[static_cast<std::size_t>(uniform_int(design, 0, 3))]);
        r.field_of_study = field;
        r.publication_year = years[static_cast<std::size_t>(uniform_int(design, 0, 3))];
        r.publication_type = types[static_cast<std::size_t>(uniform_int(design, 0, 3))];
        r.open_access = chance(design, 0.4);
        r.context_length = uniform_int(design, 40, 400);
        r.reference_frequency = uniform_int(design, 1, 6);
        r.publication_interval = uniform_int(design, 0, 30);
        r.paper_citation = std::floor(std::exp(uniform_real(design, 0.0, 8.0)));
        r.author_seniority = uniform_int(design, 0, 80);
        r.team_size = uniform_int(design, 1, 15);
        r.self_citation = chance(design, 0.15);
        r.within_field = chance(design, 0.6);
        r.first_author_seniority = uniform_int(design, 0, 40);
        r.last_author_seniority = uniform_int(design, 0, 80);

        double y = beta.at("(Intercept)");
        if (field != "Physics") y += beta.at("Field.of.Study[" + field + "]");
        if (r.publication_year != 2000) y += beta.at(fmt::format("Publication.Year[{}]", r.publication_year));
        if (r.publication_type != PublicationType::other) {
            y += beta.at(fmt::format("Publication.Type[{}]", to_string(r.publication_type)));
        }
        y += beta.at("Open.Access") * (r.open_access ? 1.0 : 0.0);
        y += beta.at("Context.Length") * r.context_length;
        y += beta.at("Reference.Frequency") * r.reference_frequency;
        y += beta.at("Publication.Interval") * r.publication_interval;
        y += beta.at("Paper.Citation") * r.paper_citation;
        y += beta.at("Author.Seniority") * *r.author_seniority;
        y += beta.at("Team.Size") * r.team_size;
        y += beta.at("Self.Citation") * (r.self_citation ? 1.0 : 0.0);
        y += beta.at("Within.Field") * (r.within_field ? 1.0 : 0.0);
        r.fidelity = y + sigma * z(noise);
        out.rows.push_back(std::move(r));
    }
    return out;
}

TelephoneDataset generate_telephone_dataset(const TelephoneOptions& o) {
    static constexpr std::array<std::string_view, 4> fields{"Physics", "Biology", "Computer Science", "Medicine"};
    static constexpr std::size_t kClaims = 6;
    static constexpr std::size_t kIntermediaries = 3;

    Rng rng(o.seed);
    std::normal_distribution<double> noise(0.0, o.noise_sd);
    const ScorerId sid{"synthetic-planted", "1"};

    TelephoneDataset ds;
    auto add_paper = [&](const std::string& id, int year, const std::string& field,
                         const std::vector<std::string>& cites) -> Paper& {
        Paper p;
        p.paper_id = id;
        p.title = id;
        p.year = year;
        p.field = field;
        p.authors.push_back({"au-" + id, 10, 0});
        for (std::size_t k = 0; k < cites.size(); ++k) p.references.push_back({std::to_string(k + 1), cites[k]});
        p.body_sentences.assign(kClaims, "placeholder.");
        return ds.papers[id] = std::move(p);
    };
    auto record = [&](const std::string& citing, const std::string& cited, std::size_t claim, double fidelity) {
        ds.records.push_back({citing, 0, cited, claim, FidelityScore(std::clamp(fidelity, 1.0, 5.0)), kClaims, sid});
    };
    auto offset_for = [&](Stratum s) {
        return s == Stratum::low ? o.low_offset : s == Stratum::high ? o.high_offset : o.medium_offset;
    };

    for (std::size_t ai = 0; ai < o.n_originals; ++ai) {
        const std::string a = fmt::format("A{:05d}", ai);
        add_paper(a, 2000, pick(rng, fields), {});

        std::vector<std::string> bs;
        std::vector<double> b_fid;
        for (std::size_t bi = 0; bi < kIntermediaries; ++bi) {
            const std::string b = fmt::format("B{:05d}-{}", ai, bi);
            add_paper(b, 2003, pick(rng, fields), {a});
            const int stratum_roll = uniform_int(rng, 0, 2);
            const double f = stratum_roll == 0   ? uniform_real(rng, 1.5, 2.9)
                             : stratum_roll == 1 ? uniform_real(rng, 3.0, 4.0)
                                                 : uniform_real(rng, 4.1, 4.9);
            record(b, a, static_cast<std::size_t>(uniform_int(rng, 0, kClaims - 1)), f);
            bs.push_back(b);
            b_fid.push_back(f);
        }
        // Cites A but has no scored record: makes citers of X impure controls.
        const std::string x = fmt::format("X{:05d}", ai);
        add_paper(x, 2003, pick(rng, fields), {a});

        for (std::size_t ci = 0; ci < o.treated_per_original; ++ci) {
            const std::size_t b_idx = ci % kIntermediaries;
            const int year = uniform_int(rng, 2005, 2014);
            const std::string field = pick(rng, fields);
            const auto claim = static_cast<std::size_t>(uniform_int(rng, 0, kClaims - 1));

            const std::string c = fmt::format("C{:05d}-{:02d}", ai, ci);
            add_paper(c, year, field, {a, bs[b_idx]});
            const double treated = o.control_mean + o.treatment_effect + offset_for(stratum_for(b_fid[b_idx])) + noise(rng);
            record(c, a, claim, treated);

            const std::string d = fmt::format("D{:05d}-{:02d}", ai, ci);
            add_paper(d, year, field, {a});
            record(d, a, claim, o.control_mean + noise(rng));

            // Decoys that must never be chosen as controls for this C.
            std::string other_field = field;
            while (other_field == field) other_field = pick(rng, fields);
            const std::string e = fmt::format("E{:05d}-{:02d}", ai, ci);
            add_paper(e, year, other_field, {a});
            record(e, a, claim, o.control_mean + noise(rng));

            const std::string f = fmt::format("F{:05d}-{:02d}", ai, ci);
            add_paper(f, year, field, {a, x});
            record(f, a, claim, o.control_mean + noise(rng));
        }
    }

    std::vector<Paper> list;
    list.reserve(ds.papers.size());
    for (const auto& [_, p] : ds.papers) list.push_back(p);
    ds.graph = build_citation_graph(list);
    return ds;
}

}  // namespace citefid::synthetic
