// citefid: command-line driver for the citation-fidelity pipeline.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "citefid/errors.hpp"
#include "citefid/pipeline.hpp"
#include "citefid/synthetic.hpp"

namespace {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfig = 2, kDependency = 3, kTransport = 4 };

struct Flags {
    std::optional<std::string> config;
    std::optional<std::string> corpus;
    std::optional<std::string> out;
    std::optional<std::string> scorer;
    std::optional<std::string> remote_url;
    std::optional<unsigned> workers;
    std::optional<std::size_t> batch_size;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> papers;
    bool force = false;
    bool quiet = false;
};

citefid::PipelineConfig resolve_config(const Flags& f) {
    citefid::PipelineConfig c;
    if (f.config) c = citefid::load_config_file(*f.config);
    if (f.corpus) c.corpus_path = *f.corpus;
    if (f.out) c.output_dir = *f.out;
    if (f.scorer) {
        if (*f.scorer == "baseline") {
            c.scorer = citefid::ScorerKind::baseline;
        } else if (*f.scorer == "remote") {
            c.scorer = citefid::ScorerKind::remote;
        } else {
            throw citefid::ConfigError("--scorer must be baseline or remote");
        }
    }
    if (f.remote_url) c.remote_url = *f.remote_url;
    if (f.workers) c.workers = *f.workers;
    if (f.batch_size) c.batch_size = *f.batch_size;
    if (f.seed) c.seed = *f.seed;
    if (f.papers) c.synthetic_papers = *f.papers;
    return c;
}

int gen_synthetic(const citefid::PipelineConfig& c) {
    if (c.output_dir.empty()) throw citefid::ConfigError("gen-synthetic needs --out");
    if (c.synthetic_papers == 0) throw citefid::ConfigError("--papers must be positive");
    const auto papers = citefid::synthetic::generate_corpus({c.synthetic_papers, c.seed});
    const auto path = c.output_dir / "corpus.jsonl";
    std::filesystem::create_directories(c.output_dir);
    citefid::write_corpus(path, papers);
    spdlog::info("stage=gen-synthetic papers={} seed={} path={}", papers.size(), c.seed, path.string());
    std::cout << path.string() << "\n";
    return kOk;
}

int run(const std::string& command, const Flags& flags) {
    const auto config = resolve_config(flags);
    if (command == "gen-synthetic") return gen_synthetic(config);
    const auto stage = citefid::parse_stage(command);
    if (!stage) throw citefid::ConfigError("unknown subcommand '" + command + "'");
    const auto manifest = citefid::run_stage(*stage, config, {flags.force});
    std::cout << manifest.stage << (manifest.reused ? " reused" : " done");
    for (const auto& [k, v] : manifest.record_counts) std::cout << ' ' << k << '=' << v;
    std::cout << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"citefid: citation fidelity pipeline"};
    app.require_subcommand(1);
    Flags flags;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config, "key = value configuration file");
        sub->add_option("--corpus", flags.corpus, "corpus JSONL path");
        sub->add_option("--out", flags.out, "output directory");
        sub->add_option("--scorer", flags.scorer, "baseline or remote");
        sub->add_option("--remote-url", flags.remote_url, "model service base URL");
        sub->add_option("--workers", flags.workers, "worker threads");
        sub->add_option("--batch-size", flags.batch_size, "scoring batch size (1..256)");
        sub->add_option("--seed", flags.seed, "seed for synthetic generators");
        sub->add_flag("--force", flags.force, "rerun even when inputs are unchanged");
        sub->add_flag("-q,--quiet", flags.quiet, "only log warnings and errors");
    };

    std::string command;
    for (auto name : {"extract", "claims", "pairs", "regress", "telephone", "report"}) {
        auto* sub = app.add_subcommand(name, std::string("run the ") + name + " stage");
        add_common(sub);
        sub->callback([&command, name] { command = name; });
    }
    auto* gen = app.add_subcommand("gen-synthetic", "write a seeded synthetic corpus to <out>/corpus.jsonl");
    add_common(gen);
    gen->add_option("--papers", flags.papers, "number of papers");
    gen->callback([&command] { command = "gen-synthetic"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    auto logger = spdlog::stderr_color_mt("citefid");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("%Y-%m-%dT%H:%M:%S.%e %^%l%$ %v");
    if (flags.quiet) spdlog::set_level(spdlog::level::warn);

    try {
        return run(command, flags);
    } catch (const citefid::ConfigError& e) {
        spdlog::error("configuration: {}", e.what());
        return kConfig;
    } catch (const citefid::DependencyError& e) {
        spdlog::error("dependency: {}", e.what());
        return kDependency;
    } catch (const citefid::TransportError& e) {
        spdlog::error("transport: {}", e.what());
        return kTransport;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kFailure;
    }
}
