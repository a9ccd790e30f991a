#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polyglot_forge/pipeline.hpp"

namespace pf = polyglot_forge;
namespace pl = polyglot_forge::pipeline;

int main(int argc, char** argv) {
    CLI::App app{"polyglot-forge: multilingual corpus pipeline"};
    app.set_version_flag("--version", std::string("polyglot-forge ") + std::string(pf::kToolVersion));

    std::string command;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    std::optional<std::string> output_dir;
    std::vector<std::string> inputs;
    std::string kind = "bi";
    pl::RunOptions opts;

    app.add_option("command", command, "ingest | clean | dedup | stats | codefilter | mix | chunk | report | all")
        ->required()
        ->check(CLI::IsMember({"ingest", "clean", "dedup", "stats", "codefilter", "mix", "chunk", "report", "all"}));
    app.add_option("--config", config_path, "JSON pipeline configuration")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "sampling seed (overrides config)");
    app.add_option("--threads", threads, "worker threads; falls back to POLYGLOT_FORGE_THREADS")->check(CLI::PositiveNumber);
    app.add_option("--output-dir", output_dir, "root directory for stage artifacts");
    app.add_option("--input", inputs, "explicit input file(s) instead of the previous stage's output")->check(CLI::ExistingFile);
    app.add_option("--kind", kind, "record kind of --input files")->check(CLI::IsMember({"mono", "bi"}));
    app.add_flag("--plan-only", opts.plan_only, "mix: print the plan table without sampling");
    app.add_flag("--strict-listing", opts.strict_listing, "chunk: put a space before every line break");
    app.add_flag("--drop-remainder", opts.drop_remainder, "chunk: drop a trailing document with fewer than ten pairs");
    app.add_flag("--audit-drops", opts.audit_drops, "clean: also write every dropped record with its reason");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? pl::kOk : pl::kValidationError;
    }

    pl::PipelineConfig cfg;
    try {
        if (!config_path.empty()) cfg = pl::load_config(config_path);
    } catch (const pl::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return pl::kValidationError;
    }
    if (seed) cfg.seed = *seed;
    if (threads) {
        cfg.threads = *threads;
    } else if (const char* env = std::getenv("POLYGLOT_FORGE_THREADS"); env != nullptr && *env != '\0') {
        try {
            const auto n = std::stoul(env);
            if (n == 0) throw std::invalid_argument("zero");
            cfg.threads = n;
        } catch (const std::exception&) {
            std::cerr << "error: POLYGLOT_FORGE_THREADS must be a positive integer\n";
            return pl::kValidationError;
        }
    }
    if (output_dir) cfg.output_dir = *output_dir;
    for (const auto& p : inputs) opts.inputs.emplace_back(p);
    opts.input_kind = *pf::parse_record_kind(kind);

    return pl::run(*pl::parse_stage(command), cfg, opts);
}
