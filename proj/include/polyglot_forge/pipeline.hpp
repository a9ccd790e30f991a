#pragma once

// Stage orchestration behind the command-line tool.
//
// Every stage reads JSONL from its predecessor's directory under output_dir
// (or from explicit --input files), writes its artifacts next to a
// manifest.json, and never depends on thread scheduling: batches are parsed
// and filtered in parallel, then written and indexed in input order.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "polyglot_forge/bidoc.hpp"
#include "polyglot_forge/census.hpp"
#include "polyglot_forge/cleanse.hpp"
#include "polyglot_forge/code_filter.hpp"
#include "polyglot_forge/corpus_model.hpp"
#include "polyglot_forge/digest.hpp"
#include "polyglot_forge/langid.hpp"
#include "polyglot_forge/mixer.hpp"
#include "polyglot_forge/parallel.hpp"
#include "polyglot_forge/script_detect.hpp"
#include "polyglot_forge/version.hpp"

namespace polyglot_forge::pipeline {

namespace fs = std::filesystem;

enum class Stage { ingest, clean, dedup, stats, codefilter, mix, chunk, report, all };

inline std::string_view to_string(Stage s) {
    switch (s) {
        case Stage::ingest:
            return "ingest";
        case Stage::clean:
            return "clean";
        case Stage::dedup:
            return "dedup";
        case Stage::stats:
            return "stats";
        case Stage::codefilter:
            return "codefilter";
        case Stage::mix:
            return "mix";
        case Stage::chunk:
            return "chunk";
        case Stage::report:
            return "report";
        case Stage::all:
            break;
    }
    return "all";
}

inline std::optional<Stage> parse_stage(std::string_view s) {
    for (auto st : {Stage::ingest, Stage::clean, Stage::dedup, Stage::stats, Stage::codefilter, Stage::mix, Stage::chunk, Stage::report,
                    Stage::all}) {
        if (to_string(st) == s) return st;
    }
    return std::nullopt;
}

enum ExitCode : int { kOk = 0, kValidationError = 1, kDataError = 2 };

// ---------------------------------------------------------------------------
// Configuration

enum class InputFormat { jsonl, tsv, text };

struct InputSpec {
    fs::path path;
    RecordKind kind = RecordKind::bi;
    InputFormat format = InputFormat::jsonl;
    std::string collection;
    std::string source;
    // Dataset-level language denotations; per-line fields are used when absent.
    std::optional<std::string> lang;
    std::optional<std::string> src_lang;
    std::optional<std::string> tgt_lang;
};

struct PipelineConfig {
    std::vector<InputSpec> inputs;
    std::vector<fs::path> code_inputs;
    CleanConfig clean;
    CodeFilterRules code_rules;
    std::vector<MixInputRow> mix;
    DatasetScriptOptions script;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    fs::path output_dir = "polyglot_out";
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> problems)
        : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

    const std::vector<std::string>& problems() const { return problems_; }

private:
    static std::string join(const std::vector<std::string>& p) {
        std::string out = "invalid configuration:";
        for (const auto& s : p) out += "\n  " + s;
        return out;
    }
    std::vector<std::string> problems_;
};

namespace detail {

class Problems {
public:
    void add(std::string key, std::string what) { list_.push_back(std::move(key) + ": " + std::move(what)); }
    bool empty() const { return list_.empty(); }
    std::vector<std::string>& list() { return list_; }

private:
    std::vector<std::string> list_;
};

inline void check_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& prefix, Problems& problems) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.contains(it.key())) problems.add(prefix + it.key(), "unknown key");
    }
}

inline std::optional<std::string> get_string(const Json& obj, const char* key, const std::string& prefix, Problems& problems,
                                             bool required) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        if (required) problems.add(prefix + key, "missing required key");
        return std::nullopt;
    }
    if (!it->is_string()) {
        problems.add(prefix + key, "must be a string");
        return std::nullopt;
    }
    return it->get<std::string>();
}

inline std::optional<std::uint64_t> get_uint(const Json& obj, const char* key, const std::string& prefix, Problems& problems) {
    const auto it = obj.find(key);
    if (it == obj.end()) return std::nullopt;
    if (!it->is_number_unsigned()) {
        problems.add(prefix + key, "must be a non-negative integer");
        return std::nullopt;
    }
    return it->get<std::uint64_t>();
}

inline std::optional<double> get_number(const Json& obj, const char* key, const std::string& prefix, Problems& problems) {
    const auto it = obj.find(key);
    if (it == obj.end()) return std::nullopt;
    if (!it->is_number()) {
        problems.add(prefix + key, "must be a number");
        return std::nullopt;
    }
    return it->get<double>();
}

inline fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    if (path.is_relative() && !base.empty()) path = base / path;
    return path.lexically_normal();
}

}  // namespace detail

/// Validates and converts a JSON config. Relative paths resolve against
/// `base_dir`. Throws ConfigError listing every offending key.
inline PipelineConfig config_from_json(const Json& j, const fs::path& base_dir = {}) {
    detail::Problems problems;
    PipelineConfig cfg;
    if (!j.is_object()) throw ConfigError({"<root>: config must be a JSON object"});
    detail::check_keys(j, {"inputs", "code_inputs", "clean", "code_rules", "mix", "script", "seed", "threads", "output_dir"}, "",
                       problems);

    if (const auto it = j.find("inputs"); it != j.end()) {
        if (!it->is_array()) {
            problems.add("inputs", "must be an array");
        } else {
            for (std::size_t i = 0; i < it->size(); ++i) {
                const auto& e = (*it)[i];
                const std::string prefix = "inputs[" + std::to_string(i) + "].";
                if (!e.is_object()) {
                    problems.add(prefix.substr(0, prefix.size() - 1), "must be an object");
                    continue;
                }
                detail::check_keys(e, {"path", "kind", "format", "collection", "source", "lang", "src_lang", "tgt_lang"}, prefix,
                                   problems);
                InputSpec spec;
                if (auto p = detail::get_string(e, "path", prefix, problems, true)) {
                    spec.path = detail::resolve(base_dir, *p);
                    if (!fs::exists(spec.path)) problems.add(prefix + "path", "file does not exist: " + spec.path.string());
                }
                if (auto k = detail::get_string(e, "kind", prefix, problems, true)) {
                    if (auto kind = parse_record_kind(*k)) {
                        spec.kind = *kind;
                    } else {
                        problems.add(prefix + "kind", "must be \"mono\" or \"bi\"");
                    }
                }
                if (auto f = detail::get_string(e, "format", prefix, problems, false)) {
                    if (*f == "jsonl") {
                        spec.format = InputFormat::jsonl;
                    } else if (*f == "tsv") {
                        spec.format = InputFormat::tsv;
                    } else if (*f == "text") {
                        spec.format = InputFormat::text;
                    } else {
                        problems.add(prefix + "format", "must be one of jsonl, tsv, text");
                    }
                }
                if (spec.format == InputFormat::tsv && spec.kind != RecordKind::bi) problems.add(prefix + "format", "tsv requires kind bi");
                if (spec.format == InputFormat::text && spec.kind != RecordKind::mono) {
                    problems.add(prefix + "format", "text requires kind mono");
                }
                if (auto c = detail::get_string(e, "collection", prefix, problems, true)) spec.collection = *c;
                if (auto s = detail::get_string(e, "source", prefix, problems, true)) spec.source = *s;
                spec.lang = detail::get_string(e, "lang", prefix, problems, false);
                spec.src_lang = detail::get_string(e, "src_lang", prefix, problems, false);
                spec.tgt_lang = detail::get_string(e, "tgt_lang", prefix, problems, false);
                if (spec.format != InputFormat::jsonl) {
                    if (spec.kind == RecordKind::bi && (!spec.src_lang || !spec.tgt_lang)) {
                        problems.add(prefix + "src_lang", "tsv inputs need src_lang and tgt_lang");
                    }
                    if (spec.kind == RecordKind::mono && !spec.lang) problems.add(prefix + "lang", "text inputs need lang");
                }
                cfg.inputs.push_back(std::move(spec));
            }
        }
    }

    if (const auto it = j.find("code_inputs"); it != j.end()) {
        if (!it->is_array()) {
            problems.add("code_inputs", "must be an array of paths");
        } else {
            for (std::size_t i = 0; i < it->size(); ++i) {
                const auto& e = (*it)[i];
                const std::string key = "code_inputs[" + std::to_string(i) + "]";
                if (!e.is_string()) {
                    problems.add(key, "must be a path string");
                    continue;
                }
                auto p = detail::resolve(base_dir, e.get<std::string>());
                if (!fs::exists(p)) problems.add(key, "file does not exist: " + p.string());
                cfg.code_inputs.push_back(std::move(p));
            }
        }
    }

    if (const auto it = j.find("clean"); it != j.end()) {
        if (!it->is_object()) {
            problems.add("clean", "must be an object");
        } else {
            detail::check_keys(*it, {"max_consecutive_repeats", "length_ratio_max", "min_chars"}, "clean.", problems);
            if (auto v = detail::get_uint(*it, "max_consecutive_repeats", "clean.", problems)) {
                if (*v < 1) problems.add("clean.max_consecutive_repeats", "must be >= 1");
                cfg.clean.max_consecutive_repeats = *v;
            }
            if (auto v = detail::get_number(*it, "length_ratio_max", "clean.", problems)) {
                if (!(*v > 1.0)) problems.add("clean.length_ratio_max", "must be > 1");
                cfg.clean.length_ratio_max = *v;
            }
            if (auto v = detail::get_uint(*it, "min_chars", "clean.", problems)) cfg.clean.min_chars = *v;
        }
    }

    if (const auto it = j.find("code_rules"); it != j.end()) {
        if (!it->is_object()) {
            problems.add("code_rules", "must be an object");
        } else {
            detail::check_keys(*it, {"buckets", "language_min_count", "always_keep"}, "code_rules.", problems);
            if (const auto b = it->find("buckets"); b != it->end()) {
                if (!b->is_array() || b->size() != 3) {
                    problems.add("code_rules.buckets", "must be an array of three {avg_line_max, max_line_max, alnum_min} objects");
                } else {
                    for (std::size_t i = 0; i < 3; ++i) {
                        const std::string prefix = "code_rules.buckets[" + std::to_string(i) + "].";
                        const auto& e = (*b)[i];
                        if (!e.is_object()) {
                            problems.add(prefix.substr(0, prefix.size() - 1), "must be an object");
                            continue;
                        }
                        detail::check_keys(e, {"avg_line_max", "max_line_max", "alnum_min"}, prefix, problems);
                        auto& rule = cfg.code_rules.buckets[i];
                        if (auto v = detail::get_number(e, "avg_line_max", prefix, problems)) {
                            if (!(*v > 0)) problems.add(prefix + "avg_line_max", "must be > 0");
                            rule.avg_line_max = *v;
                        }
                        if (auto v = detail::get_uint(e, "max_line_max", prefix, problems)) {
                            if (*v == 0) problems.add(prefix + "max_line_max", "must be > 0");
                            rule.max_line_max = *v;
                        }
                        if (auto v = detail::get_number(e, "alnum_min", prefix, problems)) {
                            if (!(*v > 0.0 && *v < 1.0)) problems.add(prefix + "alnum_min", "must be in (0,1)");
                            rule.alnum_min = *v;
                        }
                    }
                }
            }
            if (auto v = detail::get_uint(*it, "language_min_count", "code_rules.", problems)) cfg.code_rules.language_min_count = *v;
            if (const auto a = it->find("always_keep"); a != it->end()) {
                if (!a->is_array()) {
                    problems.add("code_rules.always_keep", "must be an array of strings");
                } else {
                    cfg.code_rules.always_keep.clear();
                    for (const auto& s : *a) {
                        if (s.is_string()) {
                            cfg.code_rules.always_keep.insert(s.get<std::string>());
                        } else {
                            problems.add("code_rules.always_keep", "must be an array of strings");
                        }
                    }
                }
            }
        }
    }

    if (const auto it = j.find("mix"); it != j.end()) {
        if (!it->is_array()) {
            problems.add("mix", "must be an array of rows");
        } else {
            for (std::size_t i = 0; i < it->size(); ++i) {
                const std::string key = "mix[" + std::to_string(i) + "]";
                try {
                    const auto& e = (*it)[i];
                    if (e.is_object()) {
                        detail::check_keys(e, {"data_type", "category", "original_tokens", "rate", "reported_final"}, key + ".", problems);
                    }
                    cfg.mix.push_back(mix_row_from_json(e));
                    if (!cfg.mix.back().rate.positive()) problems.add(key + ".rate", "must be > 0");
                } catch (const std::exception& e) {
                    problems.add(key, e.what());
                }
            }
        }
    }

    if (const auto it = j.find("script"); it != j.end()) {
        if (!it->is_object()) {
            problems.add("script", "must be an object");
        } else {
            detail::check_keys(*it, {"sample_size", "threshold"}, "script.", problems);
            if (auto v = detail::get_uint(*it, "sample_size", "script.", problems)) {
                if (*v < 1) problems.add("script.sample_size", "must be >= 1");
                cfg.script.sample_size = *v;
            }
            if (auto v = detail::get_number(*it, "threshold", "script.", problems)) {
                if (!(*v > 0.0 && *v <= 1.0)) problems.add("script.threshold", "must be in (0,1]");
                cfg.script.threshold = *v;
            }
        }
    }

    if (auto v = detail::get_uint(j, "seed", "", problems)) cfg.seed = *v;
    if (auto v = detail::get_uint(j, "threads", "", problems)) {
        if (*v < 1) problems.add("threads", "must be >= 1");
        cfg.threads = *v;
    }
    if (auto v = detail::get_string(j, "output_dir", "", problems, false)) cfg.output_dir = detail::resolve(base_dir, *v);

    if (!problems.empty()) throw ConfigError(std::move(problems.list()));
    return cfg;
}

inline PipelineConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"--config: cannot open " + path.string()});
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::exception& e) {
        throw ConfigError({"--config: not valid JSON: " + std::string(e.what())});
    }
    return config_from_json(j, path.parent_path());
}

struct RunOptions {
    std::vector<fs::path> inputs;  // overrides the stage's default input files
    RecordKind input_kind = RecordKind::bi;
    bool plan_only = false;
    bool strict_listing = false;
    bool drop_remainder = false;
    bool audit_drops = false;
    std::ostream* log = &std::cerr;
    std::ostream* out = &std::cout;
};

// ---------------------------------------------------------------------------
// Stage plumbing

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LineError {
    std::string file;
    std::size_t line;
    std::string error;
};

inline constexpr std::size_t kBatchLines = 1 << 14;
inline constexpr std::size_t kMaxLoggedErrors = 200;

/// Accumulates the manifest of one stage run.
class StageManifest {
public:
    StageManifest(Stage stage, const PipelineConfig& cfg) : stage_(stage), cfg_(cfg) {}

    std::string display_path(const fs::path& p) const {
        const auto rel = p.lexically_relative(cfg_.output_dir);
        if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
        return p.generic_string();
    }

    void add_input(const fs::path& p, std::uint64_t records) {
        inputs_.push_back(Json{{"path", display_path(p)}, {"blake2b_256", file_digest_hex(p.string())}, {"records", records}});
    }
    void add_output(const fs::path& p, std::uint64_t records) {
        outputs_.push_back(Json{{"path", display_path(p)}, {"blake2b_256", file_digest_hex(p.string())}, {"records", records}});
    }
    void add_error(const fs::path& file, std::size_t line, const std::string& error) {
        ++error_count_;
        if (errors_.size() < kMaxLoggedErrors) {
            errors_.push_back(Json{{"file", display_path(file)}, {"line", line}, {"error", error}});
        }
    }
    Json& counts() { return counts_; }
    std::uint64_t error_count() const { return error_count_; }

    Json to_json() const {
        return Json{{"stage", to_string(stage_)},
                    {"tool_version", kToolVersion},
                    {"seed", cfg_.seed},
                    {"data_versions", Json{{"unicode_scripts", ScriptRanges::builtin().version()}, {"iso639", CodeTable::builtin().version()}}},
                    {"inputs", inputs_},
                    {"outputs", outputs_},
                    {"counts", counts_},
                    {"error_count", error_count_},
                    {"errors", errors_}};
    }

    void write(const fs::path& dir) const {
        std::ofstream out(dir / "manifest.json", std::ios::binary);
        out << to_json().dump(2) << '\n';
        if (!out) throw DataError("cannot write manifest in " + dir.string());
    }

private:
    Stage stage_;
    const PipelineConfig& cfg_;
    Json inputs_ = Json::array();
    Json outputs_ = Json::array();
    Json counts_ = Json::object();
    Json errors_ = Json::array();
    std::uint64_t error_count_ = 0;
};

inline std::ofstream open_output(const fs::path& p) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open for writing: " + p.string());
    return out;
}

inline void write_lines(std::ostream& out, const std::vector<std::string>& lines, const fs::path& p) {
    for (const auto& l : lines) {
        out.write(l.data(), static_cast<std::streamsize>(l.size()));
        out.put('\n');
    }
    if (!out) throw DataError("write failed: " + p.string());
}

/// Streams records of one JSONL file in batches. `on_batch` receives the
/// good records of each batch in input order. Returns records read.
template <typename Fn>
std::uint64_t stream_records(const fs::path& path, RecordKind kind, std::size_t threads, StageManifest& manifest, Fn&& on_batch) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open input: " + path.string());
    JsonlReader reader(in, kind);
    std::vector<std::pair<std::size_t, std::string>> raw;
    std::vector<ParsedLine> parsed;
    std::vector<Record> good;
    std::uint64_t total = 0;
    while (reader.next_raw_batch(raw, kBatchLines) > 0) {
        parsed.assign(raw.size(), ParsedLine{});
        parallel_for(raw.size(), threads, [&](std::size_t i) { parsed[i] = parse_jsonl_line(raw[i].second, kind, raw[i].first); });
        good.clear();
        for (auto& p : parsed) {
            if (p.ok()) {
                good.push_back(std::move(*p.record));
            } else {
                manifest.add_error(path, p.line, p.error);
            }
        }
        total += good.size();
        on_batch(good);
    }
    return total;
}

inline std::vector<std::string> serialize_parallel(const std::vector<Record>& records, std::size_t threads) {
    std::vector<std::string> lines(records.size());
    parallel_for(records.size(), threads, [&](std::size_t i) { lines[i] = to_jsonl_line(records[i]); });
    return lines;
}

inline fs::path stage_dir(const PipelineConfig& cfg, Stage s) { return cfg.output_dir / std::string(to_string(s)); }

inline std::string kind_file(RecordKind k) { return k == RecordKind::mono ? "mono.jsonl" : "bi.jsonl"; }

/// Default input files of a stage: both kinds from the predecessor directory.
inline std::vector<std::pair<fs::path, RecordKind>> stage_inputs(const PipelineConfig& cfg, const RunOptions& opts, Stage predecessor) {
    std::vector<std::pair<fs::path, RecordKind>> out;
    if (!opts.inputs.empty()) {
        for (const auto& p : opts.inputs) out.emplace_back(p, opts.input_kind);
        return out;
    }
    for (auto k : {RecordKind::mono, RecordKind::bi}) {
        const auto p = stage_dir(cfg, predecessor) / kind_file(k);
        if (!fs::exists(p)) throw DataError("missing stage input " + p.string() + " (run '" + std::string(to_string(predecessor)) + "' first)");
        out.emplace_back(p, k);
    }
    return out;
}

// ---------------------------------------------------------------------------
// ingest

namespace detail {

struct RawRow {
    std::size_t line = 0;
    std::string text;  // mono
    std::string src_txt, tgt_txt;
    std::string lang, src_lang, tgt_lang;  // denotations
    std::optional<std::string> url;
    Json extra = Json::object();
    std::string error;
};

inline RawRow parse_raw_line(const InputSpec& spec, const std::string& line, std::size_t line_no) {
    RawRow row;
    row.line = line_no;
    if (!unicode::is_valid_utf8(line)) {
        row.error = "invalid UTF-8";
        return row;
    }
    if (spec.format == InputFormat::tsv) {
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            row.error = "expected source<TAB>target";
            return row;
        }
        row.src_txt = line.substr(0, tab);
        row.tgt_txt = line.substr(tab + 1);
        row.src_lang = *spec.src_lang;
        row.tgt_lang = *spec.tgt_lang;
        return row;
    }
    if (spec.format == InputFormat::text) {
        row.text = line;
        row.lang = *spec.lang;
        return row;
    }
    try {
        const Json obj = Json::parse(line);
        if (!obj.is_object()) throw RecordFormatError("line is not a JSON object");
        std::set<std::string> consumed{"url"};
        const auto pick = [&](const std::optional<std::string>& fixed, std::initializer_list<const char*> keys) -> std::string {
            for (const char* k : keys) {
                const auto it = obj.find(k);
                if (it != obj.end() && it->is_string()) {
                    consumed.insert(k);
                    if (!fixed) return it->get<std::string>();
                }
            }
            if (fixed) return *fixed;
            std::string names;
            for (const char* k : keys) names += std::string(names.empty() ? "" : " or ") + k;
            throw RecordFormatError("missing language denotation (" + names + ")");
        };
        if (spec.kind == RecordKind::mono) {
            row.text = ::polyglot_forge::detail::require_string(obj, "text");
            consumed.insert("text");
            row.lang = pick(spec.lang, {"original_lang", "lang"});
        } else {
            row.src_txt = ::polyglot_forge::detail::require_string(obj, "src_txt");
            row.tgt_txt = ::polyglot_forge::detail::require_string(obj, "tgt_txt");
            consumed.insert("src_txt");
            consumed.insert("tgt_txt");
            row.src_lang = pick(spec.src_lang, {"original_src_lang", "src_lang"});
            row.tgt_lang = pick(spec.tgt_lang, {"original_tgt_lang", "tgt_lang"});
        }
        row.url = ::polyglot_forge::detail::optional_string(obj, "url");
        for (const char* k : {"collection", "source"}) consumed.insert(k);
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            if (!consumed.contains(it.key())) row.extra[it.key()] = it.value();
        }
    } catch (const Json::exception& e) {
        row.error = std::string("malformed JSON: ") + e.what();
    } catch (const RecordFormatError& e) {
        row.error = e.what();
    }
    return row;
}

template <typename Fn>
void for_each_raw_batch(const InputSpec& spec, std::size_t threads, Fn&& fn) {
    std::ifstream in(spec.path, std::ios::binary);
    if (!in) throw DataError("cannot open input: " + spec.path.string());
    JsonlReader reader(in, spec.kind);
    std::vector<std::pair<std::size_t, std::string>> raw;
    std::vector<RawRow> rows;
    while (reader.next_raw_batch(raw, kBatchLines) > 0) {
        rows.assign(raw.size(), RawRow{});
        parallel_for(raw.size(), threads, [&](std::size_t i) { rows[i] = parse_raw_line(spec, raw[i].second, raw[i].first); });
        fn(rows);
    }
}

}  // namespace detail

inline int run_ingest(const PipelineConfig& cfg, const RunOptions& opts) {
    const fs::path dir = stage_dir(cfg, Stage::ingest);
    fs::create_directories(dir);
    StageManifest manifest(Stage::ingest, cfg);

    std::vector<InputSpec> inputs = cfg.inputs;
    for (const auto& p : opts.inputs) {
        InputSpec spec;
        spec.path = p;
        spec.kind = opts.input_kind;
        spec.collection = "cli";
        spec.source = p.filename().string();
        inputs.push_back(std::move(spec));
    }
    if (inputs.empty()) throw ConfigError({"inputs: ingest needs at least one input (config 'inputs' or --input)"});

    const fs::path mono_path = dir / "mono.jsonl";
    const fs::path bi_path = dir / "bi.jsonl";
    auto mono_out = open_output(mono_path);
    auto bi_out = open_output(bi_path);
    std::uint64_t mono_n = 0, bi_n = 0;
    Json per_input = Json::array();
    Json scripts = Json::object();

    for (const auto& spec : inputs) {
        // Pass 1: one script per (file, side, language); never per record.
        std::map<std::pair<int, std::string>, DatasetScriptDetector> detectors;
        std::map<std::string, NormalizedCode> norm_cache;
        const auto normalized = [&](const std::string& denotation) -> const NormalizedCode& {
            auto it = norm_cache.find(denotation);
            if (it == norm_cache.end()) it = norm_cache.emplace(denotation, normalize_code(denotation)).first;
            return it->second;
        };
        const auto feed = [&](int side, const std::string& denotation, const std::string& text) {
            const auto key = std::make_pair(side, normalized(denotation).code);
            auto it = detectors.find(key);
            if (it == detectors.end()) it = detectors.emplace(key, DatasetScriptDetector(ScriptRanges::builtin(), cfg.script)).first;
            it->second.feed(text);
        };
        detail::for_each_raw_batch(spec, cfg.threads, [&](const std::vector<detail::RawRow>& rows) {
            for (const auto& r : rows) {
                if (!r.error.empty()) continue;
                if (spec.kind == RecordKind::mono) {
                    feed(0, r.lang, r.text);
                } else {
                    feed(1, r.src_lang, r.src_txt);
                    feed(2, r.tgt_lang, r.tgt_txt);
                }
            }
        });
        std::map<std::pair<int, std::string>, std::string> script_of;
        for (const auto& [key, det] : detectors) {
            std::string script;
            try {
                script = det.result();
            } catch (const UndetectableScript&) {
                script = std::string(kUndeterminedScript);
            }
            script_of[key] = script;
            static constexpr const char* side_names[] = {"text", "src", "tgt"};
            scripts[manifest.display_path(spec.path) + ":" + side_names[key.first] + ":" + key.second] = script;
        }

        // Pass 2: harmonize.
        std::uint64_t n = 0;
        std::map<std::string, std::uint64_t> methods;
        const auto tag_for = [&](int side, const std::string& denotation, Json& extra, const char* prefix) {
            const auto& norm = normalized(denotation);
            ++methods[std::string(to_string(norm.method))];
            if (norm.region_subtag) extra[std::string(prefix) + "region"] = *norm.region_subtag;
            if (norm.script_subtag) extra[std::string(prefix) + "script_subtag"] = *norm.script_subtag;
            return LanguageTag{norm.code, script_of.at({side, norm.code})};
        };
        detail::for_each_raw_batch(spec, cfg.threads, [&](std::vector<detail::RawRow>& rows) {
            std::vector<Record> records;
            records.reserve(rows.size());
            for (auto& r : rows) {
                if (!r.error.empty()) {
                    manifest.add_error(spec.path, r.line, r.error);
                    continue;
                }
                if (spec.kind == RecordKind::mono) {
                    MonoRecord m;
                    m.lang = tag_for(0, r.lang, r.extra, "");
                    m.text = std::move(r.text);
                    m.url = std::move(r.url);
                    m.collection = spec.collection;
                    m.source = spec.source;
                    m.original_lang = r.lang;
                    m.extra = std::move(r.extra);
                    records.emplace_back(std::move(m));
                } else {
                    BiRecord b;
                    b.src_lang = tag_for(1, r.src_lang, r.extra, "src_");
                    b.tgt_lang = tag_for(2, r.tgt_lang, r.extra, "tgt_");
                    b.src_txt = std::move(r.src_txt);
                    b.tgt_txt = std::move(r.tgt_txt);
                    b.url = std::move(r.url);
                    b.collection = spec.collection;
                    b.source = spec.source;
                    b.original_src_lang = r.src_lang;
                    b.original_tgt_lang = r.tgt_lang;
                    b.extra = std::move(r.extra);
                    records.emplace_back(std::move(b));
                }
            }
            const auto lines = serialize_parallel(records, cfg.threads);
            if (spec.kind == RecordKind::mono) {
                write_lines(mono_out, lines, mono_path);
                mono_n += lines.size();
            } else {
                write_lines(bi_out, lines, bi_path);
                bi_n += lines.size();
            }
            n += lines.size();
        });
        manifest.add_input(spec.path, n);
        per_input.push_back(Json{{"path", manifest.display_path(spec.path)}, {"kind", to_string(spec.kind)}, {"records", n}, {"normalization", methods}});
    }
    mono_out.close();
    bi_out.close();
    manifest.add_output(mono_path, mono_n);
    manifest.add_output(bi_path, bi_n);
    manifest.counts()["per_input"] = per_input;
    manifest.counts()["scripts"] = scripts;
    manifest.write(dir);
    *opts.log << "ingest: " << mono_n << " mono + " << bi_n << " bi records, " << manifest.error_count() << " bad lines\n";
    return manifest.error_count() > 0 ? kDataError : kOk;
}

// ---------------------------------------------------------------------------
// clean

inline int run_clean(const PipelineConfig& cfg, const RunOptions& opts) {
    cfg.clean.validate();
    const fs::path dir = stage_dir(cfg, Stage::clean);
    fs::create_directories(dir);
    StageManifest manifest(Stage::clean, cfg);
    const auto inputs = stage_inputs(cfg, opts, Stage::ingest);

    std::map<RecordKind, std::uint64_t> kept;
    std::array<std::uint64_t, 3> reason_counts{};
    std::ofstream audit;
    const fs::path audit_path = dir / "dropped.jsonl";
    if (opts.audit_drops) audit = open_output(audit_path);
    std::uint64_t audited = 0;

    std::map<RecordKind, std::ofstream> outs;
    for (auto k : {RecordKind::mono, RecordKind::bi}) outs[k] = open_output(dir / kind_file(k));

    for (const auto& [path, kind] : inputs) {
        const auto k = kind;
        const auto n = stream_records(path, kind, cfg.threads, manifest, [&](const std::vector<Record>& batch) {
            std::vector<CleanVerdict> verdicts(batch.size());
            parallel_for(batch.size(), cfg.threads, [&](std::size_t i) { verdicts[i] = clean_record(batch[i], cfg.clean); });
            std::vector<Record> keep;
            std::vector<Record> dropped;
            for (std::size_t i = 0; i < batch.size(); ++i) {
                if (verdicts[i].keep()) {
                    keep.push_back(batch[i]);
                } else {
                    ++reason_counts[static_cast<std::size_t>(*verdicts[i].drop)];
                    if (opts.audit_drops) {
                        Json j = record_to_json(batch[i]);
                        j["drop_reason"] = to_string(*verdicts[i].drop);
                        audit << j.dump(-1, ' ', false) << '\n';
                        ++audited;
                    }
                }
            }
            write_lines(outs[k], serialize_parallel(keep, cfg.threads), dir / kind_file(k));
            kept[k] += keep.size();
        });
        manifest.add_input(path, n);
    }
    for (auto& [k, out] : outs) {
        out.close();
        manifest.add_output(dir / kind_file(k), kept[k]);
    }
    if (opts.audit_drops) {
        audit.close();
        manifest.add_output(audit_path, audited);
    }
    {
        auto tsv = open_output(dir / "drops.tsv");
        tsv << "reason\tcount\n";
        for (auto r : kAllDropReasons) tsv << to_string(r) << '\t' << reason_counts[static_cast<std::size_t>(r)] << '\n';
    }
    Json drops = Json::object();
    for (auto r : kAllDropReasons) drops[std::string(to_string(r))] = reason_counts[static_cast<std::size_t>(r)];
    manifest.counts()["kept"] = kept[RecordKind::mono] + kept[RecordKind::bi];
    manifest.counts()["dropped"] = drops;
    manifest.write(dir);
    *opts.log << "clean: kept " << kept[RecordKind::mono] + kept[RecordKind::bi] << ", dropped " << reason_counts[0] + reason_counts[1] + reason_counts[2]
              << "\n";
    return manifest.error_count() > 0 ? kDataError : kOk;
}

// ---------------------------------------------------------------------------
// dedup

inline int run_dedup(const PipelineConfig& cfg, const RunOptions& opts) {
    const fs::path dir = stage_dir(cfg, Stage::dedup);
    fs::create_directories(dir);
    StageManifest manifest(Stage::dedup, cfg);
    const auto inputs = stage_inputs(cfg, opts, Stage::clean);

    DedupIndex index;
    std::map<RecordKind, std::uint64_t> kept;
    std::uint64_t duplicates = 0;
    std::map<RecordKind, std::ofstream> outs;
    for (auto k : {RecordKind::mono, RecordKind::bi}) outs[k] = open_output(dir / kind_file(k));

    for (const auto& [path, kind] : inputs) {
        const auto k = kind;
        const auto n = stream_records(path, kind, cfg.threads, manifest, [&](const std::vector<Record>& batch) {
            std::vector<Digest128> digests(batch.size());
            parallel_for(batch.size(), cfg.threads, [&](std::size_t i) { digests[i] = content_digest(batch[i]); });
            std::vector<Record> keep;
            // Sequential insert keeps "first occurrence" equal to input order.
            for (std::size_t i = 0; i < batch.size(); ++i) {
                if (index.insert(digests[i])) {
                    keep.push_back(batch[i]);
                } else {
                    ++duplicates;
                }
            }
            write_lines(outs[k], serialize_parallel(keep, cfg.threads), dir / kind_file(k));
            kept[k] += keep.size();
        });
        manifest.add_input(path, n);
    }
    for (auto& [k, out] : outs) {
        out.close();
        manifest.add_output(dir / kind_file(k), kept[k]);
    }
    manifest.counts()["kept"] = kept[RecordKind::mono] + kept[RecordKind::bi];
    manifest.counts()["duplicates"] = duplicates;
    manifest.write(dir);
    *opts.log << "dedup: kept " << kept[RecordKind::mono] + kept[RecordKind::bi] << ", removed " << duplicates << " duplicates\n";
    return manifest.error_count() > 0 ? kDataError : kOk;
}

// ---------------------------------------------------------------------------
// stats

inline CorpusStats census_of_file(const fs::path& path, RecordKind kind, std::size_t threads, StageManifest& manifest,
                                  std::uint64_t* records = nullptr) {
    CensusAccumulator total;
    const auto n = stream_records(path, kind, threads, manifest, [&](const std::vector<Record>& batch) {
        const std::size_t shards = std::max<std::size_t>(1, std::min(threads, batch.size()));
        std::vector<CensusAccumulator> local(shards);
        const std::size_t step = (batch.size() + shards - 1) / shards;
        parallel_for(shards, threads, [&](std::size_t s) {
            for (std::size_t i = s * step; i < std::min(batch.size(), (s + 1) * step); ++i) local[s].add(batch[i]);
        });
        for (const auto& l : local) total.merge(l);
    });
    if (records != nullptr) *records = n;
    return total.finish();
}

inline int run_stats(const PipelineConfig& cfg, const RunOptions& opts) {
    const fs::path dir = stage_dir(cfg, Stage::stats);
    fs::create_directories(dir);
    StageManifest manifest(Stage::stats, cfg);
    const auto inputs = stage_inputs(cfg, opts, Stage::dedup);

    std::map<RecordKind, CensusAccumulator> acc;
    for (const auto& [path, kind] : inputs) {
        std::uint64_t n = 0;
        const auto stats = census_of_file(path, kind, cfg.threads, manifest, &n);
        for (const auto& [key, s] : stats.per_key) acc[kind].add(key, s.segments, s.tokens);
        manifest.add_input(path, n);
    }
    Json summary = Json::object();
    for (auto k : {RecordKind::mono, RecordKind::bi}) {
        const auto stats = acc[k].finish();
        const fs::path p = dir / (std::string(to_string(k)) + ".tsv");
        {
            auto out = open_output(p);
            write_stats_tsv(stats, out);
        }
        manifest.add_output(p, stats.per_key.size());
        summary[std::string(to_string(k))] = tier_summary_json(stats);
    }
    {
        auto out = open_output(dir / "tiers.json");
        out << summary.dump(2) << '\n';
    }
    manifest.counts()["summary"] = summary;
    manifest.write(dir);
    *opts.log << "stats: " << summary["mono"]["total_keys"] << " languages, " << summary["bi"]["total_keys"] << " pairs, "
              << summary["bi"]["total_tokens"] << " bitext tokens\n";
    return manifest.error_count() > 0 ? kDataError : kOk;
}

// ---------------------------------------------------------------------------
// codefilter

inline int run_codefilter(const PipelineConfig& cfg, const RunOptions& opts) {
    cfg.code_rules.validate();
    const fs::path dir = stage_dir(cfg, Stage::codefilter);
    fs::create_directories(dir);
    StageManifest manifest(Stage::codefilter, cfg);
    std::vector<fs::path> inputs = opts.inputs.empty() ? cfg.code_inputs : opts.inputs;
    if (inputs.empty()) throw ConfigError({"code_inputs: codefilter needs at least one input (config 'code_inputs' or --input)"});

    struct Row {
        std::size_t line;
        std::string raw;
        std::optional<CodeFileMeta> meta;
        std::string error;
    };
    const auto parse = [](std::size_t line, const std::string& raw) {
        Row r{line, raw, std::nullopt, {}};
        try {
            const auto j = Json::parse(raw);
            CodeFileMeta m;
            m.content = j.at("content").get<std::string>();
            const auto& forks = j.at("forks");
            if (!forks.is_number_unsigned()) throw RecordFormatError("forks must be a non-negative integer");
            m.forks = forks.get<std::uint64_t>();
            m.language_label = j.at("language_label").get<std::string>();
            r.meta = std::move(m);
        } catch (const std::exception& e) {
            r.error = e.what();
        }
        return r;
    };
    const auto for_each_batch = [&](const fs::path& p, auto&& fn) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw DataError("cannot open input: " + p.string());
        JsonlReader reader(in, RecordKind::mono);
        std::vector<std::pair<std::size_t, std::string>> raw;
        while (reader.next_raw_batch(raw, kBatchLines) > 0) {
            std::vector<Row> rows(raw.size());
            parallel_for(raw.size(), cfg.threads, [&](std::size_t i) { rows[i] = parse(raw[i].first, raw[i].second); });
            fn(rows);
        }
    };

    std::map<std::string, std::uint64_t> label_counts;
    for (const auto& p : inputs) {
        for_each_batch(p, [&](std::vector<Row>& rows) {
            for (const auto& r : rows)
                if (r.meta) ++label_counts[r.meta->language_label];
        });
    }
    const auto retained = language_frequency_filter(label_counts, cfg.code_rules.language_min_count, cfg.code_rules.always_keep);

    const fs::path kept_path = dir / "kept.jsonl";
    const fs::path audit_path = dir / "audit.jsonl";
    auto kept_out = open_output(kept_path);
    auto audit_out = open_output(audit_path);
    std::uint64_t kept = 0, audited = 0;
    std::map<std::string, std::uint64_t> reasons;
    for (const auto& p : inputs) {
        std::uint64_t n = 0;
        for_each_batch(p, [&](std::vector<Row>& rows) {
            std::vector<std::optional<CodeMetrics>> metrics(rows.size());
            parallel_for(rows.size(), cfg.threads, [&](std::size_t i) {
                if (rows[i].meta) metrics[i] = code_metrics(rows[i].meta->content);
            });
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const auto& r = rows[i];
                if (!r.meta) {
                    manifest.add_error(p, r.line, r.error);
                    continue;
                }
                ++n;
                std::string reason;
                if (!retained.contains(r.meta->language_label)) {
                    reason = "rare-language";
                } else if (const auto v = keep_code_metrics(*metrics[i], r.meta->forks, cfg.code_rules); !v.keep()) {
                    reason = std::string(to_string(*v.drop));
                }
                Json audit{{"file", manifest.display_path(p)},
                           {"line", r.line},
                           {"language_label", r.meta->language_label},
                           {"forks", r.meta->forks},
                           {"bucket", to_string(fork_bucket(r.meta->forks))},
                           {"avg_line_len", metrics[i]->avg_line_len},
                           {"max_line_len", metrics[i]->max_line_len},
                           {"alnum_fraction", metrics[i]->alnum_fraction},
                           {"verdict", reason.empty() ? "keep" : "drop"},
                           {"reason", reason.empty() ? Json(nullptr) : Json(reason)}};
                audit_out << audit.dump(-1, ' ', false) << '\n';
                ++audited;
                if (reason.empty()) {
                    kept_out << r.raw << '\n';
                    ++kept;
                } else {
                    ++reasons[reason];
                }
            }
        });
        manifest.add_input(p, n);
    }
    kept_out.close();
    audit_out.close();
    manifest.add_output(kept_path, kept);
    manifest.add_output(audit_path, audited);
    {
        auto out = open_output(dir / "languages.tsv");
        out << "language_label\tcount\tretained\n";
        for (const auto& [label, n] : label_counts) out << label << '\t' << n << '\t' << (retained.contains(label) ? "yes" : "no") << '\n';
    }
    manifest.counts()["kept"] = kept;
    manifest.counts()["dropped"] = reasons;
    manifest.write(dir);
    *opts.log << "codefilter: kept " << kept << " of " << audited << " files\n";
    return manifest.error_count() > 0 ? kDataError : kOk;
}

// ---------------------------------------------------------------------------
// mix

namespace detail {

/// Row of `plan` that governs a record: a language-specific category
/// (e.g. "EN" for eng) wins over the tier category.
inline const MixPlanRow* row_for(const MixPlan& plan, const Record& rec, ResourceTier tier) {
    const DataType type = kind_of(rec) == RecordKind::mono ? DataType::monolingual : DataType::bilingual;
    const MixPlanRow* by_tier = nullptr;
    for (const auto& r : plan.rows) {
        if (r.data_type != type) continue;
        if (type == DataType::monolingual) {
            const auto norm = normalize_code(r.category);
            if (norm.method != NormalizeMethod::unknown && norm.code == std::get<MonoRecord>(rec).lang.code) return &r;
        }
        if (auto t = parse_tier(r.category); t && *t == tier && by_tier == nullptr) by_tier = &r;
    }
    return by_tier;
}

}  // namespace detail

inline int run_mix(const PipelineConfig& cfg, const RunOptions& opts) {
    const fs::path dir = stage_dir(cfg, Stage::mix);
    fs::create_directories(dir);
    StageManifest manifest(Stage::mix, cfg);
    if (cfg.mix.empty()) throw ConfigError({"mix: the mix stage needs at least one row in config 'mix'"});
    const MixPlan plan = plan_mix(cfg.mix);
    const MixPlan mono_plan = derive_monolingual_mix(plan);

    {
        auto out = open_output(dir / "plan.json");
        Json j = plan_to_json(plan, kToolVersion, cfg.seed);
        j["monolingual_mix"] = plan_to_json(mono_plan, kToolVersion, cfg.seed);
        out << j.dump(2) << '\n';
    }
    {
        auto out = open_output(dir / "plan.txt");
        print_plan_table(plan, out);
    }
    print_plan_table(plan, *opts.out);
    manifest.counts()["plan_warnings"] = plan.warnings.size();

    if (opts.plan_only) {
        manifest.write(dir);
        return kOk;
    }

    const auto inputs = stage_inputs(cfg, opts, Stage::dedup);
    Json realized = Json::array();
    std::map<RecordKind, std::uint64_t> written;
    bool oversampled = false;
    for (const auto& r : plan.rows) oversampled = oversampled || r.rate.whole() >= 1;
    std::map<RecordKind, std::vector<std::pair<Digest128, std::string>>> lines;
    std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> tokens_by_row;  // in, out
    std::uint64_t unplanned = 0;

    for (const auto& [path, kind] : inputs) {
        std::uint64_t n = 0;
        const auto census = census_of_file(path, kind, cfg.threads, manifest, &n);
        const auto k = kind;
        StageManifest scratch(Stage::mix, cfg);  // errors already recorded by the census pass
        stream_records(path, kind, cfg.threads, scratch, [&](const std::vector<Record>& batch) {
            std::vector<std::uint64_t> copies(batch.size(), 0);
            std::vector<Digest128> digests(batch.size());
            std::vector<const MixPlanRow*> rows(batch.size(), nullptr);
            parallel_for(batch.size(), cfg.threads, [&](std::size_t i) {
                const auto tier = census.tier_of(census_key(batch[i]));
                rows[i] = detail::row_for(plan, batch[i], tier);
                digests[i] = content_digest(batch[i]);
                if (rows[i] != nullptr) copies[i] = sample_copies(digests[i], SamplePlan::from_rate(rows[i]->rate, cfg.seed));
            });
            for (std::size_t i = 0; i < batch.size(); ++i) {
                if (rows[i] == nullptr) {
                    ++unplanned;
                    continue;
                }
                const auto key = std::string(to_string(rows[i]->data_type)) + "/" + rows[i]->category;
                const auto t = record_tokens(batch[i]);
                tokens_by_row[key].first += t;
                tokens_by_row[key].second += t * copies[i];
                if (copies[i] == 0) continue;
                const std::string line = to_jsonl_line(batch[i]);
                for (std::uint64_t c = 0; c < copies[i]; ++c) lines[k].emplace_back(digests[i], line);
            }
        });
        manifest.add_input(path, n);
    }

    for (auto k : {RecordKind::mono, RecordKind::bi}) {
        auto& v = lines[k];
        if (oversampled) {
            std::vector<std::tuple<std::uint64_t, std::size_t>> order;
            order.reserve(v.size());
            std::uint64_t copy = 0;
            for (std::size_t i = 0; i < v.size(); ++i) {
                copy = (i > 0 && v[i].first == v[i - 1].first) ? copy + 1 : 0;
                order.emplace_back(seeded_hash64(v[i].first, cfg.seed ^ 0x9e3779b97f4a7c15ULL, copy), i);
            }
            std::sort(order.begin(), order.end());
            std::vector<std::pair<Digest128, std::string>> shuffled;
            shuffled.reserve(v.size());
            for (const auto& [h, i] : order) shuffled.push_back(std::move(v[i]));
            v = std::move(shuffled);
        }
        const fs::path p = dir / kind_file(k);
        auto out = open_output(p);
        for (const auto& [d, line] : v) out << line << '\n';
        out.close();
        written[k] = v.size();
        manifest.add_output(p, v.size());
    }
    for (const auto& [key, io] : tokens_by_row) realized.push_back(Json{{"row", key}, {"input_tokens", io.first}, {"output_tokens", io.second}});
    manifest.counts()["realized"] = realized;
    manifest.counts()["unplanned_records"] = unplanned;
    manifest.write(dir);
    *opts.log << "mix: wrote " << written[RecordKind::mono] << " mono + " << written[RecordKind::bi] << " bi records\n";
    return manifest.error_count() > 0 ? kDataError : kOk;
}

// ---------------------------------------------------------------------------
// chunk

inline int run_chunk(const PipelineConfig& cfg, const RunOptions& opts) {
    const fs::path dir = stage_dir(cfg, Stage::chunk);
    fs::create_directories(dir);
    StageManifest manifest(Stage::chunk, cfg);
    std::vector<fs::path> inputs = opts.inputs;
    if (inputs.empty()) {
        const fs::path from_mix = stage_dir(cfg, Stage::mix) / "bi.jsonl";
        const fs::path from_dedup = stage_dir(cfg, Stage::dedup) / "bi.jsonl";
        if (fs::exists(from_mix)) {
            inputs.push_back(from_mix);
        } else if (fs::exists(from_dedup)) {
            inputs.push_back(from_dedup);
        } else {
            throw DataError("missing stage input: neither " + from_mix.string() + " nor " + from_dedup.string() + " exists");
        }
    }
    std::map<std::string, std::vector<BiRecord>> by_direction;
    for (const auto& p : inputs) {
        const auto n = stream_records(p, RecordKind::bi, cfg.threads, manifest, [&](const std::vector<Record>& batch) {
            for (const auto& r : batch) {
                const auto& b = std::get<BiRecord>(r);
                BiRecord slim;
                slim.src_lang = b.src_lang;
                slim.tgt_lang = b.tgt_lang;
                slim.src_txt = b.src_txt;
                slim.tgt_txt = b.tgt_txt;
                by_direction[PairLabel{b.src_lang, b.tgt_lang}.render()].push_back(std::move(slim));
            }
        });
        manifest.add_input(p, n);
    }
    ChunkOptions copts;
    copts.strict_listing = opts.strict_listing;
    copts.drop_remainder = opts.drop_remainder;
    const fs::path jsonl_path = dir / "docs.jsonl";
    const fs::path text_path = dir / "docs.txt";
    auto jout = open_output(jsonl_path);
    auto tout = open_output(text_path);
    std::uint64_t docs = 0;
    for (const auto& [label, records] : by_direction) {
        for (const auto& d : chunk_pairs(records, copts)) {
            jout << pseudo_doc_to_json(d).dump(-1, ' ', false) << '\n';
            if (docs > 0) tout << "\n\n";
            tout << d.body;
            ++docs;
        }
    }
    if (docs > 0) tout << '\n';
    jout.close();
    tout.close();
    manifest.add_output(jsonl_path, docs);
    manifest.add_output(text_path, docs);
    manifest.counts()["directions"] = by_direction.size();
    manifest.counts()["documents"] = docs;
    manifest.write(dir);
    *opts.log << "chunk: " << docs << " pseudo-documents over " << by_direction.size() << " directions\n";
    return manifest.error_count() > 0 ? kDataError : kOk;
}

// ---------------------------------------------------------------------------
// report

inline int run_report(const PipelineConfig& cfg, const RunOptions& opts) {
    Json stages = Json::object();
    for (auto s : {Stage::ingest, Stage::clean, Stage::dedup, Stage::stats, Stage::codefilter, Stage::mix, Stage::chunk}) {
        const fs::path p = stage_dir(cfg, s) / "manifest.json";
        if (!fs::exists(p)) continue;
        std::ifstream in(p);
        try {
            stages[std::string(to_string(s))] = Json::parse(in);
        } catch (const Json::exception& e) {
            throw DataError("unreadable manifest " + p.string() + ": " + e.what());
        }
    }
    Json report{{"tool_version", kToolVersion},
                {"seed", cfg.seed},
                {"data_versions", Json{{"unicode_scripts", ScriptRanges::builtin().version()}, {"iso639", CodeTable::builtin().version()}}},
                {"stages", stages}};
    fs::create_directories(cfg.output_dir);
    {
        auto out = open_output(cfg.output_dir / "report.json");
        out << report.dump(2) << '\n';
    }
    *opts.out << "tool: " << kToolVersion << "\nunicode scripts: " << ScriptRanges::builtin().version()
              << "\niso639: " << CodeTable::builtin().version() << "\n";
    for (auto it = stages.begin(); it != stages.end(); ++it) {
        *opts.out << it.key() << ": " << it.value()["counts"].dump() << " errors=" << it.value()["error_count"] << "\n";
    }
    return kOk;
}

// ---------------------------------------------------------------------------

/// Runs one subcommand. ConfigError maps to exit 1, DataError and I/O
/// failures to exit 2; artifacts written before a failure are left in place.
inline int run(Stage stage, const PipelineConfig& cfg, const RunOptions& opts) {
    try {
        switch (stage) {
            case Stage::ingest:
                return run_ingest(cfg, opts);
            case Stage::clean:
                return run_clean(cfg, opts);
            case Stage::dedup:
                return run_dedup(cfg, opts);
            case Stage::stats:
                return run_stats(cfg, opts);
            case Stage::codefilter:
                return run_codefilter(cfg, opts);
            case Stage::mix:
                return run_mix(cfg, opts);
            case Stage::chunk:
                return run_chunk(cfg, opts);
            case Stage::report:
                return run_report(cfg, opts);
            case Stage::all:
                break;
        }
        int worst = kOk;
        RunOptions chained = opts;
        chained.inputs.clear();
        for (auto s : {Stage::ingest, Stage::clean, Stage::dedup, Stage::stats, Stage::mix, Stage::chunk}) {
            const int rc = run(s, cfg, s == Stage::ingest ? opts : chained);
            if (rc == kValidationError) return rc;
            worst = std::max(worst, rc);
        }
        return worst;
    } catch (const ConfigError& e) {
        *opts.log << "error: " << e.what() << "\n";
        return kValidationError;
    } catch (const std::invalid_argument& e) {
        *opts.log << "error: " << e.what() << "\n";
        return kValidationError;
    } catch (const MixPlanError& e) {
        *opts.log << "error: " << e.what() << "\n";
        return kValidationError;
    } catch (const std::exception& e) {
        *opts.log << "data error: " << e.what() << "\n";
        return kDataError;
    }
}

}  // namespace polyglot_forge::pipeline
