#pragma once

// Writing-system (ISO 15924) detection from the Unicode Scripts property.
//
// A dataset gets exactly one script. The first `sample_size` non-empty lines
// are pooled; if the plurality script covers at least `threshold` of the
// sample's non-whitespace code points it wins, otherwise the first non-empty
// line decides on its own.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "polyglot_forge/unicode.hpp"

namespace polyglot_forge {

struct ScriptRange {
    char32_t first;
    char32_t last;
    std::string_view script;
};

namespace data {
#include "polyglot_forge/data/script_table.inc"
}  // namespace data

inline constexpr std::string_view kUndeterminedScript = "Zzzz";

/// Disjoint, sorted code point ranges mapped to ISO 15924 codes.
class ScriptRanges {
public:
    using ScriptId = std::uint16_t;

    static const ScriptRanges& builtin() {
        static const ScriptRanges table = [] {
            ScriptRanges t;
            t.version_ = std::string(data::kUnicodeVersion);
            for (const auto& r : data::kScriptRanges) t.add(r.first, r.last, r.script);
            t.finish();
            return t;
        }();
        return table;
    }

    /// Loads "first<TAB>last<TAB>script" rows with hex code points, as in data/scripts.tsv.
    static ScriptRanges from_tsv(const std::string& path, std::string version) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open script table: " + path);
        ScriptRanges t;
        t.version_ = std::move(version);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line.front() == '#') continue;
            std::istringstream fields(line);
            std::string first, last, script;
            if (!std::getline(fields, first, '\t') || !std::getline(fields, last, '\t') || !std::getline(fields, script, '\t')) {
                throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected three columns");
            }
            t.add(static_cast<char32_t>(std::stoul(first, nullptr, 16)), static_cast<char32_t>(std::stoul(last, nullptr, 16)),
                  script);
        }
        t.finish();
        return t;
    }

    /// Total lookup: unmapped code points resolve to Zzzz.
    ScriptId lookup(char32_t cp) const noexcept {
        const auto it = std::upper_bound(firsts_.begin(), firsts_.end(), cp);
        if (it == firsts_.begin()) return zzzz_;
        const std::size_t i = static_cast<std::size_t>(it - firsts_.begin()) - 1;
        return cp <= ranges_[i].last ? ranges_[i].id : zzzz_;
    }

    std::string_view name(ScriptId id) const { return names_[id]; }
    std::string_view script_of(char32_t cp) const { return name(lookup(cp)); }

    std::optional<ScriptId> id_of(std::string_view script) const {
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == script) return static_cast<ScriptId>(i);
        return std::nullopt;
    }

    /// Common, Inherited and unassigned code points carry no script signal.
    bool ignorable(ScriptId id) const noexcept { return id == zyyy_ || id == zinh_ || id == zzzz_; }

    std::size_t script_count() const { return names_.size(); }
    std::size_t range_count() const { return ranges_.size(); }
    const std::string& version() const { return version_; }

private:
    struct Range {
        char32_t first;
        char32_t last;
        ScriptId id;
    };

    ScriptId intern(std::string_view script) {
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == script) return static_cast<ScriptId>(i);
        names_.emplace_back(script);
        return static_cast<ScriptId>(names_.size() - 1);
    }

    void add(char32_t first, char32_t last, std::string_view script) {
        if (last < first) throw std::runtime_error("script range with last < first");
        ranges_.push_back({first, last, intern(script)});
    }

    void finish() {
        zyyy_ = intern("Zyyy");
        zinh_ = intern("Zinh");
        zzzz_ = intern(kUndeterminedScript);
        std::sort(ranges_.begin(), ranges_.end(), [](const Range& a, const Range& b) { return a.first < b.first; });
        for (std::size_t i = 1; i < ranges_.size(); ++i) {
            if (ranges_[i].first <= ranges_[i - 1].last) throw std::runtime_error("overlapping script ranges");
        }
        firsts_.reserve(ranges_.size());
        for (const auto& r : ranges_) firsts_.push_back(r.first);
    }

    std::vector<Range> ranges_;
    std::vector<char32_t> firsts_;
    std::vector<std::string> names_;
    ScriptId zyyy_ = 0, zinh_ = 0, zzzz_ = 0;
    std::string version_;
};

struct ScriptGuess {
    std::string script{kUndeterminedScript};
    double confidence = 0.0;

    friend bool operator==(const ScriptGuess&, const ScriptGuess&) = default;
};

/// Per-script code point tallies for a piece of text.
class ScriptTally {
public:
    explicit ScriptTally(const ScriptRanges& ranges) : ranges_(&ranges), counts_(ranges.script_count(), 0) {}

    void add_text(std::string_view text) {
        unicode::for_each_code_point(text, [&](char32_t cp) {
            if (unicode::is_whitespace(cp)) return;
            ++non_space_;
            const auto id = ranges_->lookup(cp);
            if (ranges_->ignorable(id)) return;
            ++counts_[id];
            ++counted_;
        });
    }

    /// Script-bearing code points.
    std::uint64_t counted() const { return counted_; }
    /// All non-whitespace code points, script-bearing or not.
    std::uint64_t non_space() const { return non_space_; }

    /// Plurality script after folding Han with kana (Jpan) or hangul (Kore)
    /// when both sides exceed the composite share. Ties go to the smaller code.
    std::pair<std::string, std::uint64_t> winner(double composite_share = 0.05) const {
        if (counted_ == 0) return {std::string(kUndeterminedScript), 0};
        std::vector<std::pair<std::string, std::uint64_t>> totals;
        for (std::size_t i = 0; i < counts_.size(); ++i) {
            if (counts_[i] != 0) totals.emplace_back(std::string(ranges_->name(static_cast<ScriptRanges::ScriptId>(i))), counts_[i]);
        }
        const auto get = [&](std::string_view s) -> std::uint64_t {
            for (const auto& [name, n] : totals)
                if (name == s) return n;
            return 0;
        };
        const auto take = [&](std::string_view s) {
            totals.erase(std::remove_if(totals.begin(), totals.end(), [&](const auto& t) { return t.first == s; }), totals.end());
        };
        const double total = static_cast<double>(counted_);
        const std::uint64_t han = get("Hani");
        const std::uint64_t kana = get("Hira") + get("Kana");
        const std::uint64_t hangul = get("Hang");
        const bool han_present = static_cast<double>(han) / total > composite_share;
        if (han_present && static_cast<double>(kana) / total > composite_share) {
            take("Hani");
            take("Hira");
            take("Kana");
            totals.emplace_back("Jpan", han + kana);
        } else if (han_present && static_cast<double>(hangul) / total > composite_share) {
            take("Hani");
            take("Hang");
            totals.emplace_back("Kore", han + hangul);
        }
        const auto best = std::min_element(totals.begin(), totals.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        return *best;
    }

private:
    const ScriptRanges* ranges_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t counted_ = 0;
    std::uint64_t non_space_ = 0;
};

/// Plurality script of one line and its share of script-bearing code points.
inline ScriptGuess line_script(std::string_view line, const ScriptRanges& ranges = ScriptRanges::builtin()) {
    ScriptTally tally(ranges);
    tally.add_text(line);
    if (tally.counted() == 0) return {};
    auto [script, n] = tally.winner();
    return {std::move(script), static_cast<double>(n) / static_cast<double>(tally.counted())};
}

class UndetectableScript : public std::runtime_error {
public:
    UndetectableScript() : std::runtime_error("undetectable: no non-empty lines") {}
};

struct DatasetScriptOptions {
    std::size_t sample_size = 100;
    double threshold = 0.5;
};

/// Accumulates lines until the sample is full; usable over a stream.
class DatasetScriptDetector {
public:
    explicit DatasetScriptDetector(const ScriptRanges& ranges = ScriptRanges::builtin(), DatasetScriptOptions opts = {})
        : ranges_(&ranges), opts_(opts), tally_(ranges) {
        if (opts_.sample_size == 0) throw std::invalid_argument("sample_size must be >= 1");
    }

    /// Returns false once the sample is complete.
    bool feed(std::string_view line) {
        if (sampled_ >= opts_.sample_size) return false;
        if (unicode::trim(line).empty()) return true;
        if (sampled_ == 0) first_line_ = std::string(line);
        tally_.add_text(line);
        ++sampled_;
        return sampled_ < opts_.sample_size;
    }

    std::size_t sampled() const { return sampled_; }

    /// Throws UndetectableScript when no non-empty line was fed.
    std::string result() const {
        if (sampled_ == 0) throw UndetectableScript();
        if (tally_.non_space() > 0) {
            const auto [script, n] = tally_.winner();
            const double share = static_cast<double>(n) / static_cast<double>(tally_.non_space());
            if (n > 0 && share >= opts_.threshold) return script;
        }
        return line_script(first_line_, *ranges_).script;
    }

private:
    const ScriptRanges* ranges_;
    DatasetScriptOptions opts_;
    ScriptTally tally_;
    std::size_t sampled_ = 0;
    std::string first_line_;
};

template <typename Lines>
std::string dataset_script(const Lines& lines, const ScriptRanges& ranges = ScriptRanges::builtin(),
                           DatasetScriptOptions opts = {}) {
    DatasetScriptDetector detector(ranges, opts);
    for (const auto& line : lines) {
        if (!detector.feed(std::string_view(line))) break;
    }
    return detector.result();
}

}  // namespace polyglot_forge
