#pragma once

// Language-code normalization to ISO 639-3 and pair labelling.
//
// normalize_code runs three steps in order: the primary subtag is already a
// valid ISO 639-3 code; the denotation (or its primary subtag) is a known
// alias; otherwise "unknown".

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "polyglot_forge/corpus_model.hpp"

namespace polyglot_forge {

namespace data {
#include "polyglot_forge/data/iso639_table.inc"
}  // namespace data

inline constexpr std::string_view kUnknownCode = "unknown";

enum class NormalizeMethod { exact, alias, unknown };

inline std::string_view to_string(NormalizeMethod m) {
    switch (m) {
        case NormalizeMethod::exact:
            return "exact";
        case NormalizeMethod::alias:
            return "alias";
        case NormalizeMethod::unknown:
            break;
    }
    return "unknown";
}

struct NormalizedCode {
    std::string code;
    NormalizeMethod method = NormalizeMethod::unknown;
    // Subtags parsed off the denotation; never folded into `code`.
    std::optional<std::string> script_subtag;  // Titlecase, e.g. "Latn"
    std::optional<std::string> region_subtag;  // uppercase, e.g. "BR" or "419"
};

inline std::string ascii_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

/// Valid ISO 639-3 codes plus the alias map. Immutable once built.
class CodeTable {
public:
    /// The embedded table generated from the ISO 639 registry and the OPUS overlay.
    static const CodeTable& builtin() {
        static const CodeTable table = [] {
            CodeTable t;
            t.version_ = std::string(data::kIso639Version);
            for (auto code : data::kIso639Codes) t.codes_.emplace(code);
            for (const auto& [k, v] : data::kIso639Aliases) t.aliases_.emplace(k, v);
            return t;
        }();
        return table;
    }

    /// Builtin code set with aliases read from a TSV of (denotation, iso639_3).
    /// Lines starting with '#' are comments. Throws std::runtime_error on
    /// unreadable files or aliases that target unknown codes.
    static CodeTable from_alias_tsv(const std::string& path, bool merge_builtin_aliases = true) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open alias table: " + path);
        CodeTable t;
        const CodeTable& base = builtin();
        t.codes_ = base.codes_;
        if (merge_builtin_aliases) t.aliases_ = base.aliases_;
        t.version_ = base.version_ + " + " + path;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line.front() == '#') continue;
            const auto tab = line.find('\t');
            if (tab == std::string::npos) {
                throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected two tab-separated columns");
            }
            std::string denotation = ascii_lower(line.substr(0, tab));
            std::string target = ascii_lower(line.substr(tab + 1));
            if (const auto t2 = target.find('\t'); t2 != std::string::npos) target.resize(t2);
            if (!t.codes_.contains(target)) {
                throw std::runtime_error(path + ":" + std::to_string(line_no) + ": alias target '" + target +
                                         "' is not a valid ISO 639-3 code");
            }
            t.aliases_[denotation] = target;
        }
        return t;
    }

    bool is_valid(std::string_view code) const { return codes_.contains(std::string(code)); }

    std::optional<std::string> alias(std::string_view denotation) const {
        const auto it = aliases_.find(std::string(denotation));
        if (it == aliases_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t code_count() const { return codes_.size(); }
    std::size_t alias_count() const { return aliases_.size(); }
    const std::string& version() const { return version_; }

private:
    std::unordered_set<std::string> codes_;
    std::unordered_map<std::string, std::string> aliases_;
    std::string version_;
};

namespace detail {

inline bool all_alpha(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalpha(c) != 0; });
}

inline bool all_digit(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

}  // namespace detail

/// Normalizes a source-dataset language denotation. Pure and deterministic.
inline NormalizedCode normalize_code(std::string_view denotation, const CodeTable& table = CodeTable::builtin()) {
    NormalizedCode out;
    out.code = std::string(kUnknownCode);

    std::string lowered = ascii_lower(unicode::trim(denotation));
    std::replace(lowered.begin(), lowered.end(), '_', '-');

    std::string_view rest = lowered;
    const auto dash = rest.find('-');
    const std::string primary(rest.substr(0, dash));
    if (dash != std::string_view::npos) {
        std::string_view tail = rest.substr(dash + 1);
        while (!tail.empty()) {
            const auto next = tail.find('-');
            const std::string_view sub = tail.substr(0, next);
            if (sub.size() == 4 && detail::all_alpha(sub) && !out.script_subtag) {
                std::string script(sub);
                script[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(script[0])));
                out.script_subtag = std::move(script);
            } else if (((sub.size() == 2 && detail::all_alpha(sub)) || (sub.size() == 3 && detail::all_digit(sub))) &&
                       !out.region_subtag) {
                std::string region(sub);
                std::transform(region.begin(), region.end(), region.begin(),
                               [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
                out.region_subtag = std::move(region);
            }
            if (next == std::string_view::npos) break;
            tail = tail.substr(next + 1);
        }
    }

    if (primary.size() == 3 && table.is_valid(primary)) {
        out.code = primary;
        out.method = NormalizeMethod::exact;
        return out;
    }
    if (auto a = table.alias(lowered)) {
        out.code = *a;
        out.method = NormalizeMethod::alias;
        return out;
    }
    if (primary != lowered) {
        if (auto a = table.alias(primary)) {
            out.code = *a;
            out.method = NormalizeMethod::alias;
            return out;
        }
    }
    return out;
}

inline std::string make_pair_label(const LanguageTag& src, const LanguageTag& tgt) { return PairLabel{src, tgt}.render(); }

/// Orders the two tags by rendered form so X-Y and Y-X share one key.
inline std::pair<LanguageTag, LanguageTag> canonical_pair(const LanguageTag& a, const LanguageTag& b) {
    if (b.render() < a.render()) return {b, a};
    return {a, b};
}

}  // namespace polyglot_forge
