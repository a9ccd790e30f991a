#pragma once

// Quality filters for source-code files, bucketed by fork count.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include "polyglot_forge/unicode.hpp"

namespace polyglot_forge {

struct CodeMetrics {
    double avg_line_len = 0.0;
    std::size_t max_line_len = 0;
    double alnum_fraction = 0.0;
};

/// Lines split on LF; a trailing LF does not open an empty last line.
/// Lengths are in code points. alnum_fraction is over non-LF code points.
inline CodeMetrics code_metrics(std::string_view content) {
    CodeMetrics m;
    std::size_t lines = 0;
    std::size_t total_len = 0;
    std::size_t current = 0;
    std::size_t alnum = 0;
    bool open_line = false;
    unicode::for_each_code_point(content, [&](char32_t cp) {
        if (cp == U'\n') {
            ++lines;
            total_len += current;
            m.max_line_len = std::max(m.max_line_len, current);
            current = 0;
            open_line = false;
            return;
        }
        open_line = true;
        ++current;
        if (unicode::is_alnum(cp)) ++alnum;
    });
    if (open_line) {
        ++lines;
        total_len += current;
        m.max_line_len = std::max(m.max_line_len, current);
    }
    if (lines == 0) return m;
    m.avg_line_len = static_cast<double>(total_len) / static_cast<double>(lines);
    m.alnum_fraction = total_len == 0 ? 0.0 : static_cast<double>(alnum) / static_cast<double>(total_len);
    return m;
}

struct CodeBucketRule {
    double avg_line_max;
    std::size_t max_line_max;
    double alnum_min;
};

enum class ForkBucket { popular = 0, moderate = 1, rare = 2 };

inline std::string_view to_string(ForkBucket b) {
    switch (b) {
        case ForkBucket::popular:
            return "forks>25";
        case ForkBucket::moderate:
            return "forks15-25";
        case ForkBucket::rare:
            break;
    }
    return "forks<15";
}

/// forks > 25, 15..25 inclusive, < 15.
inline ForkBucket fork_bucket(std::uint64_t forks) {
    if (forks > 25) return ForkBucket::popular;
    if (forks >= 15) return ForkBucket::moderate;
    return ForkBucket::rare;
}

struct CodeFilterRules {
    std::array<CodeBucketRule, 3> buckets{{
        {120.0, 300, 0.30},
        {90.0, 150, 0.40},
        {80.0, 120, 0.45},
    }};
    std::uint64_t language_min_count = 50000;
    std::set<std::string> always_keep{"llvm"};

    const CodeBucketRule& rule_for(std::uint64_t forks) const { return buckets[static_cast<std::size_t>(fork_bucket(forks))]; }

    void validate() const {
        for (const auto& b : buckets) {
            if (!(b.avg_line_max > 0) || b.max_line_max == 0) throw std::invalid_argument("code-filter thresholds must be positive");
            if (!(b.alnum_min > 0.0 && b.alnum_min < 1.0)) throw std::invalid_argument("alnum_min must be in (0,1)");
        }
    }
};

struct CodeFileMeta {
    std::string content;
    std::uint64_t forks = 0;
    std::string language_label;
};

enum class CodeDropReason { avg_line_length, max_line_length, alnum_fraction };

inline std::string_view to_string(CodeDropReason r) {
    switch (r) {
        case CodeDropReason::avg_line_length:
            return "avg-line-length";
        case CodeDropReason::max_line_length:
            return "max-line-length";
        case CodeDropReason::alnum_fraction:
            break;
    }
    return "alnum-fraction";
}

struct CodeVerdict {
    std::optional<CodeDropReason> drop;
    bool keep() const { return !drop.has_value(); }
};

/// All three comparisons are strict.
inline CodeVerdict keep_code_metrics(const CodeMetrics& m, std::uint64_t forks, const CodeFilterRules& rules) {
    const auto& r = rules.rule_for(forks);
    if (!(m.avg_line_len < r.avg_line_max)) return {CodeDropReason::avg_line_length};
    if (!(m.max_line_len < r.max_line_max)) return {CodeDropReason::max_line_length};
    if (!(m.alnum_fraction > r.alnum_min)) return {CodeDropReason::alnum_fraction};
    return {};
}

inline CodeVerdict keep_code_file(const CodeFileMeta& meta, const CodeFilterRules& rules) {
    return keep_code_metrics(code_metrics(meta.content), meta.forks, rules);
}

/// Labels seen at least `min_count` times, plus any always-keep label that occurs.
inline std::set<std::string> language_frequency_filter(const std::map<std::string, std::uint64_t>& counts, std::uint64_t min_count,
                                                       const std::set<std::string>& always_keep = {"llvm"}) {
    std::set<std::string> kept;
    for (const auto& [label, n] : counts) {
        if (n >= min_count || always_keep.contains(label)) kept.insert(label);
    }
    return kept;
}

}  // namespace polyglot_forge
