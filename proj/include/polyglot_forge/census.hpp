#pragma once

// Whitespace token counting, per-language / per-pair aggregation and
// resource-tier classification.

#include <array>
#include <cstddef>
#include <cstdio>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "polyglot_forge/corpus_model.hpp"
#include "polyglot_forge/langid.hpp"
#include "polyglot_forge/unicode.hpp"

namespace polyglot_forge {

/// Maximal runs of non-whitespace code points.
inline std::uint64_t count_tokens(std::string_view text) {
    std::uint64_t n = 0;
    bool in_token = false;
    unicode::for_each_code_point(text, [&](char32_t cp) {
        if (unicode::is_whitespace(cp)) {
            in_token = false;
        } else if (!in_token) {
            in_token = true;
            ++n;
        }
    });
    return n;
}

enum class ResourceTier { very_high, high, medium_high, medium, medium_low, low, very_low };

inline constexpr std::array<ResourceTier, 7> kAllTiers = {ResourceTier::very_high,  ResourceTier::high, ResourceTier::medium_high,
                                                          ResourceTier::medium,     ResourceTier::medium_low,
                                                          ResourceTier::low,        ResourceTier::very_low};

inline std::string_view to_string(ResourceTier t) {
    switch (t) {
        case ResourceTier::very_high:
            return "very-high";
        case ResourceTier::high:
            return "high";
        case ResourceTier::medium_high:
            return "medium-high";
        case ResourceTier::medium:
            return "medium";
        case ResourceTier::medium_low:
            return "medium-low";
        case ResourceTier::low:
            return "low";
        case ResourceTier::very_low:
            break;
    }
    return "very-low";
}

inline std::optional<ResourceTier> parse_tier(std::string_view s) {
    for (auto t : kAllTiers) {
        if (to_string(t) == s) return t;
    }
    // the mix table spells tiers with spaces
    if (s == "very high") return ResourceTier::very_high;
    if (s == "very low") return ResourceTier::very_low;
    return std::nullopt;
}

/// Strictly-greater-than thresholds checked from the top band down.
inline ResourceTier classify_tier(std::uint64_t tokens) {
    if (tokens > 10'000'000'000ULL) return ResourceTier::very_high;
    if (tokens > 1'000'000'000ULL) return ResourceTier::high;
    if (tokens > 500'000'000ULL) return ResourceTier::medium_high;
    if (tokens > 100'000'000ULL) return ResourceTier::medium;
    if (tokens > 10'000'000ULL) return ResourceTier::medium_low;
    if (tokens > 1'000'000ULL) return ResourceTier::low;
    return ResourceTier::very_low;
}

struct KeyStats {
    std::uint64_t segments = 0;
    std::uint64_t tokens = 0;

    friend bool operator==(const KeyStats&, const KeyStats&) = default;
};

struct TierTotals {
    std::uint64_t keys = 0;
    std::uint64_t tokens = 0;

    friend bool operator==(const TierTotals&, const TierTotals&) = default;
};

struct CorpusStats {
    std::map<std::string, KeyStats> per_key;
    std::array<TierTotals, 7> tier_summary{};
    std::uint64_t total_tokens = 0;

    const TierTotals& tier(ResourceTier t) const { return tier_summary[static_cast<std::size_t>(t)]; }
    ResourceTier tier_of(const std::string& key) const { return classify_tier(per_key.at(key).tokens); }

    friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

/// Key under which a record is counted: its tag, or the canonical pair label.
inline std::string census_key(const Record& rec) {
    if (const auto* b = std::get_if<BiRecord>(&rec)) {
        const auto [a, c] = canonical_pair(b->src_lang, b->tgt_lang);
        return make_pair_label(a, c);
    }
    return std::get<MonoRecord>(rec).lang.render();
}

inline std::uint64_t record_tokens(const Record& rec) {
    if (const auto* b = std::get_if<BiRecord>(&rec)) return count_tokens(b->src_txt) + count_tokens(b->tgt_txt);
    return count_tokens(std::get<MonoRecord>(rec).text);
}

/// Shard-local accumulator; shards merge by addition in any order.
class CensusAccumulator {
public:
    void add(const Record& rec) { add(census_key(rec), 1, record_tokens(rec)); }

    void add(const std::string& key, std::uint64_t segments, std::uint64_t tokens) {
        auto& k = per_key_[key];
        k.segments += segments;
        k.tokens += tokens;
    }

    void merge(const CensusAccumulator& other) {
        for (const auto& [key, s] : other.per_key_) add(key, s.segments, s.tokens);
    }

    CorpusStats finish() const {
        CorpusStats stats;
        stats.per_key = per_key_;
        for (const auto& [key, s] : per_key_) {
            auto& t = stats.tier_summary[static_cast<std::size_t>(classify_tier(s.tokens))];
            ++t.keys;
            t.tokens += s.tokens;
            stats.total_tokens += s.tokens;
        }
        return stats;
    }

private:
    std::map<std::string, KeyStats> per_key_;
};

template <typename Range>
CorpusStats aggregate(const Range& records) {
    CensusAccumulator acc;
    for (const Record& r : records) acc.add(r);
    return acc.finish();
}

/// Scientific notation with `sig` significant digits, e.g. 428680000000 -> "4.3E+11".
/// Rounds half up on the exact integer.
inline std::string render_sci(std::uint64_t value, int sig = 2) {
    if (sig < 1 || sig > 18) throw std::invalid_argument("sig must be in [1,18]");
    if (value == 0) return sig == 1 ? "0E+00" : "0." + std::string(static_cast<std::size_t>(sig - 1), '0') + "E+00";
    int digits = 0;
    for (std::uint64_t v = value; v != 0; v /= 10) ++digits;
    int exponent = digits - 1;
    unsigned __int128 mantissa = value;
    const int drop = digits - sig;
    if (drop > 0) {
        unsigned __int128 pow = 1;
        for (int i = 0; i < drop; ++i) pow *= 10;
        mantissa = (mantissa + pow / 2) / pow;
    } else {
        for (int i = 0; i < -drop; ++i) mantissa *= 10;
    }
    unsigned __int128 limit = 1;
    for (int i = 0; i < sig; ++i) limit *= 10;
    if (mantissa >= limit) {
        mantissa /= 10;
        ++exponent;
    }
    std::string m = std::to_string(static_cast<std::uint64_t>(mantissa));
    std::string out(1, m[0]);
    if (sig > 1) out += "." + m.substr(1);
    char exp[16];
    std::snprintf(exp, sizeof exp, "E+%02d", exponent);
    return out + exp;
}

/// key, segments, tokens, tier; sorted by key.
inline void write_stats_tsv(const CorpusStats& stats, std::ostream& out) {
    out << "key\tsegments\ttokens\ttier\n";
    for (const auto& [key, s] : stats.per_key) {
        out << key << '\t' << s.segments << '\t' << s.tokens << '\t' << to_string(classify_tier(s.tokens)) << '\n';
    }
}

inline Json tier_summary_json(const CorpusStats& stats) {
    Json tiers = Json::array();
    std::uint64_t keys = 0;
    for (auto t : kAllTiers) {
        const auto& s = stats.tier(t);
        keys += s.keys;
        tiers.push_back(Json{{"tier", to_string(t)}, {"keys", s.keys}, {"tokens", s.tokens}, {"tokens_display", render_sci(s.tokens)}});
    }
    return Json{{"tiers", tiers},
                {"total_keys", keys},
                {"total_tokens", stats.total_tokens},
                {"total_tokens_display", render_sci(stats.total_tokens)}};
}

}  // namespace polyglot_forge
