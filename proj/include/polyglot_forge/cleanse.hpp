#pragma once

// Record-level cleaning: consecutive-repeat filter, missing-translation and
// length-mismatch filters for bitext, and exact content deduplication.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "polyglot_forge/corpus_model.hpp"
#include "polyglot_forge/digest.hpp"
#include "polyglot_forge/unicode.hpp"

namespace polyglot_forge {

struct CleanConfig {
    std::size_t max_consecutive_repeats = 5;
    double length_ratio_max = 9.0;
    std::size_t min_chars = 1;

    void validate() const {
        if (max_consecutive_repeats < 1) throw std::invalid_argument("max_consecutive_repeats must be >= 1");
        if (!(length_ratio_max > 1.0)) throw std::invalid_argument("length_ratio_max must be > 1");
    }
};

enum class DropReason { missing_translation, repeat, length_mismatch };

inline constexpr std::array<DropReason, 3> kAllDropReasons = {DropReason::missing_translation, DropReason::repeat,
                                                              DropReason::length_mismatch};

inline std::string_view to_string(DropReason r) {
    switch (r) {
        case DropReason::missing_translation:
            return "missing-translation";
        case DropReason::repeat:
            return "repeat";
        case DropReason::length_mismatch:
            break;
    }
    return "length-mismatch";
}

struct CleanVerdict {
    std::optional<DropReason> drop;

    bool keep() const { return !drop.has_value(); }
    static CleanVerdict kept() { return {}; }
    static CleanVerdict dropped(DropReason r) { return {r}; }
};

/// True iff some whitespace-delimited word, or some non-whitespace code
/// point, occurs more than `k` times in a row.
inline bool has_excessive_repeat(std::string_view text, std::size_t k) {
    if (k < 1) throw std::invalid_argument("repeat limit must be >= 1");

    char32_t prev_cp = 0;
    std::size_t cp_run = 0;
    std::string_view prev_word;
    std::size_t word_run = 0;
    std::size_t word_start = std::string_view::npos;

    const auto close_word = [&](std::size_t end) {
        if (word_start == std::string_view::npos) return false;
        const std::string_view word = text.substr(word_start, end - word_start);
        word_start = std::string_view::npos;
        if (word_run > 0 && word == prev_word) {
            ++word_run;
        } else {
            prev_word = word;
            word_run = 1;
        }
        return word_run > k;
    };

    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t start = pos;
        const char32_t cp = unicode::next_code_point(text, pos);
        if (unicode::is_whitespace(cp)) {
            cp_run = 0;
            if (close_word(start)) return true;
            continue;
        }
        if (word_start == std::string_view::npos) word_start = start;
        if (cp_run > 0 && cp == prev_cp) {
            ++cp_run;
        } else {
            prev_cp = cp;
            cp_run = 1;
        }
        if (cp_run > k) return true;
    }
    return close_word(text.size());
}

/// Filters apply in order missing-translation, repeat, length-mismatch; the
/// first one that fires is the reason.
inline CleanVerdict clean_birecord(const BiRecord& rec, const CleanConfig& cfg) {
    const auto src = unicode::trim(rec.src_txt);
    const auto tgt = unicode::trim(rec.tgt_txt);
    const std::size_t src_len = unicode::code_point_count(src);
    const std::size_t tgt_len = unicode::code_point_count(tgt);
    if (src_len < cfg.min_chars || tgt_len < cfg.min_chars || src_len == 0 || tgt_len == 0) {
        return CleanVerdict::dropped(DropReason::missing_translation);
    }
    if (has_excessive_repeat(rec.src_txt, cfg.max_consecutive_repeats) ||
        has_excessive_repeat(rec.tgt_txt, cfg.max_consecutive_repeats)) {
        return CleanVerdict::dropped(DropReason::repeat);
    }
    const auto longer = static_cast<double>(std::max(src_len, tgt_len));
    const auto shorter = static_cast<double>(std::min(src_len, tgt_len));
    if (longer / shorter > cfg.length_ratio_max) return CleanVerdict::dropped(DropReason::length_mismatch);
    return CleanVerdict::kept();
}

/// Monolingual rows only go through the emptiness and repeat filters; empty
/// text is reported under missing-translation.
inline CleanVerdict clean_monorecord(const MonoRecord& rec, const CleanConfig& cfg) {
    const std::size_t len = unicode::code_point_count(unicode::trim(rec.text));
    if (len < cfg.min_chars || len == 0) return CleanVerdict::dropped(DropReason::missing_translation);
    if (has_excessive_repeat(rec.text, cfg.max_consecutive_repeats)) return CleanVerdict::dropped(DropReason::repeat);
    return CleanVerdict::kept();
}

inline CleanVerdict clean_record(const Record& rec, const CleanConfig& cfg) {
    if (const auto* b = std::get_if<BiRecord>(&rec)) return clean_birecord(*b, cfg);
    return clean_monorecord(std::get<MonoRecord>(rec), cfg);
}

/// Canonical text used for hashing: NFC, whitespace runs collapsed, trimmed.
inline std::string canonical_text(std::string_view s) { return unicode::collapse_whitespace(unicode::to_nfc(s)); }

/// Digest of a record's content tuple. Metadata never contributes.
inline Digest128 content_digest(const Record& rec) {
    Blake2b128 h;
    if (const auto* b = std::get_if<BiRecord>(&rec)) {
        h.update_field("bi").update_field(canonical_text(b->src_txt)).update_field(canonical_text(b->tgt_txt));
    } else {
        h.update_field("mono").update_field(canonical_text(std::get<MonoRecord>(rec).text));
    }
    return h.finish();
}

/// Set of content digests with an atomic insert-or-check.
class DedupIndex {
public:
    /// Inserts `d`; true if it was not present before.
    bool insert(const Digest128& d) {
        auto& shard = shards_[d.bytes[15] % kShards];
        std::lock_guard lock(shard.mutex);
        return shard.set.insert(d).second;
    }

    bool contains(const Digest128& d) const {
        const auto& shard = shards_[d.bytes[15] % kShards];
        std::lock_guard lock(shard.mutex);
        return shard.set.contains(d);
    }

    std::size_t size() const {
        std::size_t n = 0;
        for (const auto& s : shards_) {
            std::lock_guard lock(s.mutex);
            n += s.set.size();
        }
        return n;
    }

private:
    static constexpr std::size_t kShards = 64;
    struct Shard {
        mutable std::mutex mutex;
        std::unordered_set<Digest128, Digest128Hash> set;
    };
    std::array<Shard, kShards> shards_;
};

/// First occurrence of each content digest survives, input order preserved.
inline std::vector<Record> dedup(const std::vector<Record>& records, DedupIndex& index) {
    std::vector<Record> out;
    out.reserve(records.size());
    for (const auto& rec : records) {
        if (index.insert(content_digest(rec))) out.push_back(rec);
    }
    return out;
}

}  // namespace polyglot_forge
