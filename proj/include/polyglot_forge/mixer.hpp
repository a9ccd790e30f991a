#pragma once

// Data-mix planning, record-level sampling and training-budget arithmetic.
//
// A mix plan scales each (data type, category) token mass by a sample rate.
// Final token counts are exact integers (round half up); the two percentage
// columns are each row's share of the whole bilingual mix and of the
// monolingual mix, which is the same plan without any bilingual rows.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "polyglot_forge/cleanse.hpp"
#include "polyglot_forge/corpus_model.hpp"
#include "polyglot_forge/digest.hpp"

namespace polyglot_forge {

enum class DataType { instruction, code, book, paper, monolingual, bilingual };

inline std::string_view to_string(DataType t) {
    switch (t) {
        case DataType::instruction:
            return "instruction";
        case DataType::code:
            return "code";
        case DataType::book:
            return "book";
        case DataType::paper:
            return "paper";
        case DataType::monolingual:
            return "monolingual";
        case DataType::bilingual:
            break;
    }
    return "bilingual";
}

inline std::optional<DataType> parse_data_type(std::string_view s) {
    for (auto t : {DataType::instruction, DataType::code, DataType::book, DataType::paper, DataType::monolingual, DataType::bilingual}) {
        if (to_string(t) == s) return t;
    }
    return std::nullopt;
}

class MixPlanError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exact decimal sample rate: units / 10^scale.
class Rate {
public:
    Rate() = default;

    static Rate parse(std::string_view s) {
        Rate r;
        std::int64_t units = 0;
        int scale = 0;
        bool seen_point = false;
        bool seen_digit = false;
        for (char c : s) {
            if (c == '.') {
                if (seen_point) throw MixPlanError("bad rate: " + std::string(s));
                seen_point = true;
            } else if (c >= '0' && c <= '9') {
                if (units > (std::numeric_limits<std::int64_t>::max() - 9) / 10 || scale >= 18) {
                    throw MixPlanError("rate has too many digits: " + std::string(s));
                }
                units = units * 10 + (c - '0');
                if (seen_point) ++scale;
                seen_digit = true;
            } else {
                throw MixPlanError("bad rate: " + std::string(s));
            }
        }
        if (!seen_digit) throw MixPlanError("bad rate: " + std::string(s));
        while (scale > 0 && units % 10 == 0) {
            units /= 10;
            --scale;
        }
        r.units_ = units;
        r.scale_ = scale;
        return r;
    }

    /// Shortest decimal that round-trips the double, so 0.1 is exactly 1/10.
    static Rate from_double(double v) {
        if (!std::isfinite(v) || v < 0) throw MixPlanError("rate must be a finite non-negative number");
        char buf[64];
        const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
        if (res.ec != std::errc()) throw MixPlanError("cannot format rate");
        return parse(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
    }

    double value() const { return static_cast<double>(units_) / std::pow(10.0, scale_); }
    bool positive() const { return units_ > 0; }

    /// round-half-up(tokens * rate), exact.
    std::uint64_t apply(std::uint64_t tokens) const {
        using u128 = unsigned __int128;
        u128 den = 1;
        for (int i = 0; i < scale_; ++i) den *= 10;
        const u128 num = static_cast<u128>(tokens) * static_cast<u128>(units_);
        const u128 out = (2 * num + den) / (2 * den);
        if (out > std::numeric_limits<std::uint64_t>::max()) throw std::overflow_error("final token count overflows 64 bits");
        return static_cast<std::uint64_t>(out);
    }

    std::uint64_t whole() const {
        std::int64_t den = 1;
        for (int i = 0; i < scale_; ++i) den *= 10;
        return static_cast<std::uint64_t>(units_ / den);
    }

    /// rate - floor(rate) as a double in [0,1).
    double residual() const {
        std::int64_t den = 1;
        for (int i = 0; i < scale_; ++i) den *= 10;
        return static_cast<double>(units_ % den) / static_cast<double>(den);
    }

    std::string str() const {
        std::string digits = std::to_string(units_);
        if (scale_ == 0) return digits + ".0";
        if (static_cast<int>(digits.size()) <= scale_) digits.insert(0, static_cast<std::size_t>(scale_ + 1 - static_cast<int>(digits.size())), '0');
        digits.insert(digits.size() - static_cast<std::size_t>(scale_), ".");
        return digits;
    }

    friend bool operator==(const Rate&, const Rate&) = default;

private:
    std::int64_t units_ = 1;
    int scale_ = 0;
};

struct MixInputRow {
    DataType data_type = DataType::monolingual;
    std::string category;
    std::uint64_t original_tokens = 0;
    Rate rate;
    // Final count published alongside the rate, checked but never substituted.
    std::optional<std::uint64_t> reported_final;
};

struct MixPlanRow {
    DataType data_type = DataType::monolingual;
    std::string category;
    Rate rate;
    std::uint64_t original_tokens = 0;
    std::uint64_t final_tokens = 0;
    double pct_bilingual_mix = 0.0;  // fraction in [0,1]
    std::optional<double> pct_monolingual_mix;
    std::optional<std::uint64_t> reported_final;
};

struct MixDiscrepancy {
    DataType data_type;
    std::string category;
    std::uint64_t computed_final;
    std::uint64_t reported_final;
    double implied_rate;

    std::string message() const {
        std::ostringstream os;
        os << "discrepancy in " << to_string(data_type) << "/" << category << ": rate-consistent final " << computed_final
           << " != reported final " << reported_final << " (reported value implies rate " << std::setprecision(6) << implied_rate << ")";
        return os.str();
    }
};

struct MixPlan {
    std::vector<MixPlanRow> rows;
    std::uint64_t bilingual_mix_tokens = 0;
    std::uint64_t monolingual_mix_tokens = 0;
    std::vector<MixDiscrepancy> warnings;

    const MixPlanRow* find(DataType t, std::string_view category) const {
        for (const auto& r : rows)
            if (r.data_type == t && r.category == category) return &r;
        return nullptr;
    }
};

namespace detail {

inline void fill_percentages(MixPlan& plan) {
    plan.bilingual_mix_tokens = 0;
    plan.monolingual_mix_tokens = 0;
    for (const auto& r : plan.rows) {
        plan.bilingual_mix_tokens += r.final_tokens;
        if (r.data_type != DataType::bilingual) plan.monolingual_mix_tokens += r.final_tokens;
    }
    for (auto& r : plan.rows) {
        r.pct_bilingual_mix = plan.bilingual_mix_tokens == 0
                                  ? 0.0
                                  : static_cast<double>(r.final_tokens) / static_cast<double>(plan.bilingual_mix_tokens);
        if (r.data_type == DataType::bilingual) {
            r.pct_monolingual_mix.reset();
        } else {
            r.pct_monolingual_mix = plan.monolingual_mix_tokens == 0
                                        ? 0.0
                                        : static_cast<double>(r.final_tokens) / static_cast<double>(plan.monolingual_mix_tokens);
        }
    }
}

}  // namespace detail

/// Throws MixPlanError on empty input, duplicate (type, category) or a
/// non-positive rate. Rows whose reported final disagrees with the rate are
/// listed in `warnings`; their final stays the rate-consistent value.
inline MixPlan plan_mix(const std::vector<MixInputRow>& inputs) {
    if (inputs.empty()) throw MixPlanError("mix plan needs at least one row");
    MixPlan plan;
    std::set<std::pair<DataType, std::string>> seen;
    for (const auto& in : inputs) {
        if (!seen.emplace(in.data_type, in.category).second) {
            throw MixPlanError("duplicate mix row " + std::string(to_string(in.data_type)) + "/" + in.category);
        }
        if (!in.rate.positive()) {
            throw MixPlanError("rate must be > 0 for " + std::string(to_string(in.data_type)) + "/" + in.category);
        }
        MixPlanRow row;
        row.data_type = in.data_type;
        row.category = in.category;
        row.rate = in.rate;
        row.original_tokens = in.original_tokens;
        row.final_tokens = in.rate.apply(in.original_tokens);
        row.reported_final = in.reported_final;
        if (in.reported_final && *in.reported_final != row.final_tokens) {
            const double implied =
                in.original_tokens == 0 ? 0.0 : static_cast<double>(*in.reported_final) / static_cast<double>(in.original_tokens);
            plan.warnings.push_back({in.data_type, in.category, row.final_tokens, *in.reported_final, implied});
        }
        plan.rows.push_back(std::move(row));
    }
    detail::fill_percentages(plan);
    return plan;
}

/// Same plan without bilingual rows; shares recomputed over what remains.
inline MixPlan derive_monolingual_mix(const MixPlan& plan) {
    MixPlan out;
    for (const auto& r : plan.rows) {
        if (r.data_type != DataType::bilingual) out.rows.push_back(r);
    }
    for (const auto& w : plan.warnings) {
        if (w.data_type != DataType::bilingual) out.warnings.push_back(w);
    }
    detail::fill_percentages(out);
    return out;
}

/// Percentage with two decimals, half up: 0.003174 -> "0.32%".
inline std::string format_percent(double fraction) {
    const double scaled = std::floor(fraction * 10000.0 + 0.5 + 1e-9);
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << scaled / 100.0 << "%";
    return os.str();
}

inline std::string group_thousands(std::uint64_t v) {
    std::string s = std::to_string(v);
    for (int i = static_cast<int>(s.size()) - 3; i > 0; i -= 3) s.insert(static_cast<std::size_t>(i), ",");
    return s;
}

/// Aligned table with the columns Type, Category, Rate, Original, Final, Bilingual, Monolingual.
inline void print_plan_table(const MixPlan& plan, std::ostream& out) {
    std::vector<std::array<std::string, 7>> cells;
    cells.push_back({"Type", "Category", "Rate", "Original", "Final", "Bilingual", "Monolingual"});
    for (const auto& r : plan.rows) {
        cells.push_back({std::string(to_string(r.data_type)), r.category, r.rate.str(), group_thousands(r.original_tokens),
                         group_thousands(r.final_tokens), format_percent(r.pct_bilingual_mix),
                         format_percent(r.pct_monolingual_mix.value_or(0.0))});
    }
    std::array<std::size_t, 7> width{};
    for (const auto& row : cells)
        for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    for (const auto& row : cells) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            const bool numeric = i >= 2;
            if (numeric) {
                out << std::setw(static_cast<int>(width[i])) << std::right << row[i];
            } else {
                out << std::setw(static_cast<int>(width[i])) << std::left << row[i];
            }
            out << (i + 1 == row.size() ? "\n" : "  ");
        }
    }
    out << std::right;
    out << "bilingual mix tokens: " << group_thousands(plan.bilingual_mix_tokens)
        << "  monolingual mix tokens: " << group_thousands(plan.monolingual_mix_tokens) << "\n";
    for (const auto& w : plan.warnings) out << "warning: " << w.message() << "\n";
}

inline Json plan_to_json(const MixPlan& plan, std::string_view tool_version, std::uint64_t seed) {
    Json rows = Json::array();
    for (const auto& r : plan.rows) {
        Json row{{"data_type", to_string(r.data_type)},
                 {"category", r.category},
                 {"rate", r.rate.str()},
                 {"original_tokens", r.original_tokens},
                 {"final_tokens", r.final_tokens},
                 {"pct_bilingual_mix", r.pct_bilingual_mix},
                 {"pct_monolingual_mix", r.pct_monolingual_mix ? Json(*r.pct_monolingual_mix) : Json(nullptr)}};
        if (r.reported_final) row["reported_final"] = *r.reported_final;
        rows.push_back(std::move(row));
    }
    Json warnings = Json::array();
    for (const auto& w : plan.warnings) {
        warnings.push_back(Json{{"data_type", to_string(w.data_type)},
                                {"category", w.category},
                                {"computed_final", w.computed_final},
                                {"reported_final", w.reported_final},
                                {"implied_rate", w.implied_rate},
                                {"message", w.message()}});
    }
    return Json{{"tool_version", tool_version},
                {"seed", seed},
                {"denominators", Json{{"bilingual_mix", plan.bilingual_mix_tokens}, {"monolingual_mix", plan.monolingual_mix_tokens}}},
                {"rows", rows},
                {"warnings", warnings}};
}

/// Parses {data_type, category, original_tokens, rate[, reported_final]}.
/// Rates may be JSON numbers or decimal strings.
inline MixInputRow mix_row_from_json(const Json& j) {
    if (!j.is_object()) throw MixPlanError("mix row must be an object");
    MixInputRow row;
    const auto type = parse_data_type(j.at("data_type").get<std::string>());
    if (!type) throw MixPlanError("unknown data_type: " + j.at("data_type").get<std::string>());
    row.data_type = *type;
    row.category = j.at("category").get<std::string>();
    const auto& orig = j.at("original_tokens");
    if (!orig.is_number_unsigned() && !(orig.is_number_integer() && orig.get<std::int64_t>() >= 0)) {
        throw MixPlanError("original_tokens must be a non-negative integer");
    }
    row.original_tokens = orig.get<std::uint64_t>();
    const auto& rate = j.at("rate");
    if (rate.is_string()) {
        row.rate = Rate::parse(rate.get<std::string>());
    } else if (rate.is_number()) {
        row.rate = Rate::from_double(rate.get<double>());
    } else {
        throw MixPlanError("rate must be a number or decimal string");
    }
    if (const auto it = j.find("reported_final"); it != j.end() && !it->is_null()) row.reported_final = it->get<std::uint64_t>();
    return row;
}

struct SamplePlan {
    std::uint64_t repeats = 1;
    double residual = 0.0;
    std::uint64_t seed = 0;

    static SamplePlan from_rate(const Rate& rate, std::uint64_t seed) { return {rate.whole(), rate.residual(), seed}; }
};

/// How many copies of a record with content digest `d` the plan emits.
inline std::uint64_t sample_copies(const Digest128& d, const SamplePlan& plan) {
    std::uint64_t n = plan.repeats;
    if (plan.residual > 0.0) {
        const double u = std::ldexp(static_cast<double>(seeded_hash64(d, plan.seed)), -64);
        if (u < plan.residual) ++n;
    }
    return n;
}

/// Emits each record floor(rate) times plus once more with probability
/// equal to the residual, decided by a seeded hash of its content digest.
/// Copies stay adjacent and in input order; see interleave_copies.
inline std::vector<Record> sample_records(const std::vector<Record>& records, const SamplePlan& plan) {
    std::vector<Record> out;
    for (const auto& rec : records) {
        const auto copies = sample_copies(content_digest(rec), plan);
        for (std::uint64_t i = 0; i < copies; ++i) out.push_back(rec);
    }
    return out;
}

/// Seeded reorder keyed on (content digest, copy index) so that repeated
/// copies do not sit next to each other. Independent of thread count.
inline std::vector<Record> interleave_copies(std::vector<Record> records, std::uint64_t seed) {
    std::vector<std::pair<std::uint64_t, std::size_t>> keys;
    keys.reserve(records.size());
    std::vector<Digest128> digests;
    digests.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) digests.push_back(content_digest(records[i]));
    std::uint64_t copy = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        copy = (i > 0 && digests[i] == digests[i - 1]) ? copy + 1 : 0;
        keys.emplace_back(seeded_hash64(digests[i], seed ^ 0x9e3779b97f4a7c15ULL, copy), i);
    }
    std::sort(keys.begin(), keys.end());
    std::vector<Record> out;
    out.reserve(records.size());
    for (const auto& [key, idx] : keys) out.push_back(std::move(records[idx]));
    return out;
}

/// steps * batch * seqlen; throws std::overflow_error instead of wrapping.
inline std::uint64_t training_budget(std::uint64_t steps, std::uint64_t batch, std::uint64_t seqlen) {
    if (steps == 0 || batch == 0 || seqlen == 0) throw std::invalid_argument("training_budget arguments must be positive");
    std::uint64_t partial = 0;
    std::uint64_t total = 0;
    if (__builtin_mul_overflow(steps, batch, &partial) || __builtin_mul_overflow(partial, seqlen, &total)) {
        throw std::overflow_error("training budget overflows 64 bits");
    }
    return total;
}

}  // namespace polyglot_forge
