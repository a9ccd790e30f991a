#pragma once

// Harmonized record schema and streaming JSONL I/O.
//
// Bilingual rows carry exactly nine keys in a fixed order:
//   src_lang, src_txt, tgt_lang, tgt_txt, url, collection, source,
//   original_src_lang, original_tgt_lang
// Monolingual rows carry: text, lang, url, collection, source, original_lang.
// Keys outside the schema are kept in `extra` and written back after the
// schema keys, in the order they were read.

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "polyglot_forge/unicode.hpp"

namespace polyglot_forge {

using Json = nlohmann::ordered_json;

enum class RecordKind { mono, bi };

inline std::string_view to_string(RecordKind kind) { return kind == RecordKind::mono ? "mono" : "bi"; }

inline std::optional<RecordKind> parse_record_kind(std::string_view s) {
    if (s == "mono" || s == "monolingual") return RecordKind::mono;
    if (s == "bi" || s == "bilingual") return RecordKind::bi;
    return std::nullopt;
}

/// ISO 639-3 code plus ISO 15924 script, rendered "eng_Latn".
struct LanguageTag {
    std::string code = "unknown";
    std::string script = "Zzzz";

    std::string render() const { return code + "_" + script; }

    /// Splits on the last underscore; both halves must be non-empty.
    static std::optional<LanguageTag> parse(std::string_view s) {
        const auto us = s.rfind('_');
        if (us == std::string_view::npos || us == 0 || us + 1 == s.size()) return std::nullopt;
        return LanguageTag{std::string(s.substr(0, us)), std::string(s.substr(us + 1))};
    }

    friend bool operator==(const LanguageTag&, const LanguageTag&) = default;
    friend auto operator<=>(const LanguageTag& a, const LanguageTag& b) { return a.render() <=> b.render(); }
};

struct PairLabel {
    LanguageTag src;
    LanguageTag tgt;

    std::string render() const { return src.render() + "-" + tgt.render(); }

    friend bool operator==(const PairLabel&, const PairLabel&) = default;
};

struct MonoRecord {
    std::string text;
    LanguageTag lang;
    std::optional<std::string> url;
    std::string collection;
    std::string source;
    std::string original_lang;
    Json extra = Json::object();

    friend bool operator==(const MonoRecord&, const MonoRecord&) = default;
};

struct BiRecord {
    LanguageTag src_lang;
    std::string src_txt;
    LanguageTag tgt_lang;
    std::string tgt_txt;
    std::optional<std::string> url;
    std::string collection;
    std::string source;
    std::string original_src_lang;
    std::string original_tgt_lang;
    Json extra = Json::object();

    friend bool operator==(const BiRecord&, const BiRecord&) = default;
};

using Record = std::variant<MonoRecord, BiRecord>;

inline RecordKind kind_of(const Record& r) { return std::holds_alternative<MonoRecord>(r) ? RecordKind::mono : RecordKind::bi; }

/// One input line's outcome: a record or a recoverable error.
struct ParsedLine {
    std::size_t line = 0;  // 1-based
    std::optional<Record> record;
    std::string error;

    bool ok() const { return record.has_value(); }
};

class RecordFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline const std::string& require_string(const Json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw RecordFormatError(std::string("missing required field '") + key + "'");
    if (!it->is_string()) throw RecordFormatError(std::string("field '") + key + "' is not a string");
    return it->get_ref<const std::string&>();
}

inline std::optional<std::string> optional_string(const Json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw RecordFormatError(std::string("field '") + key + "' is not a string");
    return it->get<std::string>();
}

inline LanguageTag require_tag(const Json& obj, const char* key) {
    const auto& s = require_string(obj, key);
    auto tag = LanguageTag::parse(s);
    if (!tag) throw RecordFormatError(std::string("field '") + key + "' is not a code_Script tag: " + s);
    return *tag;
}

inline bool is_schema_key(RecordKind kind, std::string_view key) {
    static constexpr std::string_view mono_keys[] = {"text", "lang", "url", "collection", "source", "original_lang"};
    static constexpr std::string_view bi_keys[] = {"src_lang",   "src_txt", "tgt_lang",          "tgt_txt",          "url",
                                                   "collection", "source",  "original_src_lang", "original_tgt_lang"};
    if (kind == RecordKind::mono) {
        for (auto k : mono_keys)
            if (k == key) return true;
    } else {
        for (auto k : bi_keys)
            if (k == key) return true;
    }
    return false;
}

inline Json collect_extra(const Json& obj, RecordKind kind) {
    Json extra = Json::object();
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!is_schema_key(kind, it.key())) extra[it.key()] = it.value();
    }
    return extra;
}

}  // namespace detail

/// Builds a record from an already-parsed JSON object. Throws RecordFormatError.
inline Record record_from_json(const Json& obj, RecordKind kind) {
    if (!obj.is_object()) throw RecordFormatError("line is not a JSON object");
    if (kind == RecordKind::mono) {
        MonoRecord r;
        r.text = detail::require_string(obj, "text");
        r.lang = detail::require_tag(obj, "lang");
        r.url = detail::optional_string(obj, "url");
        r.collection = detail::require_string(obj, "collection");
        r.source = detail::require_string(obj, "source");
        r.original_lang = detail::require_string(obj, "original_lang");
        r.extra = detail::collect_extra(obj, kind);
        return r;
    }
    BiRecord r;
    r.src_lang = detail::require_tag(obj, "src_lang");
    r.src_txt = detail::require_string(obj, "src_txt");
    r.tgt_lang = detail::require_tag(obj, "tgt_lang");
    r.tgt_txt = detail::require_string(obj, "tgt_txt");
    r.url = detail::optional_string(obj, "url");
    r.collection = detail::require_string(obj, "collection");
    r.source = detail::require_string(obj, "source");
    r.original_src_lang = detail::require_string(obj, "original_src_lang");
    r.original_tgt_lang = detail::require_string(obj, "original_tgt_lang");
    r.extra = detail::collect_extra(obj, kind);
    return r;
}

inline Json record_to_json(const Record& rec) {
    Json obj = Json::object();
    auto url = [](const std::optional<std::string>& u) { return u ? Json(*u) : Json(nullptr); };
    if (const auto* m = std::get_if<MonoRecord>(&rec)) {
        obj["text"] = m->text;
        obj["lang"] = m->lang.render();
        obj["url"] = url(m->url);
        obj["collection"] = m->collection;
        obj["source"] = m->source;
        obj["original_lang"] = m->original_lang;
        for (auto it = m->extra.begin(); it != m->extra.end(); ++it) obj[it.key()] = it.value();
    } else {
        const auto& b = std::get<BiRecord>(rec);
        obj["src_lang"] = b.src_lang.render();
        obj["src_txt"] = b.src_txt;
        obj["tgt_lang"] = b.tgt_lang.render();
        obj["tgt_txt"] = b.tgt_txt;
        obj["url"] = url(b.url);
        obj["collection"] = b.collection;
        obj["source"] = b.source;
        obj["original_src_lang"] = b.original_src_lang;
        obj["original_tgt_lang"] = b.original_tgt_lang;
        for (auto it = b.extra.begin(); it != b.extra.end(); ++it) obj[it.key()] = it.value();
    }
    return obj;
}

/// Serializes one record as a single JSONL line without the trailing LF.
inline std::string to_jsonl_line(const Record& rec) { return record_to_json(rec).dump(-1, ' ', false); }

/// Parses one line. Never throws; errors come back in ParsedLine::error.
inline ParsedLine parse_jsonl_line(std::string_view text, RecordKind kind, std::size_t line_no) {
    ParsedLine out;
    out.line = line_no;
    if (!unicode::is_valid_utf8(text)) {
        out.error = "invalid UTF-8";
        return out;
    }
    try {
        const Json obj = Json::parse(text.begin(), text.end());
        out.record = record_from_json(obj, kind);
    } catch (const Json::exception& e) {
        out.error = std::string("malformed JSON: ") + e.what();
    } catch (const RecordFormatError& e) {
        out.error = e.what();
    }
    return out;
}

/// Lazy line-by-line reader. Blank lines are skipped but still counted.
class JsonlReader {
public:
    JsonlReader(std::istream& in, RecordKind kind) : in_(in), kind_(kind) {}

    /// Reads the next non-blank line into `out`; false at end of stream.
    bool next(ParsedLine& out) {
        while (std::getline(in_, buffer_)) {
            ++line_;
            if (!buffer_.empty() && buffer_.back() == '\r') buffer_.pop_back();
            if (buffer_.empty()) continue;
            out = parse_jsonl_line(buffer_, kind_, line_);
            return true;
        }
        return false;
    }

    /// Reads up to `max_lines` raw non-blank lines with their line numbers.
    std::size_t next_raw_batch(std::vector<std::pair<std::size_t, std::string>>& batch, std::size_t max_lines) {
        batch.clear();
        while (batch.size() < max_lines && std::getline(in_, buffer_)) {
            ++line_;
            if (!buffer_.empty() && buffer_.back() == '\r') buffer_.pop_back();
            if (buffer_.empty()) continue;
            batch.emplace_back(line_, buffer_);
        }
        return batch.size();
    }

    std::size_t lines_read() const { return line_; }
    RecordKind kind() const { return kind_; }

private:
    std::istream& in_;
    RecordKind kind_;
    std::size_t line_ = 0;
    std::string buffer_;
};

/// Reads a whole stream; bad lines land in `errors`.
inline std::vector<Record> read_jsonl(std::istream& in, RecordKind kind, std::vector<ParsedLine>* errors = nullptr) {
    std::vector<Record> out;
    JsonlReader reader(in, kind);
    ParsedLine line;
    while (reader.next(line)) {
        if (line.ok()) {
            out.push_back(std::move(*line.record));
        } else if (errors != nullptr) {
            errors->push_back(std::move(line));
        }
    }
    return out;
}

class SinkWriteError : public std::runtime_error {
public:
    SinkWriteError(const std::string& what, std::size_t written) : std::runtime_error(what), written_(written) {}
    std::size_t written() const { return written_; }

private:
    std::size_t written_;
};

/// Writes one record per line. Throws SinkWriteError carrying the number of
/// records fully written before the failure.
template <typename Range>
std::size_t write_jsonl(const Range& records, std::ostream& sink) {
    std::size_t n = 0;
    for (const Record& rec : records) {
        const std::string line = to_jsonl_line(rec);
        sink.write(line.data(), static_cast<std::streamsize>(line.size()));
        sink.put('\n');
        if (!sink) throw SinkWriteError("write to sink failed", n);
        ++n;
    }
    sink.flush();
    if (!sink) throw SinkWriteError("flush of sink failed", n);
    return n;
}

}  // namespace polyglot_forge
