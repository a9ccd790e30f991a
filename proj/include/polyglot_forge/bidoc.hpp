#pragma once

// Packs bilingual records into pseudo-documents of ten pairs, one language
// direction per document, each pair on its own line:
//   [eng_Latn]: Hello. [fra_Latn]: Bonjour.

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "polyglot_forge/corpus_model.hpp"
#include "polyglot_forge/langid.hpp"

namespace polyglot_forge {

struct PseudoDoc {
    PairLabel pair;
    std::string body;
    std::size_t n_pairs = 0;

    friend bool operator==(const PseudoDoc&, const PseudoDoc&) = default;
};

struct ChunkOptions {
    std::size_t chunk = 10;
    bool drop_remainder = false;
    // Reproduce the listing byte for byte: a space before every LF.
    bool strict_listing = false;
};

/// Pure interpolation; brackets inside the texts are not escaped.
inline std::string format_pair_line(const BiRecord& rec) {
    std::string line;
    line.reserve(rec.src_txt.size() + rec.tgt_txt.size() + 32);
    line += '[';
    line += rec.src_lang.render();
    line += "]: ";
    line += rec.src_txt;
    line += " [";
    line += rec.tgt_lang.render();
    line += "]: ";
    line += rec.tgt_txt;
    return line;
}

/// Greedy packing in input order. Every record must share the first record's
/// direction; throws std::invalid_argument otherwise.
inline std::vector<PseudoDoc> chunk_pairs(const std::vector<BiRecord>& records, const ChunkOptions& opts = {}) {
    if (opts.chunk == 0) throw std::invalid_argument("chunk size must be >= 1");
    std::vector<PseudoDoc> docs;
    if (records.empty()) return docs;
    const PairLabel pair{records.front().src_lang, records.front().tgt_lang};
    const std::string separator = opts.strict_listing ? " \n" : "\n";
    PseudoDoc current{pair, {}, 0};
    for (const auto& rec : records) {
        if (!(rec.src_lang == pair.src && rec.tgt_lang == pair.tgt)) {
            throw std::invalid_argument("chunk_pairs: record direction " + PairLabel{rec.src_lang, rec.tgt_lang}.render() +
                                        " differs from " + pair.render());
        }
        if (current.n_pairs > 0) current.body += separator;
        current.body += format_pair_line(rec);
        if (++current.n_pairs == opts.chunk) {
            docs.push_back(std::move(current));
            current = PseudoDoc{pair, {}, 0};
        }
    }
    if (current.n_pairs > 0 && !opts.drop_remainder) docs.push_back(std::move(current));
    return docs;
}

/// Groups by direction (src, tgt as given, not canonicalized), keeping input
/// order within each direction, then chunks each group. Directions come out
/// sorted by label.
inline std::vector<PseudoDoc> chunk_by_direction(const std::vector<BiRecord>& records, const ChunkOptions& opts = {}) {
    std::map<std::string, std::vector<BiRecord>> groups;
    for (const auto& r : records) groups[PairLabel{r.src_lang, r.tgt_lang}.render()].push_back(r);
    std::vector<PseudoDoc> out;
    for (auto& [label, group] : groups) {
        auto docs = chunk_pairs(group, opts);
        for (auto& d : docs) out.push_back(std::move(d));
    }
    return out;
}

inline Json pseudo_doc_to_json(const PseudoDoc& doc) {
    return Json{{"pair", doc.pair.render()}, {"body", doc.body}, {"n_pairs", doc.n_pairs}};
}

/// Raw text: bodies joined by `delimiter` (default one blank line), LF at the end.
inline std::string render_pseudo_docs(const std::vector<PseudoDoc>& docs, const std::string& delimiter = "\n\n") {
    std::string out;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (i > 0) out += delimiter;
        out += docs[i].body;
    }
    if (!docs.empty()) out += '\n';
    return out;
}

}  // namespace polyglot_forge
