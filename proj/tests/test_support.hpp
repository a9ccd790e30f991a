#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "polyglot_forge/corpus_model.hpp"
#include "polyglot_forge/unicode.hpp"

namespace test_support {

inline std::string source_path(const std::string& rel) { return std::string(PF_SOURCE_DIR) + "/" + rel; }

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

/// Random valid UTF-8 drawn from a mix of ASCII, controls, Latin-1, Cyrillic,
/// CJK, and astral code points.
inline std::string random_text(std::mt19937_64& rng, std::size_t max_len = 40) {
    std::uniform_int_distribution<std::size_t> len_d(0, max_len);
    std::uniform_int_distribution<int> cls(0, 9);
    std::string out;
    const std::size_t n = len_d(rng);
    for (std::size_t i = 0; i < n; ++i) {
        char32_t cp = 'a';
        switch (cls(rng)) {
            case 0:
                cp = std::uniform_int_distribution<char32_t>(0x01, 0x1F)(rng);
                break;
            case 1:
                cp = U"\"\\/\n\t []{}"[std::uniform_int_distribution<int>(0, 10)(rng)];
                break;
            case 2:
                cp = std::uniform_int_distribution<char32_t>(0xA0, 0xFF)(rng);
                break;
            case 3:
                cp = std::uniform_int_distribution<char32_t>(0x0400, 0x04FF)(rng);
                break;
            case 4:
                cp = std::uniform_int_distribution<char32_t>(0x4E00, 0x9FFF)(rng);
                break;
            case 5:
                cp = std::uniform_int_distribution<char32_t>(0x1F300, 0x1F64F)(rng);
                break;
            default:
                cp = std::uniform_int_distribution<char32_t>(0x20, 0x7E)(rng);
        }
        polyglot_forge::unicode::append_utf8(out, cp);
    }
    return out;
}

inline polyglot_forge::LanguageTag random_tag(std::mt19937_64& rng) {
    static const char* codes[] = {"eng", "fra", "zho", "rus", "ara", "hin", "jpn", "kor", "deu", "unknown"};
    static const char* scripts[] = {"Latn", "Hani", "Cyrl", "Arab", "Deva", "Jpan", "Hang", "Zzzz"};
    return {codes[std::uniform_int_distribution<int>(0, 9)(rng)], scripts[std::uniform_int_distribution<int>(0, 7)(rng)]};
}

inline polyglot_forge::Record random_record(std::mt19937_64& rng) {
    using namespace polyglot_forge;
    std::uniform_int_distribution<int> coin(0, 1);
    std::optional<std::string> url;
    if (coin(rng)) url = "https://example.org/" + std::to_string(rng() % 1000);
    Json extra = Json::object();
    if (coin(rng)) extra["score"] = static_cast<std::int64_t>(rng() % 100);
    if (coin(rng)) extra["note"] = random_text(rng, 5);
    if (coin(rng)) {
        MonoRecord m;
        m.text = random_text(rng);
        m.lang = random_tag(rng);
        m.url = url;
        m.collection = random_text(rng, 6);
        m.source = "src" + std::to_string(rng() % 7);
        m.original_lang = random_text(rng, 4);
        m.extra = extra;
        return m;
    }
    BiRecord b;
    b.src_lang = random_tag(rng);
    b.src_txt = random_text(rng);
    b.tgt_lang = random_tag(rng);
    b.tgt_txt = random_text(rng);
    b.url = url;
    b.collection = random_text(rng, 6);
    b.source = "src" + std::to_string(rng() % 7);
    b.original_src_lang = random_text(rng, 4);
    b.original_tgt_lang = random_text(rng, 4);
    b.extra = extra;
    return b;
}

inline polyglot_forge::BiRecord bi(const std::string& src, const std::string& tgt, const std::string& src_tag = "eng_Latn",
                                   const std::string& tgt_tag = "fra_Latn") {
    polyglot_forge::BiRecord b;
    b.src_lang = *polyglot_forge::LanguageTag::parse(src_tag);
    b.tgt_lang = *polyglot_forge::LanguageTag::parse(tgt_tag);
    b.src_txt = src;
    b.tgt_txt = tgt;
    b.collection = "fixture";
    b.source = "unit";
    b.original_src_lang = src_tag;
    b.original_tgt_lang = tgt_tag;
    return b;
}

inline polyglot_forge::MonoRecord mono(const std::string& text, const std::string& tag = "eng_Latn") {
    polyglot_forge::MonoRecord m;
    m.text = text;
    m.lang = *polyglot_forge::LanguageTag::parse(tag);
    m.collection = "fixture";
    m.source = "unit";
    m.original_lang = tag;
    return m;
}

}  // namespace test_support
