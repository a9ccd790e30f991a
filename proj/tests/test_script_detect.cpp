#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include <unicode/uchar.h>
#include <unicode/uscript.h>

#include "polyglot_forge/script_detect.hpp"
#include "test_support.hpp"

using namespace polyglot_forge;

namespace {

// Letters of `script` according to ICU, restricted to ranges where ICU and
// the embedded table agree.
std::vector<char32_t> letters_of(std::string_view script) {
    const auto& t = ScriptRanges::builtin();
    std::vector<char32_t> out;
    for (char32_t cp = 0; cp < 0x30000; ++cp) {
        if (t.script_of(cp) != script) continue;
        if (!u_isalpha(static_cast<UChar32>(cp))) continue;
        UErrorCode err = U_ZERO_ERROR;
        if (uscript_getShortName(uscript_getScript(static_cast<UChar32>(cp), &err)) != script) continue;
        out.push_back(cp);
    }
    return out;
}

std::vector<std::string> pure_dataset(std::string_view script, std::size_t lines, std::uint64_t seed) {
    const auto pool = letters_of(script);
    std::mt19937_64 rng(seed);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < lines; ++i) {
        std::string line;
        const std::size_t words = 1 + rng() % 8;
        for (std::size_t w = 0; w < words; ++w) {
            if (w > 0) line += ' ';
            const std::size_t len = 1 + rng() % 7;
            for (std::size_t k = 0; k < len; ++k) unicode::append_utf8(line, pool[rng() % pool.size()]);
        }
        if (rng() % 3 == 0) line += ", 42.";
        out.push_back(std::move(line));
    }
    return out;
}

}  // namespace

TEST(ScriptDetect, TableMatchesIcuOnSharedRepertoire) {
    // ICU carries an older Unicode version, so only code points assigned in
    // both are compared.
    const auto& t = ScriptRanges::builtin();
    UVersionInfo icu_unicode;
    u_getUnicodeVersion(icu_unicode);
    std::size_t compared = 0, mismatched = 0;
    std::string first_mismatches;
    for (UChar32 cp = 0; cp <= 0x10FFFF; ++cp) {
        if (u_charType(cp) == U_UNASSIGNED) continue;
        UErrorCode err = U_ZERO_ERROR;
        const std::string icu = uscript_getShortName(uscript_getScript(cp, &err));
        ASSERT_TRUE(U_SUCCESS(err));
        ++compared;
        if (t.script_of(static_cast<char32_t>(cp)) != icu) {
            if (++mismatched <= 10) {
                first_mismatches += " U+" + std::to_string(cp) + ":" + icu + "/" + std::string(t.script_of(static_cast<char32_t>(cp)));
            }
        }
    }
    EXPECT_GT(compared, 140000u);
    // Scripts.txt reassigns a handful of code points between versions.
    EXPECT_LE(mismatched, 64u) << first_mismatches;
}

TEST(ScriptDetect, LookupIsTotal) {
    const auto& t = ScriptRanges::builtin();
    EXPECT_EQ(t.script_of(U'a'), "Latn");
    EXPECT_EQ(t.script_of(0x043F), "Cyrl");
    EXPECT_EQ(t.script_of(U'1'), "Zyyy");
    EXPECT_EQ(t.script_of(0x0301), "Zinh");
    EXPECT_EQ(t.script_of(0x10FFFF), "Zzzz");
    EXPECT_EQ(t.version(), "17.0.0");
}

TEST(ScriptDetect, LineExamples) {
    EXPECT_EQ(line_script("hello world"), (ScriptGuess{"Latn", 1.0}));
    EXPECT_EQ(line_script("привет"), (ScriptGuess{"Cyrl", 1.0}));
    EXPECT_EQ(line_script("123 … !!"), (ScriptGuess{"Zzzz", 0.0}));
    EXPECT_EQ(line_script(""), (ScriptGuess{"Zzzz", 0.0}));
}

TEST(ScriptDetect, CompositeScripts) {
    EXPECT_EQ(line_script("日本語のテキストです").script, "Jpan");
    EXPECT_EQ(line_script("韓國語 한국어 문장입니다").script, "Kore");
    EXPECT_EQ(line_script("中文文本").script, "Hani");
    EXPECT_EQ(line_script("ひらがな").script, "Hira");
}

TEST(ScriptDetect, TieGoesToSmallerCode) {
    EXPECT_EQ(line_script("ab пр").script, "Cyrl");
    EXPECT_DOUBLE_EQ(line_script("ab пр").confidence, 0.5);
}

TEST(ScriptDetect, PureScriptDatasets) {
    const char* scripts[] = {"Latn", "Cyrl", "Arab", "Deva", "Hani", "Grek", "Hang"};
    std::uint64_t seed = 1;
    for (const char* s : scripts) {
        for (int rep = 0; rep < 5; ++rep) {
            const auto lines = pure_dataset(s, 150, seed++);
            EXPECT_EQ(dataset_script(lines), s) << "seed " << seed - 1;
        }
    }
}

TEST(ScriptDetect, FirstLineFallback) {
    std::vector<std::string> lines{"日本語"};
    for (int i = 1; i < 100; ++i) lines.push_back(std::to_string(i * 7919) + " - (" + std::to_string(i) + ")!");
    EXPECT_EQ(dataset_script(lines), "Hani");
}

TEST(ScriptDetect, CodeMixedDatasetGetsOneScript) {
    std::vector<std::string> lines;
    for (int i = 0; i < 60; ++i) lines.push_back("这是一个中文句子好的");
    for (int i = 0; i < 40; ++i) lines.push_back("latinwords");
    // 600 Han vs 400 Latin code points
    EXPECT_EQ(dataset_script(lines), "Hani");
    std::vector<std::string> interleaved;
    for (int i = 0; i < 100; ++i) interleaved.push_back(i % 5 < 3 ? "这是一个中文句子好的" : "latinwords");
    EXPECT_EQ(dataset_script(interleaved), "Hani");
}

TEST(ScriptDetect, SampleSizeBoundsTheSample) {
    std::vector<std::string> lines(100, "hello");
    for (int i = 0; i < 500; ++i) lines.push_back("привет");
    EXPECT_EQ(dataset_script(lines), "Latn");
    EXPECT_EQ(dataset_script(lines, ScriptRanges::builtin(), {600, 0.5}), "Cyrl");
}

TEST(ScriptDetect, EmptyDatasetIsUndetectable) {
    EXPECT_THROW(dataset_script(std::vector<std::string>{}), UndetectableScript);
    EXPECT_THROW(dataset_script(std::vector<std::string>{"", "  "}), UndetectableScript);
    EXPECT_THROW(DatasetScriptDetector(ScriptRanges::builtin(), {0, 0.5}), std::invalid_argument);
}

TEST(ScriptDetect, TableFromTsvMatchesBuiltin) {
    const auto t = ScriptRanges::from_tsv(test_support::source_path("data/scripts.tsv"), "17.0.0");
    const auto& b = ScriptRanges::builtin();
    EXPECT_EQ(t.range_count(), b.range_count());
    for (char32_t cp = 0; cp < 0x20000; cp += 7) ASSERT_EQ(t.script_of(cp), b.script_of(cp));
}
