#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "polyglot_forge/langid.hpp"
#include "test_support.hpp"

using namespace polyglot_forge;

namespace {

// Independent reading of the registry file: Part1 -> Id and the valid Id set.
struct Registry {
    std::set<std::string> ids;
    std::map<std::string, std::string> part1;
    std::map<std::string, std::string> part2b;
};

const Registry& registry() {
    static const Registry r = [] {
        Registry out;
        std::ifstream in(test_support::source_path("data/iso-639-3.tab"));
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            std::vector<std::string> cols;
            std::stringstream ss(line);
            std::string col;
            while (std::getline(ss, col, '\t')) cols.push_back(col);
            if (cols.empty()) continue;
            out.ids.insert(cols[0]);
            if (cols.size() > 3 && !cols[3].empty()) out.part1[cols[3]] = cols[0];
            if (cols.size() > 1 && !cols[1].empty() && cols[1] != cols[0]) out.part2b[cols[1]] = cols[0];
        }
        return out;
    }();
    return r;
}

}  // namespace

TEST(Langid, ExactCode) {
    const auto n = normalize_code("eng");
    EXPECT_EQ(n.code, "eng");
    EXPECT_EQ(n.method, NormalizeMethod::exact);
}

TEST(Langid, TwoLetterAliasMatchesRegistry) {
    ASSERT_EQ(registry().part1.at("en"), "eng");
    const auto n = normalize_code("en");
    EXPECT_EQ(n.code, "eng");
    EXPECT_EQ(n.method, NormalizeMethod::alias);
}

TEST(Langid, EveryPart1CodeMapsLikeTheRegistry) {
    ASSERT_GT(registry().part1.size(), 180u);
    for (const auto& [p1, id] : registry().part1) {
        const auto n = normalize_code(p1);
        EXPECT_EQ(n.code, id) << p1;
        EXPECT_EQ(n.method, NormalizeMethod::alias) << p1;
    }
}

TEST(Langid, BibliographicCodesMapLikeTheRegistry) {
    for (const auto& [b, id] : registry().part2b) EXPECT_EQ(normalize_code(b).code, id) << b;
}

TEST(Langid, EveryRegistryIdIsExact) {
    for (const auto& id : registry().ids) {
        const auto n = normalize_code(id);
        ASSERT_EQ(n.code, id);
        ASSERT_EQ(n.method, NormalizeMethod::exact);
    }
}

TEST(Langid, UnknownDenotation) {
    const auto n = normalize_code("xx-notalang");
    EXPECT_EQ(n.code, "unknown");
    EXPECT_EQ(n.method, NormalizeMethod::unknown);
    EXPECT_EQ(normalize_code("").code, "unknown");
    EXPECT_EQ(normalize_code("q").code, "unknown");
}

TEST(Langid, SubtagsAreSplitOff) {
    const auto a = normalize_code("pt_BR");
    EXPECT_EQ(a.code, "por");
    EXPECT_EQ(a.region_subtag, "BR");
    const auto b = normalize_code(" zh-Hant-TW ");
    EXPECT_EQ(b.code, "zho");
    EXPECT_EQ(b.script_subtag, "Hant");
    EXPECT_EQ(b.region_subtag, "TW");
    const auto c = normalize_code("es-419");
    EXPECT_EQ(c.code, "spa");
    EXPECT_EQ(c.region_subtag, "419");
    const auto d = normalize_code("eng_Latn");
    EXPECT_EQ(d.code, "eng");
    EXPECT_EQ(d.method, NormalizeMethod::exact);
    EXPECT_EQ(d.script_subtag, "Latn");
}

TEST(Langid, CaseInsensitive) {
    EXPECT_EQ(normalize_code("EN").code, "eng");
    EXPECT_EQ(normalize_code("Fra").code, "fra");
}

TEST(Langid, OpusOverlay) {
    EXPECT_EQ(normalize_code("iw").code, "heb");
    EXPECT_EQ(normalize_code("zh_cn").code, "zho");
    EXPECT_EQ(normalize_code("zh-yue").code, "yue");
    EXPECT_EQ(normalize_code("mo").code, "ron");
}

TEST(Langid, LanguageTableCodesAreAllExact) {
    std::ifstream in(test_support::source_path("tests/fixtures/language_table_codes.txt"));
    std::string tag;
    std::size_t n = 0;
    while (in >> tag) {
        const auto code = tag.substr(0, tag.find('_'));
        const auto norm = normalize_code(code);
        EXPECT_EQ(norm.code, code) << tag;
        EXPECT_EQ(norm.method, NormalizeMethod::exact) << tag;
        ++n;
    }
    EXPECT_EQ(n, 939u);
}

TEST(Langid, OutputAlwaysValidOrUnknown) {
    std::mt19937_64 rng(3);
    const auto& table = CodeTable::builtin();
    for (int i = 0; i < 20000; ++i) {
        std::string s;
        const int len = static_cast<int>(rng() % 8);
        for (int j = 0; j < len; ++j) s.push_back("abcdefghijklmnopqrstuvwxyz-_ABZ12"[rng() % 33]);
        const auto n = normalize_code(s);
        ASSERT_TRUE(n.code == "unknown" || table.is_valid(n.code)) << s << " -> " << n.code;
    }
}

TEST(Langid, PairLabels) {
    const LanguageTag eng{"eng", "Latn"}, zho{"zho", "Hani"}, fra{"fra", "Latn"};
    EXPECT_EQ(make_pair_label(eng, zho), "eng_Latn-zho_Hani");
    EXPECT_EQ(make_pair_label(LanguageTag{"unknown", "Zzzz"}, fra), "unknown_Zzzz-fra_Latn");
    EXPECT_EQ(make_pair_label(LanguageTag{"abc", "Latn"}, LanguageTag{"abc", "Latn"}), "abc_Latn-abc_Latn");
}

TEST(Langid, CanonicalPair) {
    const LanguageTag eng{"eng", "Latn"}, zho{"zho", "Hani"};
    EXPECT_EQ(canonical_pair(zho, eng), std::make_pair(eng, zho));
    EXPECT_EQ(canonical_pair(eng, eng), std::make_pair(eng, eng));
    std::mt19937_64 rng(99);
    for (int i = 0; i < 1000; ++i) {
        const auto a = test_support::random_tag(rng), b = test_support::random_tag(rng);
        const auto once = canonical_pair(a, b);
        EXPECT_EQ(canonical_pair(once.first, once.second), once);
        EXPECT_EQ(canonical_pair(b, a), once);
    }
}

TEST(Langid, AliasTableFromFile) {
    const auto path = std::string(::testing::TempDir()) + "/aliases.tsv";
    {
        std::ofstream out(path);
        out << "# comment\nklingonese\ttlh\n";
    }
    const auto t = CodeTable::from_alias_tsv(path);
    EXPECT_EQ(normalize_code("klingonese", t).code, "tlh");
    EXPECT_EQ(normalize_code("en", t).code, "eng");
    {
        std::ofstream out(path);
        out << "bogus\tzzq\n";
    }
    EXPECT_THROW(CodeTable::from_alias_tsv(path), std::runtime_error);
}
