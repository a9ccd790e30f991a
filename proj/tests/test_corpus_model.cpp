#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "polyglot_forge/corpus_model.hpp"
#include "test_support.hpp"

using namespace polyglot_forge;
using test_support::bi;

namespace {

const char* kNineFieldLine =
    R"({"src_lang":"eng_Latn","src_txt":"Hello.","tgt_lang":"fra_Latn","tgt_txt":"Bonjour.","url":"https://x.org","collection":"opus","source":"Tatoeba","original_src_lang":"en","original_tgt_lang":"fr"})";

}  // namespace

TEST(CorpusModel, ParsesNineFieldLine) {
    std::istringstream in(std::string(kNineFieldLine) + "\n");
    const auto recs = read_jsonl(in, RecordKind::bi);
    ASSERT_EQ(recs.size(), 1u);
    const auto& b = std::get<BiRecord>(recs[0]);
    EXPECT_EQ(b.src_lang.render(), "eng_Latn");
    EXPECT_EQ(b.tgt_txt, "Bonjour.");
    EXPECT_EQ(*b.url, "https://x.org");
    EXPECT_EQ(b.original_tgt_lang, "fr");
    EXPECT_TRUE(b.extra.empty());
    EXPECT_EQ(to_jsonl_line(recs[0]), kNineFieldLine);
}

TEST(CorpusModel, EmptyStreamYieldsNothing) {
    std::istringstream in("");
    EXPECT_TRUE(read_jsonl(in, RecordKind::bi).empty());
    std::ostringstream out;
    EXPECT_EQ(write_jsonl(std::vector<Record>{}, out), 0u);
    EXPECT_EQ(out.str(), "");
}

TEST(CorpusModel, BadLineDoesNotStopStream) {
    std::string missing_tgt = kNineFieldLine;
    missing_tgt.replace(missing_tgt.find(R"("tgt_txt":"Bonjour.",)"), std::string(R"("tgt_txt":"Bonjour.",)").size(), "");
    std::istringstream in(std::string(kNineFieldLine) + "\n" + missing_tgt + "\n{oops\n" + kNineFieldLine + "\n");
    std::vector<ParsedLine> errors;
    const auto recs = read_jsonl(in, RecordKind::bi, &errors);
    EXPECT_EQ(recs.size(), 2u);
    ASSERT_EQ(errors.size(), 2u);
    EXPECT_EQ(errors[0].line, 2u);
    EXPECT_NE(errors[0].error.find("tgt_txt"), std::string::npos);
    EXPECT_EQ(errors[1].line, 3u);
}

TEST(CorpusModel, ErrorsPlusRecordsEqualLines) {
    std::mt19937_64 rng(11);
    std::ostringstream os;
    std::size_t lines = 0;
    for (int i = 0; i < 2000; ++i) {
        ++lines;
        switch (rng() % 4) {
            case 0:
                os << "not json\n";
                break;
            case 1:
                os << R"({"src_txt":"x"})" << "\n";
                break;
            default:
                os << to_jsonl_line(bi(test_support::random_text(rng), test_support::random_text(rng))) << "\n";
        }
    }
    std::istringstream in(os.str());
    std::vector<ParsedLine> errors;
    const auto recs = read_jsonl(in, RecordKind::bi, &errors);
    EXPECT_EQ(recs.size() + errors.size(), lines);
}

TEST(CorpusModel, InvalidUtf8IsPerLineError) {
    std::istringstream in(std::string(R"({"text":"a)") + "\xC3\x28" + R"(","lang":"eng_Latn"})" + "\n");
    std::vector<ParsedLine> errors;
    EXPECT_TRUE(read_jsonl(in, RecordKind::mono, &errors).empty());
    ASSERT_EQ(errors.size(), 1u);
    EXPECT_EQ(errors[0].error, "invalid UTF-8");
}

TEST(CorpusModel, EmbeddedNewlineStaysOnOneLine) {
    std::vector<Record> recs{bi("line one\nline two", "a\r\nb")};
    std::ostringstream out;
    EXPECT_EQ(write_jsonl(recs, out), 1u);
    const auto s = out.str();
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 1);
    std::istringstream in(s);
    EXPECT_EQ(read_jsonl(in, RecordKind::bi), recs);
}

TEST(CorpusModel, UnknownKeysSurviveRoundTrip) {
    std::string line = kNineFieldLine;
    line.insert(line.size() - 1, R"(,"zeta":1,"alpha":[true,null])");
    const auto parsed = parse_jsonl_line(line, RecordKind::bi, 1);
    ASSERT_TRUE(parsed.ok()) << parsed.error;
    EXPECT_EQ(to_jsonl_line(*parsed.record), line);
}

TEST(CorpusModel, RandomRoundTripIsIdentity) {
    std::mt19937_64 rng(20240607);
    std::vector<Record> mono, bil;
    for (int i = 0; i < 12000; ++i) {
        auto r = test_support::random_record(rng);
        (kind_of(r) == RecordKind::mono ? mono : bil).push_back(std::move(r));
    }
    for (auto* set : {&mono, &bil}) {
        std::stringstream io;
        EXPECT_EQ(write_jsonl(*set, io), set->size());
        std::vector<ParsedLine> errors;
        const auto back = read_jsonl(io, kind_of(set->front()), &errors);
        EXPECT_TRUE(errors.empty()) << errors.front().error;
        ASSERT_EQ(back.size(), set->size());
        for (std::size_t i = 0; i < back.size(); ++i) ASSERT_EQ(back[i], (*set)[i]) << "record " << i;
    }
}

TEST(CorpusModel, WrongKindIsAnError) {
    EXPECT_FALSE(parse_jsonl_line(kNineFieldLine, RecordKind::mono, 1).ok());
}

TEST(CorpusModel, SinkFailureReportsWrittenCount) {
    std::ostringstream out;
    out.setstate(std::ios::badbit);
    try {
        write_jsonl(std::vector<Record>{bi("a", "b")}, out);
        FAIL() << "expected SinkWriteError";
    } catch (const SinkWriteError& e) {
        EXPECT_EQ(e.written(), 0u);
    }
}
