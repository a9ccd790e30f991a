#include <gtest/gtest.h>

#include <random>
#include <string>

#include "polyglot_forge/code_filter.hpp"
#include "test_support.hpp"

using namespace polyglot_forge;

namespace {

// Second implementation: split into lines first, then count.
CodeMetrics recount(const std::string& content) {
    std::vector<std::u32string> lines(1);
    std::size_t pos = 0;
    while (pos < content.size()) {
        const char32_t cp = unicode::next_code_point(content, pos);
        if (cp == U'\n') {
            lines.emplace_back();
        } else {
            lines.back().push_back(cp);
        }
    }
    if (lines.back().empty()) lines.pop_back();
    CodeMetrics m;
    if (lines.empty()) return m;
    std::size_t total = 0, alnum = 0;
    for (const auto& l : lines) {
        total += l.size();
        m.max_line_len = std::max(m.max_line_len, l.size());
        for (char32_t c : l) alnum += unicode::is_alnum(c) ? 1 : 0;
    }
    m.avg_line_len = static_cast<double>(total) / static_cast<double>(lines.size());
    m.alnum_fraction = total ? static_cast<double>(alnum) / static_cast<double>(total) : 0.0;
    return m;
}

CodeMetrics metrics(double avg, std::size_t max, double alnum) { return {avg, max, alnum}; }

}  // namespace

TEST(CodeFilter, MetricExamples) {
    const auto m = code_metrics("ab\ncd\n");
    EXPECT_DOUBLE_EQ(m.avg_line_len, 2.0);
    EXPECT_EQ(m.max_line_len, 2u);
    EXPECT_DOUBLE_EQ(m.alnum_fraction, 1.0);
    EXPECT_DOUBLE_EQ(code_metrics("a!\n").alnum_fraction, 0.5);
    const auto empty = code_metrics("");
    EXPECT_EQ(empty.max_line_len, 0u);
    EXPECT_DOUBLE_EQ(empty.avg_line_len, 0.0);
    // blank line in the middle counts as a line of length 0
    EXPECT_DOUBLE_EQ(code_metrics("abcd\n\nab").avg_line_len, 2.0);
    EXPECT_EQ(code_metrics("héllo").max_line_len, 5u);
}

TEST(CodeFilter, MetricsMatchRecount) {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 200; ++i) {
        std::string content;
        while (content.size() < 10 * 1024) {
            content += test_support::random_text(rng, 60);
            if (rng() % 2) content += '\n';
        }
        const auto a = code_metrics(content), b = recount(content);
        ASSERT_DOUBLE_EQ(a.avg_line_len, b.avg_line_len);
        ASSERT_EQ(a.max_line_len, b.max_line_len);
        ASSERT_DOUBLE_EQ(a.alnum_fraction, b.alnum_fraction);
    }
}

TEST(CodeFilter, Buckets) {
    EXPECT_EQ(fork_bucket(26), ForkBucket::popular);
    EXPECT_EQ(fork_bucket(25), ForkBucket::moderate);
    EXPECT_EQ(fork_bucket(15), ForkBucket::moderate);
    EXPECT_EQ(fork_bucket(14), ForkBucket::rare);
    EXPECT_EQ(fork_bucket(0), ForkBucket::rare);
}

TEST(CodeFilter, KeepExamples) {
    const CodeFilterRules rules;
    EXPECT_TRUE(keep_code_metrics(metrics(100, 250, 0.50), 30, rules).keep());
    EXPECT_EQ(keep_code_metrics(metrics(85, 100, 0.60), 10, rules).drop, CodeDropReason::avg_line_length);
    EXPECT_TRUE(keep_code_metrics(metrics(89.9, 149, 0.41), 25, rules).keep());
    // thresholds are strict
    EXPECT_FALSE(keep_code_metrics(metrics(120, 10, 0.9), 30, rules).keep());
    EXPECT_EQ(keep_code_metrics(metrics(10, 300, 0.9), 30, rules).drop, CodeDropReason::max_line_length);
    EXPECT_EQ(keep_code_metrics(metrics(10, 10, 0.30), 30, rules).drop, CodeDropReason::alnum_fraction);
}

TEST(CodeFilter, KeepFileFromContent) {
    const CodeFilterRules rules;
    EXPECT_TRUE(keep_code_file({"int main() {\n  return 0;\n}\n", 3, "c"}, rules).keep());
    EXPECT_FALSE(keep_code_file({std::string(200, 'x') + "\n", 3, "c"}, rules).keep());
    EXPECT_FALSE(keep_code_file({"{}();\n[];\n", 100, "c"}, rules).keep());
}

TEST(CodeFilter, MoreForksNeverTurnsKeepIntoDrop) {
    const CodeFilterRules rules;
    std::mt19937_64 rng(10);
    for (int i = 0; i < 20000; ++i) {
        const auto m = metrics(static_cast<double>(rng() % 1300) / 10.0, rng() % 320, static_cast<double>(rng() % 1000) / 1000.0);
        const std::uint64_t forks = rng() % 40;
        if (keep_code_metrics(m, forks, rules).keep()) {
            for (std::uint64_t more = forks; more < 45; ++more) ASSERT_TRUE(keep_code_metrics(m, more, rules).keep());
        }
    }
}

TEST(CodeFilter, LanguageFrequency) {
    EXPECT_EQ(language_frequency_filter({{"python", 60000}, {"cobol", 10}}, 50000), (std::set<std::string>{"python"}));
    EXPECT_EQ(language_frequency_filter({{"python", 60000}, {"llvm", 2}}, 50000), (std::set<std::string>{"llvm", "python"}));
    EXPECT_EQ(language_frequency_filter({{"llvm", 3}}, 50000), (std::set<std::string>{"llvm"}));
    EXPECT_TRUE(language_frequency_filter({}, 50000).empty());
    EXPECT_EQ(language_frequency_filter({{"go", 50000}}, 50000), (std::set<std::string>{"go"}));
}

TEST(CodeFilter, RulesValidation) {
    CodeFilterRules r;
    EXPECT_NO_THROW(r.validate());
    r.buckets[1].alnum_min = 1.0;
    EXPECT_THROW(r.validate(), std::invalid_argument);
}
