#include <gtest/gtest.h>

#include "biaslens/csv.hpp"
#include "biaslens/date.hpp"
#include "biaslens/hash.hpp"
#include "biaslens/utf8.hpp"

using namespace biaslens;

TEST(Date, ParsesIsoDatesAndTimestamps) {
    auto d = Date::parse_iso("2009-03-31");
    ASSERT_TRUE(d);
    EXPECT_EQ(d->year, 2009);
    EXPECT_EQ(d->month, 3);
    EXPECT_EQ(d->day, 31);
    auto t = Date::parse_iso("2012-02-29T10:00:00Z");
    ASSERT_TRUE(t);
    EXPECT_EQ(t->to_iso(), "2012-02-29");
}

TEST(Date, RejectsMalformedOrImpossibleDates) {
    for (const char* bad : {"", "2009", "2009-3-01", "2009-02-30", "2011-02-29", "2009-13-01", "2009-00-10",
                            "abcd-ef-gh", "2009-01-01X"}) {
        EXPECT_FALSE(Date::parse_iso(bad)) << bad;
    }
}

TEST(Date, OrdersChronologically) {
    EXPECT_LT(*Date::parse_iso("2009-12-31"), *Date::parse_iso("2010-01-01"));
    EXPECT_EQ(days_in_month(2000, 2), 29);
    EXPECT_EQ(days_in_month(1900, 2), 28);
}

TEST(Csv, QuotesOnlyWhenNeeded) {
    EXPECT_EQ(csv::escape("plain"), "plain");
    EXPECT_EQ(csv::escape("a,b"), "\"a,b\"");
    EXPECT_EQ(csv::escape("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(csv::escape("two\nlines"), "\"two\nlines\"");
}

TEST(Csv, TableRoundTripsThroughParser) {
    csv::Table t({"word", "note"});
    t.add_row({"a,b", "x\"y"});
    t.add_row({"", "multi\nline"});
    auto rows = csv::parse(t.str());
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[1][0], "a,b");
    EXPECT_EQ(rows[1][1], "x\"y");
    EXPECT_EQ(rows[2][1], "multi\nline");
    EXPECT_THROW(t.add_row({"only-one"}), std::exception);
}

TEST(Csv, RealsUseShortestRoundTripForm) {
    EXPECT_EQ(csv::format_real(0.5), "0.5");
    EXPECT_EQ(csv::format_real(1.0), "1");
    EXPECT_EQ(std::stod(csv::format_real(0.1 + 0.2)), 0.1 + 0.2);
}

TEST(Utf8, ValidatesAndSanitizes) {
    EXPECT_TRUE(utf8::valid("caf\xc3\xa9"));
    std::size_t at = 0;
    EXPECT_FALSE(utf8::valid("ab\xc3", &at));
    EXPECT_EQ(at, 2u);
    EXPECT_FALSE(utf8::valid("\xc0\xaf"));        // overlong
    EXPECT_FALSE(utf8::valid("\xed\xa0\x80"));    // surrogate
    EXPECT_EQ(utf8::sanitize("a\xffz"), "a\xef\xbf\xbdz");
}

TEST(Utf8, DecodeAppendRoundTrip) {
    std::string s;
    for (char32_t cp : {U'a', U'é', U'€', U'\U0001F600'}) utf8::append(s, cp);
    std::size_t pos = 0;
    std::vector<char32_t> back;
    while (pos < s.size()) back.push_back(utf8::decode(s, pos));
    EXPECT_EQ(back, (std::vector<char32_t>{U'a', U'é', U'€', U'\U0001F600'}));
}

TEST(Hash, FnvMatchesPublishedVectors) {
    Fnv1a empty;
    EXPECT_EQ(empty.digest(), 0xcbf29ce484222325ULL);
    Fnv1a a;
    a.update(std::string_view("a"));
    EXPECT_EQ(a.digest(), 0xaf63dc4c8601ec8cULL);
}
