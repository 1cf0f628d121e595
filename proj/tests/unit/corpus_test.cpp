#include <doctest.h>

#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "core/corpus.hpp"
#include "core/error.hpp"

using namespace pressflow;

namespace {

struct TempNdjson {
    std::filesystem::path path;

    explicit TempNdjson(const std::vector<std::string>& lines) {
        static int counter = 0;
        path = std::filesystem::temp_directory_path() /
               ("pf_corpus_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) +
                ".ndjson");
        std::ofstream out(path);
        for (const auto& line : lines) out << line << "\n";
    }
    ~TempNdjson() { std::filesystem::remove(path); }
};

Article expect_article(const std::string& line) {
    auto result = parse_article_record(line);
    REQUIRE(std::holds_alternative<Article>(result));
    return std::get<Article>(result);
}

SkipReason expect_skip(const std::string& line) {
    auto result = parse_article_record(line);
    REQUIRE(std::holds_alternative<SkipReason>(result));
    return std::get<SkipReason>(result);
}

} // namespace

TEST_CASE("parse_article_record accepts a full record") {
    Article a = expect_article(
        R"({"id":"a1","pub_date":"2015-06-01T12:30:00Z","headline":"Storm hits coast",)"
        R"("abstract":"Rain expected.","keywords":["weather","florida"]})");
    CHECK(a.id == "a1");
    CHECK(a.date.year == 2015);
    CHECK(a.date.month == 6);
    CHECK(a.date.day == 1);
    CHECK(a.headline == "Storm hits coast");
    CHECK(a.abstract == "Rain expected.");
    REQUIRE(a.keywords.size() == 2);
    CHECK(a.keywords[1] == "florida");
    CHECK(a.text() == "Storm hits coast\nRain expected.\nweather florida");
}

TEST_CASE("parse_article_record tolerates missing optional text fields") {
    Article a = expect_article(R"({"id":"a2","pub_date":"2015-06-01","headline":"Just a headline"})");
    CHECK(a.abstract.empty());
    CHECK(a.keywords.empty());
    CHECK(a.text() == "Just a headline\n\n");
}

TEST_CASE("parse_article_record classifies skips") {
    CHECK(expect_skip("not json at all") == SkipReason::Malformed);
    CHECK(expect_skip("[1,2,3]") == SkipReason::Malformed);
    CHECK(expect_skip(R"({"pub_date":"2015-06-01","headline":"x"})") == SkipReason::Malformed);
    CHECK(expect_skip(R"({"id":"","pub_date":"2015-06-01","headline":"x"})") ==
          SkipReason::Malformed);
    CHECK(expect_skip(R"({"id":"a","headline":"x"})") == SkipReason::MissingDate);
    CHECK(expect_skip(R"({"id":"a","pub_date":12,"headline":"x"})") == SkipReason::InvalidDate);
    CHECK(expect_skip(R"({"id":"a","pub_date":"June 1 2015","headline":"x"})") ==
          SkipReason::InvalidDate);
    CHECK(expect_skip(R"({"id":"a","pub_date":"2015-13-01","headline":"x"})") ==
          SkipReason::InvalidDate);
    CHECK(expect_skip(R"({"id":"a","pub_date":"2015-06-40","headline":"x"})") ==
          SkipReason::InvalidDate);
    CHECK(expect_skip(R"({"id":"a","pub_date":"2015-06-01"})") == SkipReason::MissingText);
    CHECK(expect_skip(R"({"id":"a","pub_date":"2015-06-01","headline":""})") ==
          SkipReason::MissingText);
}

TEST_CASE("leap years are honored") {
    expect_article(R"({"id":"a","pub_date":"2016-02-29","headline":"x"})");
    CHECK(expect_skip(R"({"id":"a","pub_date":"2015-02-29","headline":"x"})") ==
          SkipReason::InvalidDate);
    CHECK(expect_skip(R"({"id":"a","pub_date":"1900-02-29","headline":"x"})") ==
          SkipReason::InvalidDate);
    expect_article(R"({"id":"a","pub_date":"2000-02-29","headline":"x"})");
}

TEST_CASE("CorpusReader filters by year and dedups") {
    TempNdjson file({
        R"({"id":"old","pub_date":"2009-12-31","headline":"too early"})",
        R"({"id":"keep1","pub_date":"2015-01-01","headline":"in range"})",
        R"({"id":"keep1","pub_date":"2016-01-01","headline":"duplicate id"})",
        "",
        R"({"id":"keep2","pub_date":"2019-12-31","headline":"last day"})",
        R"({"id":"late","pub_date":"2021-01-01","headline":"too late"})",
        "broken line",
    });
    CorpusReader reader({file.path.string()}, YearRange{2010, 2019});
    std::vector<std::string> ids;
    while (auto art = reader.next()) ids.push_back(art->id);
    REQUIRE(ids.size() == 2);
    CHECK(ids[0] == "keep1");
    CHECK(ids[1] == "keep2");

    const CorpusStats& stats = reader.stats();
    CHECK(stats.records_read == 6); // blank line is not a record
    CHECK(stats.records_kept == 2);
    CHECK(stats.duplicate_ids == 1);
    CHECK(stats.records_skipped == 3);
    CHECK(stats.skip_reasons.at(SkipReason::YearOutOfRange) == 2);
    CHECK(stats.skip_reasons.at(SkipReason::Malformed) == 1);
    CHECK(stats.year_histogram.at(2015) == 1);
    CHECK(stats.year_histogram.at(2019) == 1);
    CHECK(stats.reconciles());
}

TEST_CASE("CorpusReader consumes multiple files in order") {
    TempNdjson first({R"({"id":"f1","pub_date":"2015-01-01","headline":"one"})"});
    TempNdjson second({R"({"id":"f2","pub_date":"2015-01-02","headline":"two"})"});
    CorpusReader reader({first.path.string(), second.path.string()}, YearRange{2010, 2019});
    auto a = reader.next();
    auto b = reader.next();
    REQUIRE(a);
    REQUIRE(b);
    CHECK(a->id == "f1");
    CHECK(b->id == "f2");
    CHECK_FALSE(reader.next());
}

TEST_CASE("strict mode aborts on malformed records but not year filtering") {
    TempNdjson bad({R"({"id":"ok","pub_date":"2015-01-01","headline":"fine"})", "garbage"});
    CorpusReader reader({bad.path.string()}, YearRange{2010, 2019}, true);
    CHECK(reader.next());
    CHECK_THROWS_AS(reader.next(), DataError);

    TempNdjson filtered({R"({"id":"old","pub_date":"1999-01-01","headline":"early"})"});
    CorpusReader lenient({filtered.path.string()}, YearRange{2010, 2019}, true);
    CHECK_FALSE(lenient.next());
    CHECK(lenient.stats().skip_reasons.at(SkipReason::YearOutOfRange) == 1);
}

TEST_CASE("missing corpus file aborts") {
    CorpusReader reader({"/nonexistent/corpus.ndjson"}, YearRange{2010, 2019});
    CHECK_THROWS_AS(reader.next(), IoError);
}

TEST_CASE("parse_year_range") {
    YearRange r = parse_year_range("2010:2019");
    CHECK(r.start == 2010);
    CHECK(r.end == 2019);
    CHECK(r.count() == 10);
    CHECK(r.contains(2010));
    CHECK(r.contains(2019));
    CHECK_FALSE(r.contains(2009));
    CHECK_FALSE(r.contains(2020));

    YearRange single = parse_year_range("2015:2015");
    CHECK(single.count() == 1);

    CHECK_THROWS_AS(parse_year_range("2019:2010"), UsageError);
    CHECK_THROWS_AS(parse_year_range("2010-2019"), UsageError);
    CHECK_THROWS_AS(parse_year_range("abc:2019"), UsageError);
    CHECK_THROWS_AS(parse_year_range(""), UsageError);
}
