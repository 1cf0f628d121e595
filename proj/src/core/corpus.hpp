#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

namespace pressflow {

struct Date {
    int year = 0;
    int month = 0;
    int day = 0;
};

// Calendar validity, Gregorian leap rule.
bool is_valid_date(int year, int month, int day);

struct Article {
    std::string id;
    Date date;
    std::string headline;
    std::string abstract;
    std::vector<std::string> keywords;

    // The text every downstream stage (scoring, tagging) operates on:
    // headline, abstract and space-joined keywords, newline-separated.
    std::string text() const;
};

enum class SkipReason {
    Malformed,      // not a JSON object, bad id, wrong field types
    MissingDate,    // no pub_date key
    InvalidDate,    // pub_date present but not a valid calendar date
    MissingText,    // none of headline / abstract / keywords present
    YearOutOfRange, // valid record outside the configured study years
};

std::string_view skip_reason_name(SkipReason reason);

struct YearRange {
    int start = 2010;
    int end = 2019;

    bool contains(int year) const { return year >= start && year <= end; }
    int count() const { return end - start + 1; }
};

// Parses "START:END" (e.g. "2010:2019"); throws UsageError on malformed input
// or start > end.
YearRange parse_year_range(std::string_view text);

struct CorpusStats {
    uint64_t records_read = 0;
    uint64_t records_kept = 0;
    uint64_t records_skipped = 0;
    uint64_t duplicate_ids = 0;
    std::map<SkipReason, uint64_t> skip_reasons;
    std::map<int, uint64_t> year_histogram; // kept records per year

    bool reconciles() const {
        return records_read == records_kept + records_skipped + duplicate_ids;
    }
};

// One line of corpus input -> Article or a typed skip reason. Pure; never
// throws on bad data (strictness is the reader's policy, not the parser's).
std::variant<Article, SkipReason> parse_article_record(const std::string& line);

// Pull-based streaming reader over newline-delimited corpus files. Keeps one
// record in memory at a time plus the id set used for duplicate detection.
// Files are consumed in the order given; two passes over the same files yield
// identical sequences and stats.
class CorpusReader {
public:
    // strict: any parse-level skip (malformed, missing/invalid date, missing
    // text) aborts with DataError naming file and line. Year filtering and
    // duplicates stay lenient in both modes.
    CorpusReader(std::vector<std::string> paths, YearRange years, bool strict = false);

    // Next in-range article, or nullopt once all files are exhausted. Throws
    // IoError if a file cannot be opened.
    std::optional<Article> next();

    const CorpusStats& stats() const { return stats_; }

private:
    bool open_next_file();

    std::vector<std::string> paths_;
    YearRange years_;
    bool strict_;
    size_t file_index_ = 0;
    std::ifstream in_;
    std::string current_path_;
    uint64_t line_number_ = 0;
    std::unordered_set<std::string> seen_ids_;
    CorpusStats stats_;
    bool warned_empty_ = false;
};

// Convenience wrapper: stream all articles through fn, return final stats.
CorpusStats for_each_article(const std::vector<std::string>& paths, YearRange years, bool strict,
                             const std::function<void(const Article&)>& fn);

} // namespace pressflow
