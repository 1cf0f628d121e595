#include "corpus.hpp"

#include <algorithm>

#include <json.hpp>

#include "error.hpp"
#include "log.hpp"
#include "text.hpp"

namespace pressflow {
namespace {

using nlohmann::json;

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    return true;
}

// Accepts "YYYY-MM-DD" optionally followed by a 'T' or ' ' datetime tail.
std::optional<Date> parse_iso_date(std::string_view s) {
    if (s.size() < 10) return std::nullopt;
    if (s.size() > 10 && s[10] != 'T' && s[10] != ' ') return std::nullopt;
    const std::string_view date_part = s.substr(0, 10);
    if (date_part[4] != '-' || date_part[7] != '-') return std::nullopt;
    const std::string_view y = date_part.substr(0, 4);
    const std::string_view m = date_part.substr(5, 2);
    const std::string_view d = date_part.substr(8, 2);
    if (!all_digits(y) || !all_digits(m) || !all_digits(d)) return std::nullopt;
    Date date;
    date.year = (y[0] - '0') * 1000 + (y[1] - '0') * 100 + (y[2] - '0') * 10 + (y[3] - '0');
    date.month = (m[0] - '0') * 10 + (m[1] - '0');
    date.day = (d[0] - '0') * 10 + (d[1] - '0');
    if (!is_valid_date(date.year, date.month, date.day)) return std::nullopt;
    return date;
}

} // namespace

bool is_valid_date(int year, int month, int day) {
    if (year < 1 || month < 1 || month > 12 || day < 1) return false;
    static constexpr int days_in_month[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int max_day = days_in_month[month - 1];
    const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    if (month == 2 && leap) max_day = 29;
    return day <= max_day;
}

std::string Article::text() const {
    std::string out = headline;
    out += '\n';
    out += abstract;
    out += '\n';
    for (size_t i = 0; i < keywords.size(); ++i) {
        if (i > 0) out += ' ';
        out += keywords[i];
    }
    return out;
}

std::string_view skip_reason_name(SkipReason reason) {
    switch (reason) {
        case SkipReason::Malformed: return "malformed";
        case SkipReason::MissingDate: return "missing_date";
        case SkipReason::InvalidDate: return "invalid_date";
        case SkipReason::MissingText: return "missing_text";
        case SkipReason::YearOutOfRange: return "year_out_of_range";
    }
    return "unknown";
}

YearRange parse_year_range(std::string_view text) {
    const size_t colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw UsageError("year range must look like 2010:2019, got '" + std::string(text) + "'");
    }
    long long start = 0, end = 0;
    if (!parse_int64(text.substr(0, colon), start) || !parse_int64(text.substr(colon + 1), end)) {
        throw UsageError("year range must look like 2010:2019, got '" + std::string(text) + "'");
    }
    if (start > end) {
        throw UsageError("year range start exceeds end: '" + std::string(text) + "'");
    }
    if (start < 1 || end > 9999) {
        throw UsageError("year range out of bounds: '" + std::string(text) + "'");
    }
    return YearRange{static_cast<int>(start), static_cast<int>(end)};
}

std::variant<Article, SkipReason> parse_article_record(const std::string& line) {
    const json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) return SkipReason::Malformed;

    Article article;
    const auto id_it = j.find("id");
    if (id_it == j.end() || !id_it->is_string()) return SkipReason::Malformed;
    article.id = id_it->get<std::string>();
    if (article.id.empty()) return SkipReason::Malformed;

    const auto date_it = j.find("pub_date");
    if (date_it == j.end()) return SkipReason::MissingDate;
    if (!date_it->is_string()) return SkipReason::InvalidDate;
    const auto date = parse_iso_date(date_it->get<std::string>());
    if (!date) return SkipReason::InvalidDate;
    article.date = *date;

    const auto headline_it = j.find("headline");
    if (headline_it != j.end()) {
        if (!headline_it->is_string()) return SkipReason::Malformed;
        article.headline = headline_it->get<std::string>();
    }
    const auto abstract_it = j.find("abstract");
    if (abstract_it != j.end()) {
        if (!abstract_it->is_string()) return SkipReason::Malformed;
        article.abstract = abstract_it->get<std::string>();
    }
    const auto keywords_it = j.find("keywords");
    if (keywords_it != j.end()) {
        if (!keywords_it->is_array()) return SkipReason::Malformed;
        for (const auto& kw : *keywords_it) {
            if (!kw.is_string()) return SkipReason::Malformed;
            article.keywords.push_back(kw.get<std::string>());
        }
    }
    // present-but-empty fields give nothing to score either
    const bool has_text = !article.headline.empty() || !article.abstract.empty() ||
                          std::any_of(article.keywords.begin(), article.keywords.end(),
                                      [](const std::string& kw) { return !kw.empty(); });
    if (!has_text) return SkipReason::MissingText;

    return article;
}

CorpusReader::CorpusReader(std::vector<std::string> paths, YearRange years, bool strict)
    : paths_(std::move(paths)), years_(years), strict_(strict) {}

bool CorpusReader::open_next_file() {
    while (file_index_ < paths_.size()) {
        current_path_ = paths_[file_index_++];
        in_.close();
        in_.clear();
        in_.open(current_path_);
        if (!in_) throw IoError("cannot open corpus file: " + current_path_);
        line_number_ = 0;
        return true;
    }
    return false;
}

std::optional<Article> CorpusReader::next() {
    for (;;) {
        if (!in_.is_open()) {
            if (!open_next_file()) break;
        }
        std::string line;
        if (!std::getline(in_, line)) {
            in_.close();
            continue;
        }
        ++line_number_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue; // blank lines are not records

        ++stats_.records_read;
        auto parsed = parse_article_record(line);
        if (std::holds_alternative<SkipReason>(parsed)) {
            const SkipReason reason = std::get<SkipReason>(parsed);
            if (strict_) {
                throw DataError(current_path_ + ":" + std::to_string(line_number_) +
                                ": " + std::string(skip_reason_name(reason)) + " record");
            }
            ++stats_.records_skipped;
            ++stats_.skip_reasons[reason];
            continue;
        }
        Article article = std::move(std::get<Article>(parsed));
        if (!years_.contains(article.date.year)) {
            ++stats_.records_skipped;
            ++stats_.skip_reasons[SkipReason::YearOutOfRange];
            continue;
        }
        if (!seen_ids_.insert(article.id).second) {
            ++stats_.duplicate_ids;
            continue;
        }
        ++stats_.records_kept;
        ++stats_.year_histogram[article.date.year];
        return article;
    }
    if (stats_.records_kept == 0 && !warned_empty_) {
        warned_empty_ = true;
        log_line("warning: no corpus records kept");
    }
    return std::nullopt;
}

CorpusStats for_each_article(const std::vector<std::string>& paths, YearRange years, bool strict,
                             const std::function<void(const Article&)>& fn) {
    CorpusReader reader(paths, years, strict);
    while (auto article = reader.next()) {
        fn(*article);
    }
    return reader.stats();
}

} // namespace pressflow
