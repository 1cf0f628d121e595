#include "dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "csv.hpp"
#include "error.hpp"
#include "states.hpp"
#include "text.hpp"

namespace pressflow {

namespace {

int require_state(const std::string& name, const std::string& context) {
    auto idx = state_index(name);
    if (!idx) throw DataError(context + ": unknown state '" + name + "'");
    return *idx;
}

double field_double(const std::vector<std::string>& row, size_t col, const std::string& path,
                    size_t line) {
    double v = 0.0;
    if (!parse_double(row[col], v)) {
        throw DataError(path + ":" + std::to_string(line) + ": bad numeric field '" + row[col] +
                        "'");
    }
    return v;
}

int field_year(const std::vector<std::string>& row, size_t col, const std::string& path,
               size_t line) {
    long long y = 0;
    if (!parse_int64(row[col], y) || y < 1000 || y > 9999) {
        throw DataError(path + ":" + std::to_string(line) + ": bad year '" + row[col] + "'");
    }
    return static_cast<int>(y);
}

void require_header(const std::vector<std::string>& got, const std::vector<std::string>& want,
                    const std::string& path) {
    if (got != want) {
        throw DataError(path + ": unexpected header '" + csv_join(got) + "', expected '" +
                        csv_join(want) + "'");
    }
}

} // namespace

const StateYearSentiment& SentimentGrid::at(int state, int year) const {
    if (state < 0 || state >= kStateCount || !years.contains(year)) {
        throw DataError("grid lookup out of range: state " + std::to_string(state) + ", year " +
                        std::to_string(year));
    }
    size_t idx = static_cast<size_t>(state) * years.count() + static_cast<size_t>(year - years.start);
    return cells[idx];
}

SentimentGrid aggregate_state_year(const std::vector<ScoredArticle>& scores,
                                   const std::vector<TagRecord>& tags, YearRange years) {
    std::unordered_map<std::string, const ScoredArticle*> by_id;
    by_id.reserve(scores.size());
    for (const auto& s : scores) by_id[s.article_id] = &s;

    size_t n_years = years.count();
    std::vector<double> sums(static_cast<size_t>(kStateCount) * n_years, 0.0);
    std::vector<uint64_t> counts(static_cast<size_t>(kStateCount) * n_years, 0);

    for (const auto& tag : tags) {
        auto it = by_id.find(tag.article_id);
        if (it == by_id.end()) {
            throw DataError("tagged article '" + tag.article_id + "' has no score");
        }
        const ScoredArticle& art = *it->second;
        if (!years.contains(art.year)) continue;
        int state = require_state(tag.state, "tag for '" + tag.article_id + "'");
        size_t idx = static_cast<size_t>(state) * n_years + static_cast<size_t>(art.year - years.start);
        sums[idx] += art.score.compound;
        counts[idx] += 1;
    }

    SentimentGrid grid;
    grid.years = years;
    grid.cells.resize(sums.size());
    for (int s = 0; s < kStateCount; ++s) {
        for (size_t y = 0; y < n_years; ++y) {
            size_t idx = static_cast<size_t>(s) * n_years + y;
            StateYearSentiment& cell = grid.cells[idx];
            cell.state = s;
            cell.year = years.start + static_cast<int>(y);
            cell.article_count = counts[idx];
            if (counts[idx] == 0) {
                cell.mean_compound = 0.0;
                cell.flagged = true;
            } else {
                cell.mean_compound = sums[idx] / static_cast<double>(counts[idx]);
                cell.flagged = false;
            }
        }
    }
    return grid;
}

PairwiseDataset build_pairwise_dataset(const SentimentGrid& grid,
                                       const std::vector<MigrationFlow>& flows) {
    PairwiseDataset out;
    out.rows.reserve(flows.size());
    for (const auto& f : flows) {
        if (!grid.covers(f.year)) {
            out.dropped_flows += 1;
            continue;
        }
        PairwiseRow row;
        row.origin = f.origin;
        row.destination = f.destination;
        row.year = f.year;
        row.sentiment_delta =
            grid.at(f.destination, f.year).mean_compound - grid.at(f.origin, f.year).mean_compound;
        row.flow = f.estimate;
        out.rows.push_back(row);
    }
    return out;
}

std::vector<VectorRow> build_vector_dataset(const SentimentGrid& grid,
                                            const std::vector<MigrationFlow>& flows,
                                            bool net_flows, bool allow_missing) {
    size_t n_years = grid.years.count();
    if (grid.cells.size() != static_cast<size_t>(kStateCount) * n_years) {
        throw DataError("sentiment grid is not the full state-by-year table (" +
                        std::to_string(grid.cells.size()) + " cells)");
    }

    std::vector<VectorRow> rows(n_years);
    for (size_t y = 0; y < n_years; ++y) {
        VectorRow& row = rows[y];
        row.year = grid.years.start + static_cast<int>(y);
        row.sentiment.assign(kStateCount, 0.0);
        row.target.assign(kStateCount, 0.0);
        for (int s = 0; s < kStateCount; ++s) {
            const StateYearSentiment& cell = grid.at(s, row.year);
            if (cell.flagged) {
                if (!allow_missing) {
                    throw DataError("no articles for " + canonical_states()[s] + " in " +
                                    std::to_string(row.year) +
                                    " (pass --allow-missing to zero-fill)");
                }
                row.incomplete = true;
            }
            row.sentiment[static_cast<size_t>(s)] = cell.mean_compound;
        }
    }

    for (const auto& f : flows) {
        if (!grid.covers(f.year)) continue;
        VectorRow& row = rows[static_cast<size_t>(f.year - grid.years.start)];
        row.target[static_cast<size_t>(f.destination)] += f.estimate;
        if (net_flows) row.target[static_cast<size_t>(f.origin)] -= f.estimate;
    }
    return rows;
}

void write_scores_csv(const std::string& path, const std::vector<ScoredArticle>& scores) {
    CsvWriter w(path);
    w.write_row({"article_id", "year", "compound", "pos", "neg", "neu"});
    for (const auto& s : scores) {
        w.write_row({s.article_id, std::to_string(s.year), format_double(s.score.compound),
                     format_double(s.score.pos), format_double(s.score.neg),
                     format_double(s.score.neu)});
    }
    w.close();
}

std::vector<ScoredArticle> read_scores_csv(const std::string& path) {
    CsvReader reader(path);
    std::vector<std::string> row;
    if (!reader.next_row(row)) throw DataError(path + ": empty scores file");
    require_header(row, {"article_id", "year", "compound", "pos", "neg", "neu"}, path);

    std::vector<ScoredArticle> out;
    std::unordered_set<std::string> seen;
    while (reader.next_row(row)) {
        if (row.size() != 6) {
            throw DataError(path + ":" + std::to_string(reader.line_number()) + ": expected 6 fields, got " +
                            std::to_string(row.size()));
        }
        ScoredArticle s;
        s.article_id = row[0];
        if (s.article_id.empty()) {
            throw DataError(path + ":" + std::to_string(reader.line_number()) + ": empty article_id");
        }
        if (!seen.insert(s.article_id).second) {
            throw DataError(path + ":" + std::to_string(reader.line_number()) + ": duplicate article_id '" +
                            s.article_id + "'");
        }
        s.year = field_year(row, 1, path, reader.line_number());
        s.score.compound = field_double(row, 2, path, reader.line_number());
        s.score.pos = field_double(row, 3, path, reader.line_number());
        s.score.neg = field_double(row, 4, path, reader.line_number());
        s.score.neu = field_double(row, 5, path, reader.line_number());
        out.push_back(std::move(s));
    }
    return out;
}

void write_tags_csv(const std::string& path, const std::vector<TagRecord>& tags) {
    CsvWriter w(path);
    w.write_row({"article_id", "state"});
    for (const auto& t : tags) w.write_row({t.article_id, t.state});
    w.close();
}

std::vector<TagRecord> read_tags_csv(const std::string& path) {
    CsvReader reader(path);
    std::vector<std::string> row;
    if (!reader.next_row(row)) throw DataError(path + ": empty tags file");
    require_header(row, {"article_id", "state"}, path);

    std::vector<TagRecord> out;
    std::set<std::pair<std::string, std::string>> seen;
    while (reader.next_row(row)) {
        if (row.size() != 2) {
            throw DataError(path + ":" + std::to_string(reader.line_number()) + ": expected 2 fields, got " +
                            std::to_string(row.size()));
        }
        TagRecord t{row[0], row[1]};
        if (t.article_id.empty()) {
            throw DataError(path + ":" + std::to_string(reader.line_number()) + ": empty article_id");
        }
        require_state(t.state, path + ":" + std::to_string(reader.line_number()));
        if (!seen.insert({t.article_id, t.state}).second) {
            throw DataError(path + ":" + std::to_string(reader.line_number()) + ": duplicate tag " +
                            t.article_id + "/" + t.state);
        }
        out.push_back(std::move(t));
    }
    return out;
}

void write_grid_csv(const std::string& path, const SentimentGrid& grid) {
    CsvWriter w(path);
    w.write_row({"state", "year", "mean_compound", "article_count", "flagged"});
    for (const auto& cell : grid.cells) {
        w.write_row({canonical_states()[static_cast<size_t>(cell.state)], std::to_string(cell.year),
                     format_double(cell.mean_compound), std::to_string(cell.article_count),
                     cell.flagged ? "1" : "0"});
    }
    w.close();
}

void write_pairwise_csv(const std::string& path, const PairwiseDataset& dataset) {
    CsvWriter w(path);
    w.write_row({"origin", "destination", "year", "sentiment_delta", "flow"});
    for (const auto& r : dataset.rows) {
        w.write_row({canonical_states()[static_cast<size_t>(r.origin)],
                     canonical_states()[static_cast<size_t>(r.destination)], std::to_string(r.year),
                     format_double(r.sentiment_delta), format_double(r.flow)});
    }
    w.close();
}

PairwiseDataset read_pairwise_csv(const std::string& path) {
    CsvReader reader(path);
    std::vector<std::string> row;
    if (!reader.next_row(row)) throw DataError(path + ": empty pairwise file");
    require_header(row, {"origin", "destination", "year", "sentiment_delta", "flow"}, path);

    PairwiseDataset out;
    while (reader.next_row(row)) {
        if (row.size() != 5) {
            throw DataError(path + ":" + std::to_string(reader.line_number()) + ": expected 5 fields, got " +
                            std::to_string(row.size()));
        }
        PairwiseRow r;
        r.origin = require_state(row[0], path + ":" + std::to_string(reader.line_number()));
        r.destination = require_state(row[1], path + ":" + std::to_string(reader.line_number()));
        if (r.origin == r.destination) {
            throw DataError(path + ":" + std::to_string(reader.line_number()) + ": self flow for '" + row[0] +
                            "'");
        }
        r.year = field_year(row, 2, path, reader.line_number());
        r.sentiment_delta = field_double(row, 3, path, reader.line_number());
        r.flow = field_double(row, 4, path, reader.line_number());
        out.rows.push_back(r);
    }
    return out;
}

namespace {

std::vector<std::string> vector_csv_header() {
    std::vector<std::string> header;
    header.reserve(1 + 2 * kStateCount);
    header.push_back("year");
    for (int s = 0; s < kStateCount; ++s) header.push_back("s_" + state_column_label(s));
    for (int s = 0; s < kStateCount; ++s) header.push_back("t_" + state_column_label(s));
    return header;
}

} // namespace

void write_vector_csv(const std::string& path, const std::vector<VectorRow>& rows) {
    CsvWriter w(path);
    w.write_row(vector_csv_header());
    for (const auto& r : rows) {
        std::vector<std::string> out;
        out.reserve(1 + 2 * kStateCount);
        out.push_back(std::to_string(r.year));
        for (double v : r.sentiment) out.push_back(format_double(v));
        for (double v : r.target) out.push_back(format_double(v));
        w.write_row(out);
    }
    w.close();
}

std::vector<VectorRow> read_vector_csv(const std::string& path) {
    CsvReader reader(path);
    std::vector<std::string> row;
    if (!reader.next_row(row)) throw DataError(path + ": empty vector file");
    require_header(row, vector_csv_header(), path);

    std::vector<VectorRow> out;
    while (reader.next_row(row)) {
        if (row.size() != 1 + 2 * static_cast<size_t>(kStateCount)) {
            throw DataError(path + ":" + std::to_string(reader.line_number()) + ": expected " +
                            std::to_string(1 + 2 * kStateCount) + " fields, got " +
                            std::to_string(row.size()));
        }
        VectorRow r;
        r.year = field_year(row, 0, path, reader.line_number());
        r.sentiment.resize(kStateCount);
        r.target.resize(kStateCount);
        for (int s = 0; s < kStateCount; ++s) {
            r.sentiment[static_cast<size_t>(s)] =
                field_double(row, 1 + static_cast<size_t>(s), path, reader.line_number());
            r.target[static_cast<size_t>(s)] = field_double(
                row, 1 + static_cast<size_t>(kStateCount + s), path, reader.line_number());
        }
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace pressflow
