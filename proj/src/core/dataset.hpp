#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "census.hpp"
#include "corpus.hpp"
#include "sentiment.hpp"

namespace pressflow {

// One scored article: id, publication year, and the component scores.
struct ScoredArticle {
    std::string article_id;
    int year = 0;
    CompoundScore score;
};

struct StateYearSentiment {
    int state = 0; // canonical index
    int year = 0;
    double mean_compound = 0.0;
    uint64_t article_count = 0;
    bool flagged = false; // empty cell, mean defined as 0
};

// Always the full |states| x |years| grid, state-major then year ascending.
struct SentimentGrid {
    YearRange years;
    std::vector<StateYearSentiment> cells;

    const StateYearSentiment& at(int state, int year) const;
    bool covers(int year) const { return years.contains(year); }
};

struct PairwiseRow {
    int origin = 0;
    int destination = 0;
    int year = 0;
    double sentiment_delta = 0.0; // destination mean - origin mean
    double flow = 0.0;
};

struct VectorRow {
    int year = 0;
    std::vector<double> sentiment; // 50, canonical order
    std::vector<double> target;    // 50, inbound totals (or net with the flag)
    bool incomplete = false;       // grid gaps were zero-filled
};

struct PairwiseDataset {
    std::vector<PairwiseRow> rows;
    uint64_t dropped_flows = 0; // flow year outside the sentiment grid
};

// tag pair (article_id, canonical state name), one per match.
struct TagRecord {
    std::string article_id;
    std::string state;
};

// Mean compound per (state, year) over every article tagged with that state;
// multi-state articles count once per matched state. Tagged ids missing from
// scores abort (the precondition every caller can honor cheaply). Tags for
// years outside the range are ignored.
SentimentGrid aggregate_state_year(const std::vector<ScoredArticle>& scores,
                                   const std::vector<TagRecord>& tags, YearRange years);

// One row per flow whose year the grid covers; dropped flows counted.
// Rows keep the (year, origin, destination) order of the input flows.
PairwiseDataset build_pairwise_dataset(const SentimentGrid& grid,
                                       const std::vector<MigrationFlow>& flows);

// One row per grid year, ascending. target[s] = sum of inbound flows into s
// that year; with net_flows, outbound totals are subtracted. Grids built by
// aggregate_state_year are always complete; a hand-built incomplete grid
// aborts unless allow_missing zero-fills and flags the row.
std::vector<VectorRow> build_vector_dataset(const SentimentGrid& grid,
                                            const std::vector<MigrationFlow>& flows,
                                            bool net_flows = false, bool allow_missing = false);

// CSV codecs. Writers emit deterministic row order and 17-significant-digit
// doubles; readers validate headers and abort on malformed rows.
void write_scores_csv(const std::string& path, const std::vector<ScoredArticle>& scores);
std::vector<ScoredArticle> read_scores_csv(const std::string& path);

void write_tags_csv(const std::string& path, const std::vector<TagRecord>& tags);
std::vector<TagRecord> read_tags_csv(const std::string& path);

void write_grid_csv(const std::string& path, const SentimentGrid& grid);

void write_pairwise_csv(const std::string& path, const PairwiseDataset& dataset);
PairwiseDataset read_pairwise_csv(const std::string& path);

void write_vector_csv(const std::string& path, const std::vector<VectorRow>& rows);
std::vector<VectorRow> read_vector_csv(const std::string& path);

} // namespace pressflow
