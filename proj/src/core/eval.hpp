#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "census.hpp"
#include "dataset.hpp"
#include "model.hpp"

namespace pressflow {

struct SplitResult {
    std::vector<size_t> train; // indices into the input rows
    std::vector<size_t> test;
    double fraction = 0.8;
    uint64_t seed = 0;
    bool by_year = false;
};

// Seeded uniform shuffle of [0, n), then a prefix split with
// |train| = round(fraction * n). Deterministic per seed.
SplitResult split_dataset(size_t n, double fraction, uint64_t seed);

// Shuffles the distinct years instead of the rows, so no year contributes to
// both sides. |train years| = round(fraction * distinct years).
SplitResult split_dataset_by_year(const std::vector<int>& row_years, double fraction,
                                  uint64_t seed);

double mean_absolute_error(const std::vector<double>& pred, const std::vector<double>& actual);

// Unit labels shared by reports and prediction output: "ohio:2015" for a
// state-year cell, "ohio>texas:2015" for a directed pair.
std::string cell_label(int state, int year);
std::string pair_label(int origin, int destination, int year);

struct EvalRow {
    std::string label; // "ohio:2015" or "ohio>texas:2015"
    double actual = 0.0;
    double predicted = 0.0;
    double error = 0.0; // predicted - actual
};

struct EvalReport {
    ModelKind kind = ModelKind::Network;
    DatasetMode mode = DatasetMode::Vector;
    double mae = 0.0;
    std::vector<EvalRow> per_unit_rows;
    size_t n_test = 0; // test rows (a vector row expands to 50 units)
    size_t negative_prediction_count = 0;
    std::optional<double> census_moe_context;
    // MAE of always predicting the training-split target mean; the model has
    // to beat this for the sentiment signal to mean anything.
    double mean_predictor_mae = 0.0;
};

// Predicts every test row, assembles per-unit actual/predicted/error rows
// (state-year cells in vector mode, state pairs in pairwise mode), and
// computes the MAE plus the train-mean baseline. For logistic checkpoints
// "actual" is the above-threshold label and "predicted" the probability.
// Aborts if either side of the split is empty.
EvalReport build_comparison_report(const ModelCheckpoint& ckpt,
                                   const std::vector<VectorRow>& rows, const SplitResult& split);
EvalReport build_comparison_report(const ModelCheckpoint& ckpt,
                                   const std::vector<PairwiseRow>& rows,
                                   const SplitResult& split);

// Mean census margin of error over the flows matching the test rows (pairwise:
// exact origin/destination/year matches; vector: every flow in a test year).
// Empty match -> nullopt.
std::optional<double> mean_moe_context(const std::vector<MigrationFlow>& flows,
                                       const std::vector<PairwiseRow>& rows,
                                       const SplitResult& split);
std::optional<double> mean_moe_context(const std::vector<MigrationFlow>& flows,
                                       const std::vector<VectorRow>& rows,
                                       const SplitResult& split);

// Provenance block written alongside the metrics.
struct ReportMeta {
    std::string checkpoint_fingerprint;
    std::string dataset_fingerprint;
    bool fingerprint_match = true;
    double split_fraction = 0.8;
    uint64_t split_seed = 0;
    bool split_by_year = false;
};

// report.json: EvalReport fields plus the meta block, stable key order,
// round-trip-exact doubles.
void write_report_json(const EvalReport& report, const ReportMeta& meta,
                       const std::string& path);

// comparison.csv: label,actual,predicted,error with round-trip-exact doubles.
void write_comparison_csv(const EvalReport& report, const std::string& path);

// comparison.svg: actual and predicted polylines over units sorted by
// descending actual value.
void write_comparison_svg(const EvalReport& report, const std::string& path);

// loss_curve.csv (epoch,loss; epoch is the 0-based trace index) and
// loss_curve.svg (loss vs epoch polyline, linear axes). CSV values parse back
// bit-exactly.
void export_loss_curve(const std::vector<double>& trace, const std::string& csv_path,
                       const std::string& svg_path);

} // namespace pressflow
