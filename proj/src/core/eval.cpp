#include "eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <tuple>

#include <json.hpp>

#include "csv.hpp"
#include "error.hpp"
#include "rng.hpp"
#include "states.hpp"
#include "text.hpp"

namespace pressflow {

namespace {

void check_fraction(double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw UsageError("split fraction must be strictly between 0 and 1, got " +
                         format_double(fraction));
    }
}

template <typename T>
void seeded_shuffle(std::vector<T>& items, Rng& rng) {
    for (size_t i = items.size(); i > 1; --i) {
        std::swap(items[i - 1], items[rng.uniform_index(i)]);
    }
}

struct Units {
    std::vector<std::string> labels;
    std::vector<double> actual;
    std::vector<double> predicted;
};

EvalReport finish_report(Units units, const std::vector<double>& baseline_pred,
                         size_t n_test) {
    EvalReport report;
    report.n_test = n_test;
    report.mae = mean_absolute_error(units.predicted, units.actual);
    report.mean_predictor_mae = mean_absolute_error(baseline_pred, units.actual);
    report.per_unit_rows.reserve(units.labels.size());
    for (size_t i = 0; i < units.labels.size(); ++i) {
        EvalRow row;
        row.label = std::move(units.labels[i]);
        row.actual = units.actual[i];
        row.predicted = units.predicted[i];
        row.error = row.predicted - row.actual;
        if (row.predicted < 0.0) ++report.negative_prediction_count;
        report.per_unit_rows.push_back(std::move(row));
    }
    return report;
}

void check_split_against(const SplitResult& split, size_t n, const char* what) {
    if (split.test.empty()) throw DataError(std::string(what) + ": test split is empty");
    if (split.train.empty()) {
        throw DataError(std::string(what) + ": split leaves no training rows for the baseline");
    }
    for (size_t idx : split.train) {
        if (idx >= n) throw DataError(std::string(what) + ": split does not match the dataset");
    }
    for (size_t idx : split.test) {
        if (idx >= n) throw DataError(std::string(what) + ": split does not match the dataset");
    }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    return out;
}

void close_out(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out.good()) throw IoError("write failed for " + path);
}

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string axis_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct PlotFrame {
    double width, height, left, right, top, bottom;
    double lo = 0.0, hi = 1.0; // value bounds on the y axis
    size_t count = 1;          // points along the x axis

    double x(size_t i) const {
        const double span = width - left - right;
        if (count <= 1) return left + span / 2.0;
        return left + span * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    double y(double v) const {
        return top + (hi - v) * (height - top - bottom) / (hi - lo);
    }
};

void pad_bounds(double& lo, double& hi) {
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
        return;
    }
    const double pad = (hi - lo) * 0.05;
    lo -= pad;
    hi += pad;
}

void svg_open(std::ofstream& out, double width, double height, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << px(width / 2) << "\" y=\"18\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
}

void svg_axes(std::ofstream& out, const PlotFrame& f) {
    out << "<line x1=\"" << px(f.left) << "\" y1=\"" << px(f.top) << "\" x2=\"" << px(f.left)
        << "\" y2=\"" << px(f.height - f.bottom) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << px(f.left) << "\" y1=\"" << px(f.height - f.bottom) << "\" x2=\""
        << px(f.width - f.right) << "\" y2=\"" << px(f.height - f.bottom)
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << px(f.left - 6) << "\" y=\"" << px(f.y(f.hi) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << axis_value(f.hi) << "</text>\n";
    out << "<text x=\"" << px(f.left - 6) << "\" y=\"" << px(f.y(f.lo) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << axis_value(f.lo) << "</text>\n";
}

void svg_polyline(std::ofstream& out, const PlotFrame& f, const std::vector<double>& values,
                  const char* color) {
    if (values.size() == 1) {
        out << "<circle cx=\"" << px(f.x(0)) << "\" cy=\"" << px(f.y(values[0]))
            << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        return;
    }
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) out << ' ';
        out << px(f.x(i)) << ',' << px(f.y(values[i]));
    }
    out << "\"/>\n";
}

} // namespace

std::string cell_label(int state, int year) {
    return std::string(state_column_label(state)) + ":" + std::to_string(year);
}

std::string pair_label(int origin, int destination, int year) {
    return std::string(state_column_label(origin)) + ">" +
           std::string(state_column_label(destination)) + ":" + std::to_string(year);
}

SplitResult split_dataset(size_t n, double fraction, uint64_t seed) {
    check_fraction(fraction);
    if (n < 2) {
        throw DataError("cannot split " + std::to_string(n) +
                        " rows into train and test sets (need at least 2)");
    }
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(derive_seed(seed, "split"));
    seeded_shuffle(order, rng);

    const auto n_train = static_cast<size_t>(std::lround(fraction * static_cast<double>(n)));
    SplitResult split;
    split.fraction = fraction;
    split.seed = seed;
    split.train.assign(order.begin(), order.begin() + static_cast<ptrdiff_t>(n_train));
    split.test.assign(order.begin() + static_cast<ptrdiff_t>(n_train), order.end());
    return split;
}

SplitResult split_dataset_by_year(const std::vector<int>& row_years, double fraction,
                                  uint64_t seed) {
    check_fraction(fraction);
    std::set<int> distinct(row_years.begin(), row_years.end());
    if (distinct.size() < 2) {
        throw DataError("year split needs at least 2 distinct years, got " +
                        std::to_string(distinct.size()));
    }
    std::vector<int> years(distinct.begin(), distinct.end());
    Rng rng(derive_seed(seed, "split"));
    seeded_shuffle(years, rng);

    const auto n_train =
        static_cast<size_t>(std::lround(fraction * static_cast<double>(years.size())));
    std::set<int> train_years(years.begin(), years.begin() + static_cast<ptrdiff_t>(n_train));

    SplitResult split;
    split.fraction = fraction;
    split.seed = seed;
    split.by_year = true;
    for (size_t i = 0; i < row_years.size(); ++i) {
        (train_years.count(row_years[i]) ? split.train : split.test).push_back(i);
    }
    return split;
}

double mean_absolute_error(const std::vector<double>& pred, const std::vector<double>& actual) {
    if (pred.size() != actual.size()) {
        throw DataError("mean_absolute_error: " + std::to_string(pred.size()) +
                        " predictions vs " + std::to_string(actual.size()) + " actuals");
    }
    if (pred.empty()) throw DataError("mean_absolute_error: empty input");
    double sum = 0.0;
    for (size_t i = 0; i < pred.size(); ++i) sum += std::abs(pred[i] - actual[i]);
    return sum / static_cast<double>(pred.size());
}

EvalReport build_comparison_report(const ModelCheckpoint& ckpt,
                                   const std::vector<VectorRow>& rows,
                                   const SplitResult& split) {
    if (ckpt.config.mode != DatasetMode::Vector || ckpt.kind != ModelKind::Network) {
        throw DataError("checkpoint was not trained on a vector dataset");
    }
    check_split_against(split, rows.size(), "evaluate");

    Matrix x(split.test.size(), kStateCount);
    for (size_t r = 0; r < split.test.size(); ++r) {
        const VectorRow& row = rows[split.test[r]];
        if (row.sentiment.size() != kStateCount || row.target.size() != kStateCount) {
            throw DataError("vector row width is not " + std::to_string(kStateCount));
        }
        for (int d = 0; d < kStateCount; ++d) x.at(r, static_cast<size_t>(d)) = row.sentiment[d];
    }
    const Matrix pred = predict(ckpt, x);

    std::vector<double> dim_mean(kStateCount, 0.0);
    for (size_t idx : split.train) {
        for (int d = 0; d < kStateCount; ++d) dim_mean[static_cast<size_t>(d)] += rows[idx].target[d];
    }
    for (double& m : dim_mean) m /= static_cast<double>(split.train.size());

    Units units;
    std::vector<double> baseline;
    for (size_t r = 0; r < split.test.size(); ++r) {
        const VectorRow& row = rows[split.test[r]];
        for (int d = 0; d < kStateCount; ++d) {
            units.labels.push_back(cell_label(d, row.year));
            units.actual.push_back(row.target[d]);
            units.predicted.push_back(pred.at(r, static_cast<size_t>(d)));
            baseline.push_back(dim_mean[static_cast<size_t>(d)]);
        }
    }
    EvalReport report = finish_report(std::move(units), baseline, split.test.size());
    report.kind = ckpt.kind;
    report.mode = ckpt.config.mode;
    return report;
}

EvalReport build_comparison_report(const ModelCheckpoint& ckpt,
                                   const std::vector<PairwiseRow>& rows,
                                   const SplitResult& split) {
    if (ckpt.config.mode != DatasetMode::Pairwise) {
        throw DataError("checkpoint was not trained on a pairwise dataset");
    }
    check_split_against(split, rows.size(), "evaluate");

    Matrix x(split.test.size(), 1);
    for (size_t r = 0; r < split.test.size(); ++r) {
        x.at(r, 0) = rows[split.test[r]].sentiment_delta;
    }
    const Matrix pred = predict(ckpt, x);

    const bool logistic = ckpt.kind == ModelKind::Logistic;
    auto target_of = [&](const PairwiseRow& row) {
        return logistic ? (row.flow > ckpt.threshold ? 1.0 : 0.0) : row.flow;
    };

    double train_mean = 0.0;
    for (size_t idx : split.train) train_mean += target_of(rows[idx]);
    train_mean /= static_cast<double>(split.train.size());

    Units units;
    std::vector<double> baseline;
    for (size_t r = 0; r < split.test.size(); ++r) {
        const PairwiseRow& row = rows[split.test[r]];
        units.labels.push_back(pair_label(row.origin, row.destination, row.year));
        units.actual.push_back(target_of(row));
        units.predicted.push_back(pred.at(r, 0));
        baseline.push_back(train_mean);
    }
    EvalReport report = finish_report(std::move(units), baseline, split.test.size());
    report.kind = ckpt.kind;
    report.mode = ckpt.config.mode;
    return report;
}

std::optional<double> mean_moe_context(const std::vector<MigrationFlow>& flows,
                                       const std::vector<PairwiseRow>& rows,
                                       const SplitResult& split) {
    std::map<std::tuple<int, int, int>, double> moe_of;
    for (const MigrationFlow& f : flows) moe_of[{f.origin, f.destination, f.year}] = f.moe;
    double sum = 0.0;
    size_t count = 0;
    for (size_t idx : split.test) {
        if (idx >= rows.size()) continue;
        const PairwiseRow& row = rows[idx];
        auto it = moe_of.find({row.origin, row.destination, row.year});
        if (it != moe_of.end()) {
            sum += it->second;
            ++count;
        }
    }
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
}

std::optional<double> mean_moe_context(const std::vector<MigrationFlow>& flows,
                                       const std::vector<VectorRow>& rows,
                                       const SplitResult& split) {
    std::set<int> test_years;
    for (size_t idx : split.test) {
        if (idx < rows.size()) test_years.insert(rows[idx].year);
    }
    double sum = 0.0;
    size_t count = 0;
    for (const MigrationFlow& f : flows) {
        if (test_years.count(f.year)) {
            sum += f.moe;
            ++count;
        }
    }
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
}

void write_report_json(const EvalReport& report, const ReportMeta& meta,
                       const std::string& path) {
    nlohmann::ordered_json j;
    j["metric"] = "mean absolute error over held-out test rows";
    j["kind"] = std::string(kind_name(report.kind));
    j["mode"] = std::string(mode_name(report.mode));
    j["mae"] = report.mae;
    j["mean_predictor_mae"] = report.mean_predictor_mae;
    if (report.mean_predictor_mae > 0.0) {
        j["improvement_over_mean_predictor"] = 1.0 - report.mae / report.mean_predictor_mae;
    } else {
        j["improvement_over_mean_predictor"] = nullptr;
    }
    j["n_test"] = report.n_test;
    j["n_units"] = report.per_unit_rows.size();
    j["negative_prediction_count"] = report.negative_prediction_count;
    if (report.census_moe_context) {
        j["census_moe_context"] = *report.census_moe_context;
    } else {
        j["census_moe_context"] = nullptr;
    }
    j["split"] = {{"fraction", meta.split_fraction},
                  {"seed", meta.split_seed},
                  {"by", meta.split_by_year ? "year" : "row"}};
    j["checkpoint_fingerprint"] = meta.checkpoint_fingerprint;
    j["dataset_fingerprint"] = meta.dataset_fingerprint;
    j["fingerprint_match"] = meta.fingerprint_match;

    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
    close_out(out, path);
}

void write_comparison_csv(const EvalReport& report, const std::string& path) {
    CsvWriter writer(path);
    writer.write_row({"label", "actual", "predicted", "error"});
    for (const EvalRow& row : report.per_unit_rows) {
        writer.write_row({row.label, format_double(row.actual), format_double(row.predicted),
                          format_double(row.error)});
    }
    writer.close();
}

void write_comparison_svg(const EvalReport& report, const std::string& path) {
    if (report.per_unit_rows.empty()) throw DataError("comparison plot needs at least one row");

    std::vector<size_t> order(report.per_unit_rows.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        const EvalRow& ra = report.per_unit_rows[a];
        const EvalRow& rb = report.per_unit_rows[b];
        if (ra.actual != rb.actual) return ra.actual > rb.actual;
        return ra.label < rb.label;
    });

    std::vector<double> actual, predicted;
    for (size_t idx : order) {
        actual.push_back(report.per_unit_rows[idx].actual);
        predicted.push_back(report.per_unit_rows[idx].predicted);
    }

    PlotFrame f{900, 420, 70, 20, 30, 40};
    f.count = actual.size();
    f.lo = *std::min_element(actual.begin(), actual.end());
    f.hi = *std::max_element(actual.begin(), actual.end());
    f.lo = std::min(f.lo, *std::min_element(predicted.begin(), predicted.end()));
    f.hi = std::max(f.hi, *std::max_element(predicted.begin(), predicted.end()));
    pad_bounds(f.lo, f.hi);

    std::ofstream out = open_out(path);
    svg_open(out, f.width, f.height, "actual vs predicted (test rows, sorted by actual)");
    svg_axes(out, f);
    svg_polyline(out, f, actual, "#444444");
    svg_polyline(out, f, predicted, "#d62728");
    out << "<text x=\"" << px(f.width - 180) << "\" y=\"40\" font-family=\"sans-serif\" "
        << "font-size=\"12\" fill=\"#444444\">actual</text>\n";
    out << "<text x=\"" << px(f.width - 180) << "\" y=\"56\" font-family=\"sans-serif\" "
        << "font-size=\"12\" fill=\"#d62728\">predicted</text>\n";
    out << "</svg>\n";
    close_out(out, path);
}

void export_loss_curve(const std::vector<double>& trace, const std::string& csv_path,
                       const std::string& svg_path) {
    if (trace.empty()) throw DataError("loss trace is empty");

    CsvWriter writer(csv_path);
    writer.write_row({"epoch", "loss"});
    for (size_t i = 0; i < trace.size(); ++i) {
        writer.write_row({std::to_string(i), format_double(trace[i])});
    }
    writer.close();

    PlotFrame f{640, 400, 70, 20, 30, 40};
    f.count = trace.size();
    f.lo = *std::min_element(trace.begin(), trace.end());
    f.hi = *std::max_element(trace.begin(), trace.end());
    pad_bounds(f.lo, f.hi);

    std::ofstream out = open_out(svg_path);
    svg_open(out, f.width, f.height, "loss over epochs");
    svg_axes(out, f);
    svg_polyline(out, f, trace, "#1f77b4");
    out << "</svg>\n";
    close_out(out, svg_path);
}

} // namespace pressflow
