#include "pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include "census.hpp"
#include "checkpoint.hpp"
#include "corpus.hpp"
#include "csv.hpp"
#include "dataset.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "fixture.hpp"
#include "log.hpp"
#include "model.hpp"
#include "sentiment.hpp"
#include "sha256.hpp"
#include "states.hpp"
#include "tagger.hpp"
#include "text.hpp"

namespace pressflow {

Options parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path);
    Options options;
    std::string line;
    size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const std::string_view body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        const size_t eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw UsageError(path + " line " + std::to_string(line_number) +
                             ": expected key=value, got '" + std::string(body) + "'");
        }
        const std::string key(trim(body.substr(0, eq)));
        if (key.empty()) {
            throw UsageError(path + " line " + std::to_string(line_number) + ": empty key");
        }
        options.set(key, std::string(trim(body.substr(eq + 1))));
    }
    return options;
}

OptionReader::OptionReader(const Options& options, std::string stage)
    : options_(options), stage_(std::move(stage)) {}

bool OptionReader::has(const std::string& key) const {
    for (const auto& entry : options_.entries()) {
        if (entry.first == key) return true;
    }
    return false;
}

std::string OptionReader::last_value(const std::string& key) const {
    const std::string* found = nullptr;
    for (const auto& entry : options_.entries()) {
        if (entry.first == key) found = &entry.second;
    }
    return found ? *found : std::string();
}

void OptionReader::mark_consumed(const std::string& key) {
    if (std::find(consumed_.begin(), consumed_.end(), key) == consumed_.end()) {
        consumed_.push_back(key);
    }
}

std::string OptionReader::require(const std::string& key) {
    if (!has(key)) throw UsageError(stage_ + ": missing required option --" + key);
    mark_consumed(key);
    std::string value = last_value(key);
    resolved_.emplace_back(key, value);
    return value;
}

std::string OptionReader::get(const std::string& key, const std::string& fallback) {
    mark_consumed(key);
    std::string value = has(key) ? last_value(key) : fallback;
    resolved_.emplace_back(key, value);
    return value;
}

long long OptionReader::get_int(const std::string& key, long long fallback) {
    mark_consumed(key);
    if (!has(key)) {
        resolved_.emplace_back(key, std::to_string(fallback));
        return fallback;
    }
    const std::string value = last_value(key);
    long long parsed = 0;
    if (!parse_int64(value, parsed)) {
        throw UsageError(stage_ + ": option --" + key + " expects an integer, got '" + value +
                         "'");
    }
    resolved_.emplace_back(key, value);
    return parsed;
}

double OptionReader::get_double(const std::string& key, double fallback) {
    mark_consumed(key);
    if (!has(key)) {
        resolved_.emplace_back(key, format_double(fallback));
        return fallback;
    }
    const std::string value = last_value(key);
    double parsed = 0.0;
    if (!parse_double(value, parsed)) {
        throw UsageError(stage_ + ": option --" + key + " expects a number, got '" + value + "'");
    }
    resolved_.emplace_back(key, value);
    return parsed;
}

std::uint64_t OptionReader::get_u64(const std::string& key, std::uint64_t fallback) {
    mark_consumed(key);
    if (!has(key)) {
        resolved_.emplace_back(key, std::to_string(fallback));
        return fallback;
    }
    const std::string value = last_value(key);
    long long parsed = 0;
    if (!parse_int64(value, parsed) || parsed < 0) {
        throw UsageError(stage_ + ": option --" + key + " expects a non-negative integer, got '" +
                         value + "'");
    }
    resolved_.emplace_back(key, value);
    return static_cast<std::uint64_t>(parsed);
}

bool OptionReader::get_flag(const std::string& key, bool fallback) {
    mark_consumed(key);
    bool value = fallback;
    if (has(key)) {
        const std::string raw = to_lower_ascii(last_value(key));
        if (raw.empty() || raw == "1" || raw == "true" || raw == "yes" || raw == "on") {
            value = true;
        } else if (raw == "0" || raw == "false" || raw == "no" || raw == "off") {
            value = false;
        } else {
            throw UsageError(stage_ + ": option --" + key + " expects a boolean, got '" + raw +
                             "'");
        }
    }
    resolved_.emplace_back(key, value ? "true" : "false");
    return value;
}

std::vector<std::string> OptionReader::get_multi(const std::string& key) {
    mark_consumed(key);
    std::vector<std::string> values;
    for (const auto& entry : options_.entries()) {
        if (entry.first == key) {
            values.push_back(entry.second);
            resolved_.emplace_back(key, entry.second);
        }
    }
    return values;
}

void OptionReader::finish() {
    for (const auto& entry : options_.entries()) {
        if (std::find(consumed_.begin(), consumed_.end(), entry.first) == consumed_.end()) {
            throw UsageError(stage_ + ": unknown option --" + entry.first);
        }
    }
}

std::vector<std::pair<std::string, std::string>> OptionReader::resolved() const {
    auto out = resolved_;
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

void write_run_config(const std::string& dir, const OptionReader& reader) {
    const std::string path =
        (std::filesystem::path(dir) / ("run_config_" + reader.stage() + ".txt")).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << "# pressflow " << reader.stage() << " resolved configuration\n";
    for (const auto& entry : reader.resolved()) {
        out << entry.first << "=" << entry.second << "\n";
    }
    out.flush();
    if (!out.good()) throw IoError("write failed for " + path);
}

namespace {

std::string output_dir_of(const std::string& out_file) {
    const auto parent = std::filesystem::path(out_file).parent_path();
    return parent.empty() ? std::string(".") : parent.string();
}

void ensure_dir(const std::string& dir) {
    if (dir.empty() || dir == ".") return;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

void ensure_parent_dir(const std::string& out_file) { ensure_dir(output_dir_of(out_file)); }

std::string join_path(const std::string& dir, const char* name) {
    return (std::filesystem::path(dir) / name).string();
}

YearRange read_years(OptionReader& reader) {
    return parse_year_range(reader.get("years", "2010:2019"));
}

int read_threads(OptionReader& reader) {
    const long long threads = reader.get_int("threads", 1);
    if (threads < 1 || threads > 256) {
        throw UsageError(reader.stage() + ": option --threads must be in [1, 256]");
    }
    return static_cast<int>(threads);
}

std::string flag_text(bool v) { return v ? "true" : "false"; }

// Scores one batch, parallel over a shared index counter. Output order is
// positional, so the thread count never changes the result.
std::vector<CompoundScore> score_batch(const std::vector<std::string>& texts,
                                       const Lexicon& lexicon, int threads) {
    std::vector<CompoundScore> scores(texts.size());
    const size_t workers = std::min<size_t>(static_cast<size_t>(threads), texts.size());
    if (workers <= 1) {
        for (size_t i = 0; i < texts.size(); ++i) scores[i] = score_text(texts[i], lexicon);
        return scores;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < texts.size(); i = next.fetch_add(1)) {
                scores[i] = score_text(texts[i], lexicon);
            }
        });
    }
    for (auto& t : pool) t.join();
    return scores;
}

std::vector<int> parse_layer_list(const std::string& stage, const std::string& text) {
    std::vector<int> sizes;
    for (const auto& field : split(text, ',')) {
        long long width = 0;
        if (!parse_int64(trim(field), width) || width < 1) {
            throw UsageError(stage + ": option --layers expects comma-separated widths, got '" +
                             text + "'");
        }
        sizes.push_back(static_cast<int>(width));
    }
    return sizes;
}

struct EvalSpec {
    std::string dataset;
    std::string flows; // optional normalized flows file for moe context
    std::string out_dir;
    double fraction = 0.8;
    std::uint64_t seed = 0;
    bool by_year = false;
};

bool read_split_by_year(OptionReader& reader) {
    const std::string by = reader.get("split-by", "row");
    if (by != "row" && by != "year") {
        throw UsageError(reader.stage() + ": option --split-by must be 'row' or 'year'");
    }
    return by == "year";
}

// Shared by evaluate and report: split, predict, write the report trio.
void evaluate_checkpoint(const ModelCheckpoint& ckpt, const EvalSpec& spec) {
    ReportMeta meta;
    meta.checkpoint_fingerprint = ckpt.dataset_fingerprint;
    meta.dataset_fingerprint = sha256_file_hex(spec.dataset);
    meta.fingerprint_match = meta.checkpoint_fingerprint == meta.dataset_fingerprint;
    meta.split_fraction = spec.fraction;
    meta.split_seed = spec.seed;
    meta.split_by_year = spec.by_year;
    if (!meta.fingerprint_match) {
        log_line("evaluate: warning: " + spec.dataset +
                 " is not the dataset this checkpoint was trained on (fingerprint mismatch)");
    }

    std::vector<MigrationFlow> flows;
    if (!spec.flows.empty()) flows = read_flows_csv(spec.flows);

    EvalReport report;
    if (ckpt.config.mode == DatasetMode::Pairwise) {
        const auto rows = read_pairwise_csv(spec.dataset).rows;
        SplitResult split;
        if (spec.by_year) {
            std::vector<int> years;
            years.reserve(rows.size());
            for (const auto& row : rows) years.push_back(row.year);
            split = split_dataset_by_year(years, spec.fraction, spec.seed);
        } else {
            split = split_dataset(rows.size(), spec.fraction, spec.seed);
        }
        report = build_comparison_report(ckpt, rows, split);
        if (!flows.empty()) report.census_moe_context = mean_moe_context(flows, rows, split);
    } else {
        const auto rows = read_vector_csv(spec.dataset);
        SplitResult split;
        if (spec.by_year) {
            std::vector<int> years;
            years.reserve(rows.size());
            for (const auto& row : rows) years.push_back(row.year);
            split = split_dataset_by_year(years, spec.fraction, spec.seed);
        } else {
            split = split_dataset(rows.size(), spec.fraction, spec.seed);
        }
        report = build_comparison_report(ckpt, rows, split);
        if (!flows.empty()) report.census_moe_context = mean_moe_context(flows, rows, split);
    }

    ensure_dir(spec.out_dir);
    write_report_json(report, meta, join_path(spec.out_dir, "report.json"));
    write_comparison_csv(report, join_path(spec.out_dir, "comparison.csv"));
    write_comparison_svg(report, join_path(spec.out_dir, "comparison.svg"));
    log_line("evaluate: mae " + format_double(report.mae) + " vs mean-predictor " +
             format_double(report.mean_predictor_mae) + " on " + std::to_string(report.n_test) +
             " test rows (" + std::to_string(report.per_unit_rows.size()) + " units) -> " +
             join_path(spec.out_dir, "report.json"));
}

} // namespace

void run_score(const Options& options) {
    OptionReader reader(options, "score");
    const auto inputs = reader.get_multi("input");
    const std::string out = reader.require("out");
    const std::string lexicon_path = reader.get("lexicon", "");
    const YearRange years = read_years(reader);
    const bool strict = reader.get_flag("strict", false);
    const int threads = read_threads(reader);
    reader.finish();
    if (inputs.empty()) throw UsageError("score: at least one --input corpus file is required");

    Lexicon loaded;
    const Lexicon* lexicon = &bundled_lexicon();
    if (!lexicon_path.empty()) {
        loaded = Lexicon::load(lexicon_path);
        lexicon = &loaded;
    }

    CorpusReader corpus(inputs, years, strict);
    std::vector<ScoredArticle> scores;
    std::vector<Article> batch;
    constexpr size_t kBatchSize = 2048;
    auto flush = [&] {
        std::vector<std::string> texts;
        texts.reserve(batch.size());
        for (const auto& article : batch) texts.push_back(article.text());
        const auto batch_scores = score_batch(texts, *lexicon, threads);
        for (size_t i = 0; i < batch.size(); ++i) {
            scores.push_back({std::move(batch[i].id), batch[i].date.year, batch_scores[i]});
        }
        batch.clear();
    };
    while (auto article = corpus.next()) {
        batch.push_back(std::move(*article));
        if (batch.size() >= kBatchSize) flush();
    }
    flush();

    ensure_parent_dir(out);
    write_scores_csv(out, scores);
    const CorpusStats& stats = corpus.stats();
    log_line("score: scored " + std::to_string(stats.records_kept) + " of " +
             std::to_string(stats.records_read) + " records (" +
             std::to_string(stats.records_skipped) + " skipped, " +
             std::to_string(stats.duplicate_ids) + " duplicate ids) -> " + out);
    write_run_config(output_dir_of(out), reader);
}

void run_tag(const Options& options) {
    OptionReader reader(options, "tag");
    const auto inputs = reader.get_multi("input");
    const std::string out = reader.require("out");
    const std::string gazetteer_path = reader.get("gazetteer", "");
    const YearRange years = read_years(reader);
    const bool strict = reader.get_flag("strict", false);
    reader.finish();
    if (inputs.empty()) throw UsageError("tag: at least one --input corpus file is required");

    const Gazetteer gazetteer =
        gazetteer_path.empty() ? Gazetteer::builtin() : Gazetteer::load(gazetteer_path);

    std::vector<TagRecord> tags;
    uint64_t tagged_articles = 0;
    const CorpusStats stats = for_each_article(inputs, years, strict, [&](const Article& article) {
        auto states = gazetteer.tag_text(article.text());
        if (!states.empty()) ++tagged_articles;
        for (auto& state : states) tags.push_back({article.id, std::move(state)});
    });

    ensure_parent_dir(out);
    write_tags_csv(out, tags);
    log_line("tag: " + std::to_string(tags.size()) + " state tags on " +
             std::to_string(tagged_articles) + " of " + std::to_string(stats.records_kept) +
             " articles -> " + out);
    write_run_config(output_dir_of(out), reader);
}

void run_ingest_census(const Options& options) {
    OptionReader reader(options, "ingest-census");
    const std::string dir = reader.require("dir");
    const std::string out = reader.require("out");
    const YearRange years = read_years(reader);
    reader.finish();

    const FlowTable table = ingest_census_dir(dir, years);
    ensure_parent_dir(out);
    write_flows_csv(out, table.flows);
    log_line("ingest-census: kept " + std::to_string(table.stats.flows_kept) + " of " +
             std::to_string(table.stats.rows_read) + " rows (" +
             std::to_string(table.stats.non_state_rows) + " non-state, " +
             std::to_string(table.stats.self_flow_rows) + " self flows) -> " + out);
    write_run_config(output_dir_of(out), reader);
}

void run_build_dataset(const Options& options) {
    OptionReader reader(options, "build-dataset");
    const std::string scores_path = reader.require("scores");
    const std::string tags_path = reader.require("tags");
    const std::string out = reader.require("out");
    const YearRange years = read_years(reader);
    const DatasetMode mode = mode_from_name(reader.get("mode", "vector"));
    const std::string census_dir = reader.get("census-dir", "");
    const std::string flows_path = reader.get("flows", "");
    const bool net_flows = reader.get_flag("net-flows", false);
    const bool allow_missing = reader.get_flag("allow-missing", false);
    const std::string grid_out = reader.get("grid-out", "");
    reader.finish();
    if (census_dir.empty() == flows_path.empty()) {
        throw UsageError("build-dataset: exactly one of --census-dir and --flows is required");
    }
    if (mode == DatasetMode::Pairwise && (net_flows || allow_missing)) {
        throw UsageError(
            "build-dataset: --net-flows and --allow-missing only apply to vector mode");
    }

    const auto scores = read_scores_csv(scores_path);
    const auto tags = read_tags_csv(tags_path);
    const SentimentGrid grid = aggregate_state_year(scores, tags, years);
    const std::vector<MigrationFlow> flows = census_dir.empty()
                                                 ? read_flows_csv(flows_path)
                                                 : ingest_census_dir(census_dir, years).flows;

    ensure_parent_dir(out);
    if (!grid_out.empty()) {
        ensure_parent_dir(grid_out);
        write_grid_csv(grid_out, grid);
    }
    const std::string span = std::to_string(years.start) + ":" + std::to_string(years.end);
    if (mode == DatasetMode::Pairwise) {
        const PairwiseDataset dataset = build_pairwise_dataset(grid, flows);
        write_pairwise_csv(out, dataset);
        log_line("build-dataset: " + std::to_string(dataset.rows.size()) + " pairwise rows over " +
                 span + " (" + std::to_string(dataset.dropped_flows) +
                 " flows outside the grid) -> " + out);
    } else {
        const auto rows = build_vector_dataset(grid, flows, net_flows, allow_missing);
        write_vector_csv(out, rows);
        log_line("build-dataset: " + std::to_string(rows.size()) + " vector rows over " + span +
                 " from " + std::to_string(grid.cells.size()) + " grid cells -> " + out);
    }
    write_run_config(output_dir_of(out), reader);
}

void run_train(const Options& options) {
    OptionReader reader(options, "train");
    const std::string dataset_path = reader.require("dataset");
    const std::string out = reader.require("out");
    const DatasetMode mode = mode_from_name(reader.require("mode"));
    const ModelKind kind = kind_from_name(reader.get("model", "network"));

    NetworkConfig config;
    config.mode = mode;
    const char* default_layers = mode == DatasetMode::Vector ? "50,64,64,50" : "1,16,16,1";
    config.layer_sizes = parse_layer_list("train", reader.get("layers", default_layers));
    config.activation = activation_from_name(reader.get("activation", "relu"));
    config.loss = loss_from_name(reader.get("loss", "mse"));
    config.optimizer = optimizer_from_name(reader.get("optimizer", "adam"));
    config.epochs = static_cast<int>(reader.get_int("epochs", 2000));
    config.learning_rate = reader.get_double("lr", 1e-3);
    config.seed = reader.get_u64("seed", 42);
    config.split_fraction = reader.get_double("split", 0.8);
    reader.finish();
    config.validate();

    const int width = mode == DatasetMode::Vector ? kStateCount : 1;
    if (kind == ModelKind::Network &&
        (config.layer_sizes.front() != width || config.layer_sizes.back() != width)) {
        throw UsageError("train: --layers must start and end at " + std::to_string(width) +
                         " in " + std::string(mode_name(mode)) + " mode");
    }

    const std::string fingerprint = sha256_file_hex(dataset_path);
    ModelCheckpoint ckpt;
    size_t total_rows = 0;
    size_t used_rows = 0;
    if (mode == DatasetMode::Pairwise) {
        const auto rows = read_pairwise_csv(dataset_path).rows;
        const SplitResult split = split_dataset(rows.size(), config.split_fraction, config.seed);
        std::vector<PairwiseRow> train;
        train.reserve(split.train.size());
        for (size_t idx : split.train) train.push_back(rows[idx]);
        total_rows = rows.size();
        used_rows = train.size();
        ckpt = kind == ModelKind::Logistic
                   ? fit_logistic_baseline(train, config, fingerprint)
                   : train_network(training_data_from_pairwise(train), config, fingerprint);
    } else {
        if (kind == ModelKind::Logistic) {
            throw UsageError("train: the logistic baseline requires --mode pairwise");
        }
        const auto rows = read_vector_csv(dataset_path);
        const SplitResult split = split_dataset(rows.size(), config.split_fraction, config.seed);
        std::vector<VectorRow> train;
        train.reserve(split.train.size());
        for (size_t idx : split.train) train.push_back(rows[idx]);
        total_rows = rows.size();
        used_rows = train.size();
        ckpt = train_network(training_data_from_vector_rows(train), config, fingerprint);
    }

    ensure_parent_dir(out);
    save_checkpoint(ckpt, out);
    log_line("train: " + std::string(kind_name(kind)) + " on " + std::to_string(used_rows) +
             " of " + std::to_string(total_rows) + " rows, " + std::to_string(config.epochs) +
             " epochs, loss " + format_double(ckpt.loss_trace.front()) + " -> " +
             format_double(ckpt.loss_trace.back()) + ", wrote " + out);
    write_run_config(output_dir_of(out), reader);
}

void run_predict(const Options& options) {
    OptionReader reader(options, "predict");
    const std::string ckpt_path = reader.require("ckpt");
    const std::string input = reader.require("input");
    const std::string out = reader.require("out");
    const bool clamp = reader.get_flag("clamp-nonnegative", false);
    reader.finish();

    const ModelCheckpoint ckpt = load_checkpoint(ckpt_path);
    std::vector<std::string> labels;
    Matrix x;
    if (ckpt.config.mode == DatasetMode::Pairwise) {
        const auto rows = read_pairwise_csv(input).rows;
        if (rows.empty()) throw DataError("predict: " + input + " has no rows");
        x = training_data_from_pairwise(rows).x;
        labels.reserve(rows.size());
        for (const auto& row : rows) {
            labels.push_back(pair_label(row.origin, row.destination, row.year));
        }
    } else {
        const auto rows = read_vector_csv(input);
        if (rows.empty()) throw DataError("predict: " + input + " has no rows");
        x = training_data_from_vector_rows(rows).x;
        labels.reserve(rows.size() * kStateCount);
        for (const auto& row : rows) {
            for (int s = 0; s < kStateCount; ++s) labels.push_back(cell_label(s, row.year));
        }
    }

    const Matrix pred = predict(ckpt, x, clamp);
    ensure_parent_dir(out);
    CsvWriter writer(out);
    writer.write_row({"label", "predicted"});
    size_t label_index = 0;
    for (size_t i = 0; i < pred.rows; ++i) {
        for (size_t j = 0; j < pred.cols; ++j) {
            writer.write_row({labels[label_index++], format_double(pred.at(i, j))});
        }
    }
    writer.close();
    log_line("predict: " + std::to_string(labels.size()) + " predictions (" +
             (clamp ? "clamped to >= 0" : "unclamped") + ") -> " + out);
    write_run_config(output_dir_of(out), reader);
}

void run_evaluate(const Options& options) {
    OptionReader reader(options, "evaluate");
    const std::string ckpt_path = reader.require("ckpt");
    EvalSpec spec;
    spec.dataset = reader.require("dataset");
    spec.out_dir = reader.require("out-dir");
    const ModelCheckpoint ckpt = load_checkpoint(ckpt_path);
    spec.fraction = reader.get_double("split", ckpt.config.split_fraction);
    spec.seed = reader.get_u64("seed", ckpt.config.seed);
    spec.by_year = read_split_by_year(reader);
    spec.flows = reader.get("flows", "");
    reader.finish();

    evaluate_checkpoint(ckpt, spec);
    write_run_config(spec.out_dir, reader);
}

void run_report(const Options& options) {
    OptionReader reader(options, "report");
    const std::string ckpt_path = reader.require("ckpt");
    const std::string out_dir = reader.require("out-dir");
    const ModelCheckpoint ckpt = load_checkpoint(ckpt_path);
    EvalSpec spec;
    spec.dataset = reader.get("dataset", "");
    spec.out_dir = out_dir;
    spec.fraction = reader.get_double("split", ckpt.config.split_fraction);
    spec.seed = reader.get_u64("seed", ckpt.config.seed);
    spec.by_year = read_split_by_year(reader);
    spec.flows = reader.get("flows", "");
    reader.finish();

    ensure_dir(out_dir);
    export_loss_curve(ckpt.loss_trace, join_path(out_dir, "loss_curve.csv"),
                      join_path(out_dir, "loss_curve.svg"));
    log_line("report: loss curve over " + std::to_string(ckpt.loss_trace.size()) +
             " epochs -> " + join_path(out_dir, "loss_curve.csv"));
    if (!spec.dataset.empty()) evaluate_checkpoint(ckpt, spec);
    write_run_config(out_dir, reader);
}

void run_generate_fixture(const Options& options) {
    OptionReader reader(options, "generate-fixture");
    FixtureConfig config;
    config.out_dir = reader.require("out-dir");
    config.seed = reader.get_u64("seed", 7);
    config.years = read_years(reader);
    config.articles_per_cell = static_cast<int>(reader.get_int("articles-per-cell", 6));
    config.base_flow = reader.get_double("base-flow", 10000.0);
    config.gain = reader.get_double("gain", 4000.0);
    config.noise_sigma = reader.get_double("noise-sigma", 150.0);
    reader.finish();

    const FixtureSummary summary = generate_synthetic_fixture(config, bundled_lexicon());
    log_line("generate-fixture: " + std::to_string(summary.articles_written) + " articles, " +
             std::to_string(summary.flow_rows_written) + " flow rows (templates score " +
             format_double(summary.positive_compound) + " / " +
             format_double(summary.negative_compound) + ") -> " + config.out_dir);
    write_run_config(config.out_dir, reader);
}

void run_pipeline(const Options& options) {
    OptionReader reader(options, "pipeline");
    const auto inputs = reader.get_multi("input");
    const std::string census_dir = reader.require("census-dir");
    const std::string out_dir = reader.require("out-dir");
    const std::string years = reader.get("years", "2010:2019");
    const std::string mode = reader.get("mode", "vector");
    const std::string lexicon = reader.get("lexicon", "");
    const std::string gazetteer = reader.get("gazetteer", "");
    const bool strict = reader.get_flag("strict", false);
    const std::string threads = std::to_string(read_threads(reader));
    const std::string model = reader.get("model", "network");
    const DatasetMode parsed_mode = mode_from_name(mode);
    const char* default_layers =
        parsed_mode == DatasetMode::Vector ? "50,64,64,50" : "1,16,16,1";
    const std::string layers = reader.get("layers", default_layers);
    const std::string activation = reader.get("activation", "relu");
    const std::string loss = reader.get("loss", "mse");
    const std::string optimizer = reader.get("optimizer", "adam");
    const std::string epochs = reader.get("epochs", "2000");
    const std::string lr = reader.get("lr", "1e-3");
    const std::string seed = reader.get("seed", "42");
    const std::string split = reader.get("split", "0.8");
    const std::string split_by = reader.get("split-by", "row");
    const bool net_flows = reader.get_flag("net-flows", false);
    const bool allow_missing = reader.get_flag("allow-missing", false);
    reader.finish();
    if (inputs.empty()) {
        throw UsageError("pipeline: at least one --input corpus file is required");
    }
    parse_year_range(years);
    ensure_dir(out_dir);

    log_line("pipeline: [1/7] score");
    Options score;
    for (const auto& input : inputs) score.set("input", input);
    score.set("out", join_path(out_dir, "scores.csv"));
    score.set("lexicon", lexicon);
    score.set("years", years);
    score.set("strict", flag_text(strict));
    score.set("threads", threads);
    run_score(score);

    log_line("pipeline: [2/7] tag");
    Options tag;
    for (const auto& input : inputs) tag.set("input", input);
    tag.set("out", join_path(out_dir, "tags.csv"));
    tag.set("gazetteer", gazetteer);
    tag.set("years", years);
    tag.set("strict", flag_text(strict));
    run_tag(tag);

    log_line("pipeline: [3/7] ingest-census");
    Options ingest;
    ingest.set("dir", census_dir);
    ingest.set("out", join_path(out_dir, "flows.csv"));
    ingest.set("years", years);
    run_ingest_census(ingest);

    log_line("pipeline: [4/7] build-dataset");
    Options build;
    build.set("scores", join_path(out_dir, "scores.csv"));
    build.set("tags", join_path(out_dir, "tags.csv"));
    build.set("flows", join_path(out_dir, "flows.csv"));
    build.set("out", join_path(out_dir, "dataset.csv"));
    build.set("grid-out", join_path(out_dir, "grid.csv"));
    build.set("years", years);
    build.set("mode", mode);
    build.set("net-flows", flag_text(net_flows));
    build.set("allow-missing", flag_text(allow_missing));
    run_build_dataset(build);

    log_line("pipeline: [5/7] train");
    Options train;
    train.set("dataset", join_path(out_dir, "dataset.csv"));
    train.set("out", join_path(out_dir, "checkpoint.json"));
    train.set("mode", mode);
    train.set("model", model);
    train.set("layers", layers);
    train.set("activation", activation);
    train.set("loss", loss);
    train.set("optimizer", optimizer);
    train.set("epochs", epochs);
    train.set("lr", lr);
    train.set("seed", seed);
    train.set("split", split);
    run_train(train);

    log_line("pipeline: [6/7] evaluate");
    Options evaluate;
    evaluate.set("ckpt", join_path(out_dir, "checkpoint.json"));
    evaluate.set("dataset", join_path(out_dir, "dataset.csv"));
    evaluate.set("out-dir", out_dir);
    evaluate.set("flows", join_path(out_dir, "flows.csv"));
    evaluate.set("split", split);
    evaluate.set("seed", seed);
    evaluate.set("split-by", split_by);
    run_evaluate(evaluate);

    log_line("pipeline: [7/7] report");
    Options report;
    report.set("ckpt", join_path(out_dir, "checkpoint.json"));
    report.set("out-dir", out_dir);
    run_report(report);

    write_run_config(out_dir, reader);
    log_line("pipeline: complete -> " + out_dir);
}

const std::vector<std::string>& stage_names() {
    static const std::vector<std::string> names = {
        "score",   "tag",     "ingest-census", "build-dataset",    "train",
        "predict", "evaluate", "report",        "generate-fixture", "pipeline"};
    return names;
}

void run_stage(const std::string& stage, const Options& options) {
    if (stage == "score") return run_score(options);
    if (stage == "tag") return run_tag(options);
    if (stage == "ingest-census") return run_ingest_census(options);
    if (stage == "build-dataset") return run_build_dataset(options);
    if (stage == "train") return run_train(options);
    if (stage == "predict") return run_predict(options);
    if (stage == "evaluate") return run_evaluate(options);
    if (stage == "report") return run_report(options);
    if (stage == "generate-fixture") return run_generate_fixture(options);
    if (stage == "pipeline") return run_pipeline(options);
    throw UsageError("unknown stage '" + stage + "'");
}

} // namespace pressflow
