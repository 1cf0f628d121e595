#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace pressflow {

// Ordered key=value option bag feeding the pipeline stages. set() appends;
// for single-valued keys the last occurrence wins, so config-file values can
// be overridden by appending flag values after them. Multi-valued keys
// (e.g. `input`) keep every occurrence in order.
class Options {
public:
    void set(std::string key, std::string value) {
        entries_.emplace_back(std::move(key), std::move(value));
    }
    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

// key=value per line, '#' comments and blank lines skipped, whitespace
// trimmed around both sides. The value may be empty and may contain '='.
// Throws UsageError with the line number on anything else, IoError if the
// file cannot be read. Every stage writes its resolved configuration in this
// format, so a run can be reproduced from its own output directory.
Options parse_config_file(const std::string& path);

// Typed reads over an Options bag with unknown-key rejection. Each getter
// consumes its key (all occurrences) and records the resolved value, default
// or not, so the effective configuration can be echoed. finish() throws
// UsageError naming the stage for any key never consumed.
class OptionReader {
public:
    OptionReader(const Options& options, std::string stage);

    bool has(const std::string& key) const;
    std::string require(const std::string& key);
    std::string get(const std::string& key, const std::string& fallback);
    long long get_int(const std::string& key, long long fallback);
    double get_double(const std::string& key, double fallback);
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback);
    bool get_flag(const std::string& key, bool fallback);
    // All occurrences, first to last; empty when the key is absent.
    std::vector<std::string> get_multi(const std::string& key);
    void finish();

    const std::string& stage() const { return stage_; }
    // Consumed keys with their effective values, sorted by key (multi-valued
    // keys keep their relative order). Parses back via parse_config_file.
    std::vector<std::pair<std::string, std::string>> resolved() const;

private:
    std::string last_value(const std::string& key) const;
    void mark_consumed(const std::string& key);

    const Options& options_;
    std::string stage_;
    std::vector<std::string> consumed_;
    std::vector<std::pair<std::string, std::string>> resolved_;
};

// Writes <dir>/run_config_<stage>.txt with the reader's resolved entries.
// Feeding that file back through --config reproduces the run bit for bit.
void write_run_config(const std::string& dir, const OptionReader& reader);

// Stages. Each validates its options (UsageError), performs the work
// (DataError / IoError on bad inputs), logs a one-line summary, and echoes
// its resolved configuration next to its outputs.
void run_score(const Options& options);
void run_tag(const Options& options);
void run_ingest_census(const Options& options);
void run_build_dataset(const Options& options);
void run_train(const Options& options);
void run_predict(const Options& options);
void run_evaluate(const Options& options);
void run_report(const Options& options);
void run_generate_fixture(const Options& options);
// Runs score, tag, ingest-census, build-dataset, train, evaluate and report
// in order against fixed file names inside out-dir; each sub-stage receives
// an options bag the user could have passed by hand, so a pipeline run and
// the equivalent stage-by-stage runs produce identical bytes.
void run_pipeline(const Options& options);

// Dispatch by stage name (the CLI subcommand names, e.g. "ingest-census").
// Unknown names throw UsageError.
void run_stage(const std::string& stage, const Options& options);
const std::vector<std::string>& stage_names();

} // namespace pressflow
