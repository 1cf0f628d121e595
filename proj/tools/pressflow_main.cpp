#include <CLI11.hpp>

#include <pressflow/pressflow.h>

#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <vector>

// Thin argv adapter over the C API: every subcommand maps 1:1 onto a stage,
// every flag onto an option key. Values land in an ordered bag where later
// entries win, so --config files seed the bag and explicit flags override.

namespace {

struct OptionDef {
    const char* key;
    const char* help;
    bool multi = false;
};

struct FlagDef {
    const char* key;
    const char* help;
};

struct StageDef {
    const char* name;
    const char* description;
    std::vector<OptionDef> options;
    std::vector<FlagDef> flags;
    bool accepts_seed = false;
    bool accepts_threads = false;
};

const std::vector<StageDef>& stage_defs() {
    static const std::vector<StageDef> defs = {
        {"score",
         "Score a news corpus with the bundled VADER-style sentiment engine",
         {{"input", "corpus file (newline-delimited JSON records); repeatable", true},
          {"out", "output CSV: article_id,year,compound,pos,neg,neu"},
          {"lexicon", "lexicon TSV overriding the bundled one"},
          {"years", "publication year range START:END (default 2010:2019)"},
          {"threads", "worker threads for scoring (default 1; output is identical)"}},
         {{"strict", "abort on malformed records instead of skipping them"}},
         false,
         true},
        {"tag",
         "Tag articles with the U.S. states their text mentions",
         {{"input", "corpus file; repeatable", true},
          {"out", "output CSV: article_id,state (one row per match)"},
          {"gazetteer", "JSON gazetteer overriding the built-in names/aliases/exclusions"},
          {"years", "publication year range START:END (default 2010:2019)"}},
         {{"strict", "abort on malformed records instead of skipping them"}},
         false,
         false},
        {"ingest-census",
         "Normalize per-year census flow tables into one flows CSV",
         {{"dir", "directory holding flows_<year>.csv files"},
          {"out", "output CSV: year,origin,destination,estimate,moe"},
          {"years", "year range START:END; every year's file must exist (default 2010:2019)"}},
         {},
         false,
         false},
        {"build-dataset",
         "Join the sentiment grid with migration flows into a training dataset",
         {{"scores", "scores CSV from the score stage"},
          {"tags", "tags CSV from the tag stage"},
          {"out", "output dataset CSV"},
          {"census-dir", "directory of flows_<year>.csv files (alternative to --flows)"},
          {"flows", "normalized flows CSV from ingest-census (alternative to --census-dir)"},
          {"years", "grid year range START:END (default 2010:2019)"},
          {"mode", "dataset shape: vector (one row per year) or pairwise (default vector)"},
          {"grid-out", "also write the state-year sentiment grid CSV here"}},
         {{"net-flows", "vector mode: subtract outbound from inbound totals"},
          {"allow-missing", "vector mode: zero-fill grid gaps instead of aborting"}},
         false,
         false},
        {"train",
         "Train the feedforward network (or logistic baseline) on a dataset",
         {{"dataset", "dataset CSV from build-dataset"},
          {"out", "checkpoint JSON path"},
          {"mode", "dataset shape: vector or pairwise"},
          {"model", "network or logistic (default network; logistic needs pairwise)"},
          {"layers", "comma-separated widths (default 50,64,64,50 vector / 1,16,16,1 pairwise)"},
          {"activation", "relu, tanh or identity (default relu)"},
          {"loss", "mse or mae (default mse)"},
          {"optimizer", "adam or sgd (default adam)"},
          {"epochs", "full-batch epochs (default 2000)"},
          {"lr", "learning rate (default 1e-3)"},
          {"seed", "seed for init and the train/test split (default 42)"},
          {"split", "training fraction, the rest is held out (default 0.8)"}},
         {},
         true,
         false},
        {"predict",
         "Predict every row of a dataset with a trained checkpoint",
         {{"ckpt", "checkpoint JSON from train"},
          {"input", "dataset CSV matching the checkpoint's mode"},
          {"out", "output CSV: label,predicted"}},
         {{"clamp-nonnegative", "clamp predictions at zero (flows cannot be negative)"}},
         false,
         false},
        {"evaluate",
         "Hold out a test split and report MAE against the mean-predictor baseline",
         {{"ckpt", "checkpoint JSON from train"},
          {"dataset", "dataset CSV to split and evaluate on"},
          {"out-dir", "directory for report.json, comparison.csv, comparison.svg"},
          {"split", "training fraction (default: the checkpoint's)"},
          {"seed", "split seed (default: the checkpoint's)"},
          {"split-by", "row or year (default row)"},
          {"flows", "flows CSV for census margin-of-error context"}},
         {},
         true,
         false},
        {"report",
         "Export the loss curve (and optionally the evaluation report trio)",
         {{"ckpt", "checkpoint JSON from train"},
          {"out-dir", "directory for loss_curve.csv/svg"},
          {"dataset", "dataset CSV; when given, also writes the evaluate outputs"},
          {"split", "training fraction (default: the checkpoint's)"},
          {"seed", "split seed (default: the checkpoint's)"},
          {"split-by", "row or year (default row)"},
          {"flows", "flows CSV for census margin-of-error context"}},
         {},
         true,
         false},
        {"generate-fixture",
         "Write a synthetic corpus + flow tables with a planted sentiment signal",
         {{"out-dir", "fixture directory (articles.ndjson, flows_<year>.csv, manifest.json)"},
          {"seed", "generator seed (default 7)"},
          {"years", "year range START:END (default 2010:2019)"},
          {"articles-per-cell", "articles per state-year (default 6)"},
          {"base-flow", "flow baseline (default 10000)"},
          {"gain", "flow per unit sentiment delta; 0 plants no signal (default 4000)"},
          {"noise-sigma", "flow noise standard deviation (default 150)"}},
         {},
         true,
         false},
        {"pipeline",
         "Run score, tag, ingest-census, build-dataset, train, evaluate, report",
         {{"input", "corpus file; repeatable", true},
          {"census-dir", "directory of flows_<year>.csv files"},
          {"out-dir", "directory for every stage artifact"},
          {"years", "year range START:END (default 2010:2019)"},
          {"mode", "dataset shape: vector or pairwise (default vector)"},
          {"lexicon", "lexicon TSV overriding the bundled one"},
          {"gazetteer", "JSON gazetteer overriding the built-in one"},
          {"threads", "worker threads for scoring (default 1)"},
          {"model", "network or logistic (default network)"},
          {"layers", "comma-separated widths (default depends on mode)"},
          {"activation", "relu, tanh or identity (default relu)"},
          {"loss", "mse or mae (default mse)"},
          {"optimizer", "adam or sgd (default adam)"},
          {"epochs", "full-batch epochs (default 2000)"},
          {"lr", "learning rate (default 1e-3)"},
          {"seed", "seed for init and splits (default 42)"},
          {"split", "training fraction (default 0.8)"},
          {"split-by", "row or year (default row)"}},
         {{"strict", "abort on malformed records instead of skipping them"},
          {"net-flows", "vector mode: subtract outbound from inbound totals"},
          {"allow-missing", "vector mode: zero-fill grid gaps instead of aborting"}},
         true,
         true},
    };
    return defs;
}

struct StageCli {
    const StageDef* def = nullptr;
    CLI::App* sub = nullptr;
    std::string config_path;
    std::map<std::string, std::string> singles;
    std::map<std::string, std::vector<std::string>> multis;
    std::map<std::string, bool> flag_values;
};

class OptionsHandle {
public:
    OptionsHandle() : ptr_(pf_options_new()) {}
    ~OptionsHandle() { pf_options_free(ptr_); }
    OptionsHandle(const OptionsHandle&) = delete;
    OptionsHandle& operator=(const OptionsHandle&) = delete;
    pf_options* get() const { return ptr_; }

private:
    pf_options* ptr_;
};

int report_failure(pf_status status) {
    std::fprintf(stderr, "pressflow: error: %s\n", pf_last_error());
    return status == PF_USAGE_ERROR ? 1 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"News-sentiment features for state-to-state migration modeling"};
    app.require_subcommand(0, 1);

    std::string app_config;
    std::string app_seed;
    std::string app_threads;
    bool verbose = false;
    app.add_option("--config", app_config,
                   "key=value config file applied to the chosen subcommand");
    app.add_option("--seed", app_seed, "seed forwarded to stages that take one");
    app.add_option("--threads", app_threads, "thread count forwarded to stages that take one");
    app.add_flag("--verbose", verbose, "log per-stage diagnostics");

    std::vector<std::unique_ptr<StageCli>> stages;
    for (const StageDef& def : stage_defs()) {
        auto stage = std::make_unique<StageCli>();
        stage->def = &def;
        stage->sub = app.add_subcommand(def.name, def.description);
        stage->sub->add_option("--config", stage->config_path,
                               "key=value config file (flags override its values)");
        for (const OptionDef& option : def.options) {
            const std::string name = "--" + std::string(option.key);
            if (option.multi) {
                stage->sub->add_option(name, stage->multis[option.key], option.help);
            } else {
                stage->sub->add_option(name, stage->singles[option.key], option.help)
                    ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
            }
        }
        for (const FlagDef& flag : def.flags) {
            auto& slot = stage->flag_values[flag.key];
            const std::string name = "--" + std::string(flag.key) + ",!--no-" + flag.key;
            stage->sub->add_flag(name, slot, flag.help);
        }
        stages.push_back(std::move(stage));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (verbose) pf_set_verbose(1);

    const StageCli* chosen = nullptr;
    for (const auto& stage : stages) {
        if (stage->sub->parsed()) chosen = stage.get();
    }
    if (chosen == nullptr) {
        std::fprintf(stderr, "pressflow: a subcommand is required; run with --help\n");
        return 1;
    }

    OptionsHandle options;
    if (options.get() == nullptr) {
        std::fprintf(stderr, "pressflow: out of memory\n");
        return 2;
    }
    if (!app_config.empty()) {
        const pf_status st = pf_options_load_file(options.get(), app_config.c_str());
        if (st != PF_OK) return report_failure(st);
    }
    if (!chosen->config_path.empty()) {
        const pf_status st = pf_options_load_file(options.get(), chosen->config_path.c_str());
        if (st != PF_OK) return report_failure(st);
    }
    if (!app_seed.empty() && chosen->def->accepts_seed) {
        pf_options_set(options.get(), "seed", app_seed.c_str());
    }
    if (!app_threads.empty() && chosen->def->accepts_threads) {
        pf_options_set(options.get(), "threads", app_threads.c_str());
    }
    for (const OptionDef& option : chosen->def->options) {
        if (option.multi) {
            for (const std::string& value : chosen->multis.at(option.key)) {
                pf_options_set(options.get(), option.key, value.c_str());
            }
        } else if (chosen->sub->count("--" + std::string(option.key)) > 0) {
            pf_options_set(options.get(), option.key,
                           chosen->singles.at(option.key).c_str());
        }
    }
    for (const FlagDef& flag : chosen->def->flags) {
        if (chosen->sub->count("--" + std::string(flag.key)) > 0) {
            pf_options_set(options.get(), flag.key,
                           chosen->flag_values.at(flag.key) ? "true" : "false");
        }
    }

    const pf_status status = pf_run(chosen->def->name, options.get());
    if (status != PF_OK) return report_failure(status);
    return 0;
}
