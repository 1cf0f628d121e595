#include "fixture.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "csv.hpp"
#include "error.hpp"
#include "rng.hpp"
#include "states.hpp"
#include "text.hpp"

namespace pressflow {

namespace {

constexpr const char* kPositiveTemplate =
    "Jobs growth brings hope and prosperity to {STATE}.";
constexpr const char* kNegativeTemplate =
    "Drought and unemployment deepen the crisis in {STATE}.";
// no state mention, no lexicon words: exercises the untagged path
constexpr const char* kNationalTemplate =
    "Commodity prices drift sideways in a quiet week for markets.";
constexpr int kNationalPerYear = 2;

std::string fill_template(const char* tmpl, const std::string& state) {
    std::string out(tmpl);
    const std::string placeholder = "{STATE}";
    const size_t pos = out.find(placeholder);
    out.replace(pos, placeholder.size(), state);
    return out;
}

void validate(const FixtureConfig& config) {
    if (config.out_dir.empty()) throw UsageError("fixture out_dir is empty");
    if (config.years.start > config.years.end) {
        throw UsageError("fixture year range is reversed");
    }
    if (config.articles_per_cell < 2 || config.articles_per_cell > 40) {
        throw UsageError("articles_per_cell must be in [2, 40], got " +
                         std::to_string(config.articles_per_cell));
    }
    if (config.base_flow < 0 || config.noise_sigma < 0) {
        throw UsageError("fixture base flow and noise sigma must be non-negative");
    }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    return out;
}

} // namespace

FixtureSummary generate_synthetic_fixture(const FixtureConfig& config, const Lexicon& lexicon) {
    validate(config);
    std::error_code ec;
    std::filesystem::create_directories(config.out_dir, ec);
    if (ec) throw IoError("cannot create fixture directory " + config.out_dir);

    const auto& states = canonical_states();
    const int n_years = config.years.count();
    const int k = config.articles_per_cell;

    FixtureSummary summary;
    summary.positive_compound =
        score_text(fill_template(kPositiveTemplate, states[0]), lexicon).compound;
    summary.negative_compound =
        score_text(fill_template(kNegativeTemplate, states[0]), lexicon).compound;

    // planted positive-article counts and the resulting expected means
    Rng plant_rng(derive_seed(config.seed, "plant"));
    std::vector<std::vector<int>> n_pos(static_cast<size_t>(n_years),
                                        std::vector<int>(kStateCount));
    std::vector<std::vector<double>> mean(static_cast<size_t>(n_years),
                                          std::vector<double>(kStateCount));
    for (int y = 0; y < n_years; ++y) {
        for (int s = 0; s < kStateCount; ++s) {
            const double p = plant_rng.uniform(0.1, 0.9);
            const int positives = static_cast<int>(std::lround(p * k));
            n_pos[y][s] = positives;
            mean[y][s] = (positives * summary.positive_compound +
                          (k - positives) * summary.negative_compound) /
                         static_cast<double>(k);
        }
    }

    const std::string articles_path =
        (std::filesystem::path(config.out_dir) / "articles.ndjson").string();
    {
        std::ofstream out = open_out(articles_path);
        for (int y = 0; y < n_years; ++y) {
            const int year = config.years.start + y;
            for (int s = 0; s < kStateCount; ++s) {
                for (int i = 0; i < k; ++i) {
                    const bool positive = i < n_pos[y][s];
                    nlohmann::ordered_json j;
                    j["id"] = "syn-" + state_column_label(s) + "-" + std::to_string(year) +
                              "-" + std::to_string(i);
                    j["pub_date"] = std::to_string(year) + "-06-" +
                                    (i + 1 < 10 ? "0" : "") + std::to_string(i + 1);
                    j["headline"] = fill_template(
                        positive ? kPositiveTemplate : kNegativeTemplate, states[s]);
                    j["abstract"] = "";
                    j["keywords"] = nlohmann::json::array();
                    out << j.dump() << '\n';
                    ++summary.articles_written;
                }
            }
            for (int i = 0; i < kNationalPerYear; ++i) {
                nlohmann::ordered_json j;
                j["id"] = "syn-national-" + std::to_string(year) + "-" + std::to_string(i);
                j["pub_date"] = std::to_string(year) + "-07-0" + std::to_string(i + 1);
                j["headline"] = kNationalTemplate;
                j["abstract"] = "";
                j["keywords"] = nlohmann::json::array();
                out << j.dump() << '\n';
                ++summary.articles_written;
            }
        }
        out.flush();
        if (!out.good()) throw IoError("write failed for " + articles_path);
    }

    Rng noise_rng(derive_seed(config.seed, "noise"));
    for (int y = 0; y < n_years; ++y) {
        const int year = config.years.start + y;
        const std::string flows_path =
            (std::filesystem::path(config.out_dir) / ("flows_" + std::to_string(year) + ".csv"))
                .string();
        CsvWriter writer(flows_path);
        writer.write_row({"origin", "destination", "estimate", "moe"});
        for (int o = 0; o < kStateCount; ++o) {
            for (int d = 0; d < kStateCount; ++d) {
                if (o == d) continue;
                const double raw = config.base_flow + config.gain * (mean[y][d] - mean[y][o]) +
                                   config.noise_sigma * noise_rng.normal();
                const long long flow = std::max(0LL, std::llround(raw));
                const long long moe = std::llround(90.0 + noise_rng.uniform(0.0, 60.0));
                writer.write_row({states[o], states[d], std::to_string(flow),
                                  std::to_string(moe)});
                ++summary.flow_rows_written;
            }
        }
        writer.close();
    }

    nlohmann::ordered_json manifest;
    manifest["seed"] = config.seed;
    manifest["years"] = {{"start", config.years.start}, {"end", config.years.end}};
    manifest["articles_per_cell"] = k;
    manifest["national_articles_per_year"] = kNationalPerYear;
    manifest["base_flow"] = config.base_flow;
    manifest["gain"] = config.gain;
    manifest["noise_sigma"] = config.noise_sigma;
    manifest["templates"] = {{"positive", kPositiveTemplate},
                             {"negative", kNegativeTemplate},
                             {"national", kNationalTemplate}};
    manifest["template_compounds"] = {{"positive", summary.positive_compound},
                                      {"negative", summary.negative_compound}};
    nlohmann::ordered_json planted = nlohmann::json::array();
    for (int y = 0; y < n_years; ++y) {
        for (int s = 0; s < kStateCount; ++s) {
            planted.push_back({{"state", state_column_label(s)},
                               {"year", config.years.start + y},
                               {"positive_articles", n_pos[y][s]},
                               {"expected_mean_compound", mean[y][s]}});
        }
    }
    manifest["planted"] = std::move(planted);

    const std::string manifest_path =
        (std::filesystem::path(config.out_dir) / "manifest.json").string();
    std::ofstream out = open_out(manifest_path);
    out << manifest.dump(2) << '\n';
    out.flush();
    if (!out.good()) throw IoError("write failed for " + manifest_path);
    return summary;
}

} // namespace pressflow
