#pragma once

#include <cstdint>
#include <string>

#include "corpus.hpp"
#include "sentiment.hpp"

namespace pressflow {

// Synthetic end-to-end fixture: templated articles with planted sentiment
// words, and flow tables generated as
//   flow(o -> d) = round(base + gain * (s_d - s_o) + noise)
// where s is the expected mean compound of the cell's articles. gain = 0
// produces the null-signal variant.
struct FixtureConfig {
    std::string out_dir;
    uint64_t seed = 7;
    YearRange years{2010, 2019};
    int articles_per_cell = 6;
    double base_flow = 10000.0;
    double gain = 4000.0;
    double noise_sigma = 150.0;
};

struct FixtureSummary {
    double positive_compound = 0.0; // compound of one positive template article
    double negative_compound = 0.0;
    size_t articles_written = 0;
    size_t flow_rows_written = 0;
};

// Writes articles.ndjson, flows_<year>.csv per year, and manifest.json into
// out_dir (created if absent). Per state-year, round(p * K) of the K articles
// use the positive template (p seeded uniform in [0.1, 0.9]); the planted
// expected mean compound per cell is recorded in the manifest. Deterministic
// per seed, byte for byte.
FixtureSummary generate_synthetic_fixture(const FixtureConfig& config, const Lexicon& lexicon);

} // namespace pressflow
