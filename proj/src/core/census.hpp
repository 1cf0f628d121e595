#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "corpus.hpp" // YearRange

namespace pressflow {

struct MigrationFlow {
    int origin = 0;      // canonical state index
    int destination = 0; // canonical state index
    int year = 0;
    double estimate = 0; // migrant count, >= 0
    double moe = 0;      // census margin of error, >= 0
};

struct FlowTableStats {
    uint64_t rows_read = 0;
    uint64_t flows_kept = 0;
    uint64_t non_state_rows = 0; // D.C., territories, abroad, totals
    uint64_t self_flow_rows = 0; // origin == destination
};

struct FlowTable {
    std::vector<MigrationFlow> flows;
    FlowTableStats stats;
};

// Long-format flow CSV for one year: header must name origin, destination,
// estimate and moe columns (any order, extra columns ignored). Rows whose
// origin or destination is a recognized non-state geography are dropped and
// counted; unknown names abort. Negative estimates or margins abort with the
// row number, as do duplicate (origin, destination) pairs. Kept flows are
// returned sorted by (origin, destination).
FlowTable parse_flow_table(const std::string& path, int year);

// Reads flows_<year>.csv from dir for every year in the range; a missing
// year's file aborts (silent gaps would skew every downstream total).
// Combined stats are summed; flows sorted by (year, origin, destination).
FlowTable ingest_census_dir(const std::string& dir, YearRange years);

// Normalized multi-year flow file, the ingest-census stage output:
// year,origin,destination,estimate,moe with canonical state names. The
// reader applies the same validation as parse_flow_table (ranges,
// duplicates, self-flows) but names must already be canonical states.
void write_flows_csv(const std::string& path, const std::vector<MigrationFlow>& flows);
std::vector<MigrationFlow> read_flows_csv(const std::string& path);

} // namespace pressflow
