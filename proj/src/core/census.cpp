#include "census.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <set>
#include <tuple>

#include "csv.hpp"
#include "error.hpp"
#include "states.hpp"
#include "text.hpp"

namespace pressflow {
namespace {

// Geographies that legitimately appear in census flow tables but fall outside
// the 50-state vector space. Compared case-insensitively after trimming.
bool is_non_state_geography(std::string_view name) {
    static const std::array<std::string_view, 16> known = {
        "district of columbia", "d.c.", "dc", "washington, d.c.",
        "puerto rico", "guam", "virgin islands", "u.s. virgin islands",
        "american samoa", "northern mariana islands",
        "abroad", "foreign country", "foreign", "u.s. island area",
        "u.s. island areas", "total",
    };
    const std::string lowered = to_lower_ascii(trim(name));
    return std::find(known.begin(), known.end(), lowered) != known.end();
}

size_t require_column(const std::vector<std::string>& header, std::string_view name,
                      const std::string& path) {
    for (size_t i = 0; i < header.size(); ++i) {
        if (to_lower_ascii(trim(header[i])) == name) return i;
    }
    std::string dump;
    for (size_t i = 0; i < header.size(); ++i) {
        if (i > 0) dump += ",";
        dump += header[i];
    }
    throw DataError("flow table " + path + ": header lacks column '" + std::string(name) +
                    "' (header: " + dump + ")");
}

double parse_non_negative(const std::string& field, const char* what, const std::string& path,
                          size_t line) {
    double value = 0;
    if (!parse_double(trim(field), value)) {
        throw DataError("flow table " + path + ":" + std::to_string(line) + ": bad " + what +
                        " '" + field + "'");
    }
    if (value < 0) {
        throw DataError("flow table " + path + ":" + std::to_string(line) + ": negative " +
                        what + " '" + field + "'");
    }
    return value;
}

} // namespace

FlowTable parse_flow_table(const std::string& path, int year) {
    CsvReader reader(path);
    std::vector<std::string> header;
    if (!reader.next_row(header)) {
        throw DataError("flow table " + path + ": empty file");
    }
    const size_t origin_col = require_column(header, "origin", path);
    const size_t dest_col = require_column(header, "destination", path);
    const size_t estimate_col = require_column(header, "estimate", path);
    const size_t moe_col = require_column(header, "moe", path);
    const size_t width = std::max({origin_col, dest_col, estimate_col, moe_col}) + 1;

    FlowTable table;
    std::set<std::pair<int, int>> seen;
    std::vector<std::string> row;
    while (reader.next_row(row)) {
        ++table.stats.rows_read;
        const size_t line = reader.line_number();
        if (row.size() < width) {
            throw DataError("flow table " + path + ":" + std::to_string(line) +
                            ": expected at least " + std::to_string(width) + " fields, got " +
                            std::to_string(row.size()));
        }

        const std::string origin_name(trim(row[origin_col]));
        const std::string dest_name(trim(row[dest_col]));
        if (is_non_state_geography(origin_name) || is_non_state_geography(dest_name)) {
            ++table.stats.non_state_rows;
            continue;
        }
        const auto origin = state_index_ci(origin_name);
        if (!origin) {
            throw DataError("flow table " + path + ":" + std::to_string(line) +
                            ": unknown origin geography '" + origin_name + "'");
        }
        const auto dest = state_index_ci(dest_name);
        if (!dest) {
            throw DataError("flow table " + path + ":" + std::to_string(line) +
                            ": unknown destination geography '" + dest_name + "'");
        }
        if (*origin == *dest) {
            ++table.stats.self_flow_rows;
            continue;
        }

        MigrationFlow flow;
        flow.origin = *origin;
        flow.destination = *dest;
        flow.year = year;
        flow.estimate = parse_non_negative(row[estimate_col], "estimate", path, line);
        flow.moe = parse_non_negative(row[moe_col], "moe", path, line);

        if (!seen.emplace(flow.origin, flow.destination).second) {
            throw DataError("flow table " + path + ":" + std::to_string(line) +
                            ": duplicate flow " + canonical_states()[flow.origin] + " -> " +
                            canonical_states()[flow.destination]);
        }
        table.flows.push_back(flow);
        ++table.stats.flows_kept;
    }

    std::sort(table.flows.begin(), table.flows.end(), [](const auto& a, const auto& b) {
        return std::tie(a.origin, a.destination) < std::tie(b.origin, b.destination);
    });
    return table;
}

FlowTable ingest_census_dir(const std::string& dir, YearRange years) {
    FlowTable combined;
    for (int year = years.start; year <= years.end; ++year) {
        const std::string path =
            (std::filesystem::path(dir) / ("flows_" + std::to_string(year) + ".csv")).string();
        if (!std::filesystem::exists(path)) {
            throw IoError("missing flow table for year " + std::to_string(year) + ": " + path);
        }
        FlowTable one = parse_flow_table(path, year);
        combined.stats.rows_read += one.stats.rows_read;
        combined.stats.flows_kept += one.stats.flows_kept;
        combined.stats.non_state_rows += one.stats.non_state_rows;
        combined.stats.self_flow_rows += one.stats.self_flow_rows;
        combined.flows.insert(combined.flows.end(), one.flows.begin(), one.flows.end());
    }
    return combined;
}

void write_flows_csv(const std::string& path, const std::vector<MigrationFlow>& flows) {
    CsvWriter w(path);
    w.write_row({"year", "origin", "destination", "estimate", "moe"});
    const auto& states = canonical_states();
    for (const MigrationFlow& f : flows) {
        w.write_row({std::to_string(f.year), states[static_cast<size_t>(f.origin)],
                     states[static_cast<size_t>(f.destination)], format_double(f.estimate),
                     format_double(f.moe)});
    }
    w.close();
}

std::vector<MigrationFlow> read_flows_csv(const std::string& path) {
    CsvReader reader(path);
    std::vector<std::string> row;
    if (!reader.next_row(row)) throw DataError(path + ": empty flows file");
    const std::vector<std::string> expected{"year", "origin", "destination", "estimate", "moe"};
    if (row != expected) {
        throw DataError(path + ": unexpected header '" + csv_join(row) + "'");
    }

    std::vector<MigrationFlow> flows;
    std::set<std::tuple<int, int, int>> seen;
    while (reader.next_row(row)) {
        const std::string where = path + " line " + std::to_string(reader.line_number());
        if (row.size() != 5) throw DataError(where + ": expected 5 fields");
        MigrationFlow f;
        long long year = 0;
        if (!parse_int64(row[0], year) || year < 1000 || year > 9999) {
            throw DataError(where + ": bad year '" + row[0] + "'");
        }
        f.year = static_cast<int>(year);
        const auto origin = state_index_ci(row[1]);
        const auto destination = state_index_ci(row[2]);
        if (!origin) throw DataError(where + ": unknown state '" + row[1] + "'");
        if (!destination) throw DataError(where + ": unknown state '" + row[2] + "'");
        f.origin = *origin;
        f.destination = *destination;
        if (f.origin == f.destination) {
            throw DataError(where + ": self flow for " + row[1]);
        }
        if (!parse_double(row[3], f.estimate) || f.estimate < 0 || !std::isfinite(f.estimate)) {
            throw DataError(where + ": bad estimate '" + row[3] + "'");
        }
        if (!parse_double(row[4], f.moe) || f.moe < 0 || !std::isfinite(f.moe)) {
            throw DataError(where + ": bad moe '" + row[4] + "'");
        }
        if (!seen.insert({f.year, f.origin, f.destination}).second) {
            throw DataError(where + ": duplicate flow for " + row[1] + " -> " + row[2] +
                            " in " + row[0]);
        }
        flows.push_back(f);
    }
    return flows;
}

} // namespace pressflow
