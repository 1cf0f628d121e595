#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace pressflow {

// Minimal RFC-4180 style CSV. Fields are quoted only when needed, rows end
// with '\n'; output is byte-stable for identical input.
std::string csv_escape(const std::string& field);
std::string csv_join(const std::vector<std::string>& fields);
// Parses one record; handles quoted fields and doubled quotes. Embedded
// newlines inside quotes are not supported (no writer here emits them).
std::vector<std::string> csv_split(const std::string& line);

class CsvWriter {
public:
    // Throws IoError if the file cannot be created.
    explicit CsvWriter(const std::string& path);
    void write_row(const std::vector<std::string>& fields);
    // Flushes and reports failure as IoError.
    void close();

private:
    std::string path_;
    std::ofstream out_;
};

class CsvReader {
public:
    // Throws IoError if the file cannot be opened.
    explicit CsvReader(const std::string& path);
    // False at end of file. Blank lines are skipped.
    bool next_row(std::vector<std::string>& fields);
    size_t line_number() const { return line_number_; }
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ifstream in_;
    size_t line_number_ = 0;
};

// Convenience: whole file, first row returned separately as the header.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(const std::string& path);

} // namespace pressflow
