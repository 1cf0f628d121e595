#include "core/csv.hpp"

#include "core/error.hpp"

namespace pressflow {

std::string csv_escape(const std::string& field) {
    bool needs_quotes = false;
    for (char c : field) {
        if (c == ',' || c == '"' || c == '\n' || c == '\r') {
            needs_quotes = true;
            break;
        }
    }
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::string csv_join(const std::vector<std::string>& fields) {
    std::string out;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += csv_escape(fields[i]);
    }
    return out;
}

std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool in_quotes = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c == '\r' && i + 1 == line.size()) {
            // tolerate CRLF input
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

CsvWriter::CsvWriter(const std::string& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot create file: " + path);
}

void CsvWriter::write_row(const std::vector<std::string>& fields) {
    out_ << csv_join(fields) << '\n';
}

void CsvWriter::close() {
    out_.flush();
    if (!out_) throw IoError("write failed: " + path_);
    out_.close();
}

CsvReader::CsvReader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open file: " + path);
}

bool CsvReader::next_row(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_number_;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        fields = csv_split(line);
        return true;
    }
    return false;
}

CsvTable read_csv(const std::string& path) {
    CsvReader reader(path);
    CsvTable table;
    std::vector<std::string> row;
    if (reader.next_row(row)) table.header = row;
    while (reader.next_row(row)) table.rows.push_back(row);
    return table;
}

} // namespace pressflow
