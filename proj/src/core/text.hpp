#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pressflow {

// ASCII-only case helpers. Bytes >= 0x80 are passed through untouched, which
// matches Python's behavior for uncased symbols; non-ASCII letters differ and
// are out of scope for the bundled fixtures.
char ascii_lower(char c);
std::string to_lower_ascii(std::string_view s);
bool iequals_ascii(std::string_view a, std::string_view b);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
// Split on runs of whitespace, like Python str.split() with no argument.
std::vector<std::string> split_whitespace(std::string_view s);

bool starts_with(std::string_view s, std::string_view prefix);
bool ends_with(std::string_view s, std::string_view suffix);

// Shortest decimal that round-trips an IEEE double (17 significant digits),
// "C" locale. Used everywhere a float lands in a file.
std::string format_double(double v);
// Strict full-string parses; throw nothing, report via bool.
bool parse_double(std::string_view s, double& out);
bool parse_int64(std::string_view s, long long& out);

} // namespace pressflow
