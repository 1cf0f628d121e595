#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace pressflow {

inline constexpr int kStateCount = 50;

// The 50 U.S. states in alphabetical order. This ordering is the canonical
// vector ordering used by every 50-wide dataset column and model dimension.
const std::array<std::string, kStateCount>& canonical_states();

// Index into canonical_states(), exact name match.
std::optional<int> state_index(std::string_view canonical_name);

// Case-insensitive match against canonical names.
std::optional<int> state_index_ci(std::string_view name);

// Lowercase snake_case column label, e.g. "new_york".
std::string state_column_label(int index);

} // namespace pressflow
