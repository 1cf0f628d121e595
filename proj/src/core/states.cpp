#include "core/states.hpp"

#include <unordered_map>

#include "core/text.hpp"

namespace pressflow {

const std::array<std::string, kStateCount>& canonical_states() {
    static const std::array<std::string, kStateCount> names = {
        "Alabama",       "Alaska",        "Arizona",      "Arkansas",      "California",
        "Colorado",      "Connecticut",   "Delaware",     "Florida",       "Georgia",
        "Hawaii",        "Idaho",         "Illinois",     "Indiana",       "Iowa",
        "Kansas",        "Kentucky",      "Louisiana",    "Maine",         "Maryland",
        "Massachusetts", "Michigan",      "Minnesota",    "Mississippi",   "Missouri",
        "Montana",       "Nebraska",      "Nevada",       "New Hampshire", "New Jersey",
        "New Mexico",    "New York",      "North Carolina", "North Dakota", "Ohio",
        "Oklahoma",      "Oregon",        "Pennsylvania", "Rhode Island",  "South Carolina",
        "South Dakota",  "Tennessee",     "Texas",        "Utah",          "Vermont",
        "Virginia",      "Washington",    "West Virginia", "Wisconsin",    "Wyoming"};
    return names;
}

std::optional<int> state_index(std::string_view canonical_name) {
    static const std::unordered_map<std::string_view, int> lookup = [] {
        std::unordered_map<std::string_view, int> m;
        const auto& names = canonical_states();
        for (int i = 0; i < kStateCount; ++i) m.emplace(names[i], i);
        return m;
    }();
    auto it = lookup.find(canonical_name);
    if (it == lookup.end()) return std::nullopt;
    return it->second;
}

std::optional<int> state_index_ci(std::string_view name) {
    static const std::unordered_map<std::string, int> lookup = [] {
        std::unordered_map<std::string, int> m;
        const auto& names = canonical_states();
        for (int i = 0; i < kStateCount; ++i) m.emplace(to_lower_ascii(names[i]), i);
        return m;
    }();
    auto it = lookup.find(to_lower_ascii(name));
    if (it == lookup.end()) return std::nullopt;
    return it->second;
}

std::string state_column_label(int index) {
    std::string label = to_lower_ascii(canonical_states().at(static_cast<size_t>(index)));
    for (char& c : label)
        if (c == ' ') c = '_';
    return label;
}

} // namespace pressflow
