#include <doctest.h>

#include <algorithm>

#include "core/states.hpp"

using namespace pressflow;

TEST_CASE("canonical list holds the fifty states in order") {
    const auto& names = canonical_states();
    REQUIRE(names.size() == kStateCount);
    CHECK(names.front() == "Alabama");
    CHECK(names.back() == "Wyoming");
    CHECK(std::is_sorted(names.begin(), names.end()));
    CHECK(std::adjacent_find(names.begin(), names.end()) == names.end());
}

TEST_CASE("index lookups") {
    REQUIRE(state_index("Alabama").has_value());
    CHECK(*state_index("Alabama") == 0);
    CHECK(*state_index("Wyoming") == 49);
    CHECK_FALSE(state_index("District of Columbia").has_value());
    CHECK(state_index_ci("nEw YoRk") == state_index("New York"));
    CHECK_FALSE(state_index_ci("puerto rico").has_value());
}

TEST_CASE("column labels are lowercase snake case") {
    CHECK(state_column_label(*state_index("New Hampshire")) == "new_hampshire");
    CHECK(state_column_label(*state_index("Iowa")) == "iowa");
    CHECK(state_column_label(*state_index("Rhode Island")) == "rhode_island");
}
