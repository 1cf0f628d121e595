#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pressflow {

// Rule-based state tagging. A state is tagged when its canonical name or one
// of its aliases occurs in the text as a case-insensitive whole-word phrase,
// unless any exclusion pattern registered for that state also occurs (veto
// dominance: one exclusion hit removes the state no matter how many positive
// mentions exist).
//
// Matching operates on a normalized view of the text: ASCII lowercased, every
// run of non-alphanumeric bytes collapsed to a single space. "Washington,
// D.C." and "washington d.c." therefore normalize to the same phrase. A name
// match whose span lies strictly inside another state's longer match is
// suppressed, so "West Virginia" does not also tag Virginia while "Virginia
// and West Virginia" tags both.
class Gazetteer {
public:
    // Built-in gazetteer: the 50 canonical names, no aliases, exclusion
    // patterns for the Washington (D.C., administration, person, newspaper)
    // and Georgia (country) collisions.
    static Gazetteer builtin();

    // JSON override file with optional sections:
    //   states:     must then hold exactly the 50 canonical names (any order)
    //   aliases:    surface -> canonical, merged over the builtin aliases
    //   exclusions: canonical -> pattern list, replacing that state's builtin
    //               list (an empty list clears it)
    // Unknown canonical names in aliases or exclusions abort.
    static Gazetteer load(const std::string& path);

    // Sorted canonical names of all matched states.
    std::vector<std::string> tag_text(std::string_view text) const;

    size_t state_count() const { return states_.size(); }
    const std::vector<std::string>& states() const { return states_; }

private:
    struct Surface {
        std::string normalized; // normalized phrase to search for
        int state = 0;          // index into states_
    };

    void compile();

    std::vector<std::string> states_; // canonical names, sorted
    std::vector<std::pair<std::string, std::string>> aliases_;            // surface -> canonical
    std::vector<std::pair<std::string, std::vector<std::string>>> exclusions_; // canonical -> patterns

    std::vector<Surface> name_surfaces_;      // names + aliases
    std::vector<Surface> exclusion_surfaces_; // patterns
};

// Normalization used by the matcher; exposed for tests.
std::string normalize_for_match(std::string_view text);

struct TaggedArticle {
    std::string article_id;
    std::vector<std::string> states;
};

} // namespace pressflow
