#include "tagger.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "error.hpp"
#include "states.hpp"
#include "text.hpp"

namespace pressflow {
namespace {

bool is_word_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

struct Span {
    size_t begin = 0;
    size_t end = 0;
    int state = 0;
};

// All whole-phrase occurrences of `needle` in space-padded `haystack`;
// both already normalized. Returns [begin, end) offsets inside haystack.
void find_occurrences(const std::string& haystack, const std::string& needle, int state,
                      std::vector<Span>& out) {
    if (needle.empty()) return;
    const std::string padded_needle = " " + needle + " ";
    size_t pos = haystack.find(padded_needle);
    while (pos != std::string::npos) {
        out.push_back(Span{pos + 1, pos + 1 + needle.size(), state});
        pos = haystack.find(padded_needle, pos + 1);
    }
}

} // namespace

std::string normalize_for_match(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (unsigned char c : text) {
        if (is_word_byte(c)) {
            if (pending_space && !out.empty()) out += ' ';
            pending_space = false;
            out += ascii_lower(static_cast<char>(c));
        } else {
            pending_space = true;
        }
    }
    return out;
}

Gazetteer Gazetteer::builtin() {
    Gazetteer g;
    const auto& names = canonical_states();
    g.states_.assign(names.begin(), names.end());
    g.exclusions_ = {
        {"Washington",
         {"Washington, D.C.", "Washington D.C.", "Washington DC", "D.C.", "DC",
          "the Washington administration", "Washington Post", "George Washington"}},
        {"Georgia", {"Tbilisi", "Republic of Georgia"}},
    };
    g.compile();
    return g;
}

Gazetteer Gazetteer::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open gazetteer file: " + path);
    const nlohmann::json j = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) {
        throw DataError("gazetteer file is not a JSON object: " + path);
    }

    Gazetteer g = builtin();

    if (j.contains("states")) {
        const auto& states = j.at("states");
        if (!states.is_array()) throw DataError("gazetteer 'states' must be a list");
        g.states_.clear();
        for (const auto& s : states) {
            if (!s.is_string()) throw DataError("gazetteer state names must be text");
            g.states_.push_back(s.get<std::string>());
        }
        std::sort(g.states_.begin(), g.states_.end());
        const auto dup = std::adjacent_find(g.states_.begin(), g.states_.end());
        if (dup != g.states_.end()) {
            throw DataError("gazetteer lists state '" + *dup + "' twice");
        }
    }
    if (g.states_.size() != kStateCount) {
        throw DataError("gazetteer must hold exactly 50 states, got " +
                        std::to_string(g.states_.size()));
    }
    // Downstream joins key on canonical names, so the list may be reordered
    // but not renamed; aliases are the supported spelling mechanism.
    for (const auto& name : g.states_) {
        if (!state_index(name)) {
            throw DataError("gazetteer state '" + name + "' is not a canonical state name");
        }
    }

    auto require_known = [&](const std::string& name, const char* what) {
        if (!std::binary_search(g.states_.begin(), g.states_.end(), name)) {
            throw DataError(std::string("gazetteer ") + what + " references unknown state '" +
                            name + "'");
        }
    };

    if (j.contains("aliases")) {
        const auto& aliases = j.at("aliases");
        if (!aliases.is_object()) throw DataError("gazetteer 'aliases' must be a mapping");
        for (const auto& [surface, target] : aliases.items()) {
            if (!target.is_string()) throw DataError("gazetteer alias targets must be text");
            const std::string canonical = target.get<std::string>();
            require_known(canonical, "alias");
            if (normalize_for_match(surface).empty()) {
                throw DataError("gazetteer alias '" + surface + "' normalizes to nothing");
            }
            g.aliases_.emplace_back(surface, canonical);
        }
    }

    if (j.contains("exclusions")) {
        const auto& exclusions = j.at("exclusions");
        if (!exclusions.is_object()) throw DataError("gazetteer 'exclusions' must be a mapping");
        for (const auto& [state, patterns] : exclusions.items()) {
            require_known(state, "exclusion");
            if (!patterns.is_array()) throw DataError("gazetteer exclusion patterns must be a list");
            std::vector<std::string> list;
            for (const auto& p : patterns) {
                if (!p.is_string()) throw DataError("gazetteer exclusion patterns must be text");
                if (normalize_for_match(p.get<std::string>()).empty()) {
                    throw DataError("gazetteer exclusion pattern for '" + state +
                                    "' normalizes to nothing");
                }
                list.push_back(p.get<std::string>());
            }
            // replace this state's builtin list
            auto it = std::find_if(g.exclusions_.begin(), g.exclusions_.end(),
                                   [&](const auto& e) { return e.first == state; });
            if (it == g.exclusions_.end()) {
                g.exclusions_.emplace_back(state, std::move(list));
            } else {
                it->second = std::move(list);
            }
        }
    }

    g.compile();
    return g;
}

void Gazetteer::compile() {
    name_surfaces_.clear();
    exclusion_surfaces_.clear();

    auto index_of = [&](const std::string& canonical) {
        const auto it = std::lower_bound(states_.begin(), states_.end(), canonical);
        if (it == states_.end() || *it != canonical) {
            throw DataError("gazetteer references unknown state '" + canonical + "'");
        }
        return static_cast<int>(it - states_.begin());
    };

    for (size_t i = 0; i < states_.size(); ++i) {
        name_surfaces_.push_back(Surface{normalize_for_match(states_[i]), static_cast<int>(i)});
    }
    for (const auto& [surface, canonical] : aliases_) {
        name_surfaces_.push_back(Surface{normalize_for_match(surface), index_of(canonical)});
    }
    for (const auto& [canonical, patterns] : exclusions_) {
        const int idx = index_of(canonical);
        for (const auto& p : patterns) {
            exclusion_surfaces_.push_back(Surface{normalize_for_match(p), idx});
        }
    }
}

std::vector<std::string> Gazetteer::tag_text(std::string_view text) const {
    const std::string padded = " " + normalize_for_match(text) + " ";

    std::vector<Span> hits;
    for (const Surface& s : name_surfaces_) {
        find_occurrences(padded, s.normalized, s.state, hits);
    }
    if (hits.empty()) return {};

    std::set<int> matched;
    for (const Span& a : hits) {
        // drop spans strictly contained in a longer hit for a different state
        bool contained = false;
        for (const Span& b : hits) {
            if (b.state != a.state && b.begin <= a.begin && a.end <= b.end &&
                (b.end - b.begin) > (a.end - a.begin)) {
                contained = true;
                break;
            }
        }
        if (!contained) matched.insert(a.state);
    }

    for (const Surface& s : exclusion_surfaces_) {
        if (matched.count(s.state) == 0) continue;
        std::vector<Span> veto;
        find_occurrences(padded, s.normalized, s.state, veto);
        if (!veto.empty()) matched.erase(s.state);
    }

    std::vector<std::string> out;
    out.reserve(matched.size());
    for (int idx : matched) out.push_back(states_[idx]);
    return out;
}

} // namespace pressflow
