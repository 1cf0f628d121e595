#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pressflow {

// Rule-based sentiment scoring after Hutto & Gilbert's VADER:
//
//   Hutto, C.J. & Gilbert, E.E. (2014). VADER: A Parsimonious Rule-based
//   Model for Sentiment Analysis of Social Media Text. ICWSM-14.
//
// The scoring pipeline mirrors the reference implementation operation for
// operation (including its documented oddities) so that outputs agree with
// it to float tolerance on the bundled parity fixture. The emoji
// substitution table of the reference is intentionally not carried; case
// handling is ASCII.

struct CompoundScore {
    double compound = 0.0; // in [-1, 1]
    double pos = 0.0;
    double neg = 0.0;
    double neu = 0.0;
};

class Lexicon {
public:
    // Reference TSV format: token<TAB>valence<TAB>stddev<TAB>ratings, only the
    // first two fields are consumed; '#' lines are comments. Throws DataError
    // citing the line number for malformed valences, duplicate tokens, or
    // tokens that are empty / contain whitespace or uppercase ASCII.
    static Lexicon load(const std::string& path);
    // Same format as load, from an in-memory buffer. origin names the source
    // in error messages.
    static Lexicon from_text(std::string_view text, const std::string& origin = "lexicon");
    // In-memory construction for tests and embedders; same validation.
    static Lexicon from_entries(const std::vector<std::pair<std::string, double>>& entries);

    bool contains(const std::string& lowercase_token) const;
    // Valence in lexicon units (empirically within [-4, 4]); 0 when absent.
    double valence(const std::string& lowercase_token) const;
    size_t size() const { return entries_.size(); }

private:
    std::unordered_map<std::string, double> entries_;
};

// x / sqrt(x^2 + alpha), clamped to [-1, 1]. Odd and strictly increasing.
double normalize_valence(double x, double alpha = 15.0);

// Whole-text score; pure. Tokens that miss the lexicon and trigger no
// heuristic leave the text at compound 0 with neu = 1.
CompoundScore score_text(std::string_view text, const Lexicon& lexicon);

// The lexicon compiled into the binary (a copy of data/vader_lexicon.txt),
// so the CLI works without a path argument. Parsed once, cached.
const Lexicon& bundled_lexicon();

} // namespace pressflow
