#include "sentiment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "error.hpp"
#include "text.hpp"

namespace pressflow {
namespace {

// Empirically derived constants from Hutto & Gilbert (2014).
constexpr double kBIncr = 0.293;
constexpr double kBDecr = -0.293;
constexpr double kCIncr = 0.733;   // ALL-CAPS emphasis
constexpr double kNScalar = -0.74; // negation flip-and-dampen

const std::unordered_map<std::string, double>& booster_dict() {
    static const std::unordered_map<std::string, double> dict = {
        {"absolutely", kBIncr}, {"amazingly", kBIncr}, {"awfully", kBIncr},
        {"completely", kBIncr}, {"considerable", kBIncr}, {"considerably", kBIncr},
        {"decidedly", kBIncr}, {"deeply", kBIncr}, {"effing", kBIncr},
        {"enormous", kBIncr}, {"enormously", kBIncr},
        {"entirely", kBIncr}, {"especially", kBIncr}, {"exceptional", kBIncr},
        {"exceptionally", kBIncr}, {"extreme", kBIncr}, {"extremely", kBIncr},
        {"fabulously", kBIncr}, {"flipping", kBIncr}, {"flippin", kBIncr},
        {"frackin", kBIncr}, {"fracking", kBIncr},
        {"fricking", kBIncr}, {"frickin", kBIncr}, {"frigging", kBIncr},
        {"friggin", kBIncr}, {"fully", kBIncr},
        {"fuckin", kBIncr}, {"fucking", kBIncr}, {"fuggin", kBIncr}, {"fugging", kBIncr},
        {"greatly", kBIncr},
        {"hella", kBIncr}, {"highly", kBIncr}, {"hugely", kBIncr},
        {"incredible", kBIncr}, {"incredibly", kBIncr}, {"intensely", kBIncr},
        {"major", kBIncr}, {"majorly", kBIncr}, {"more", kBIncr}, {"most", kBIncr},
        {"particularly", kBIncr}, {"purely", kBIncr},
        {"quite", kBIncr},
        {"really", kBIncr}, {"remarkably", kBIncr},
        {"so", kBIncr}, {"substantially", kBIncr},
        {"thoroughly", kBIncr}, {"total", kBIncr}, {"totally", kBIncr},
        {"tremendous", kBIncr}, {"tremendously", kBIncr},
        {"uber", kBIncr}, {"unbelievably", kBIncr}, {"unusually", kBIncr},
        {"utter", kBIncr}, {"utterly", kBIncr},
        {"very", kBIncr},
        {"almost", kBDecr}, {"barely", kBDecr}, {"hardly", kBDecr}, {"just enough", kBDecr},
        {"kind of", kBDecr}, {"kinda", kBDecr}, {"kindof", kBDecr}, {"kind-of", kBDecr},
        {"less", kBDecr}, {"little", kBDecr},
        {"marginal", kBDecr}, {"marginally", kBDecr},
        {"occasional", kBDecr}, {"occasionally", kBDecr}, {"partly", kBDecr},
        {"scarce", kBDecr}, {"scarcely", kBDecr}, {"slight", kBDecr}, {"slightly", kBDecr},
        {"somewhat", kBDecr},
        {"sort of", kBDecr}, {"sorta", kBDecr}, {"sortof", kBDecr}, {"sort-of", kBDecr},
    };
    return dict;
}

const std::unordered_set<std::string>& negate_set() {
    static const std::unordered_set<std::string> set = {
        "aint", "arent", "cannot", "cant", "couldnt", "darent", "didnt", "doesnt",
        "ain't", "aren't", "can't", "couldn't", "daren't", "didn't", "doesn't",
        "dont", "hadnt", "hasnt", "havent", "isnt", "mightnt", "mustnt", "neither",
        "don't", "hadn't", "hasn't", "haven't", "isn't", "mightn't", "mustn't",
        "neednt", "needn't", "never", "none", "nope", "nor", "not", "nothing", "nowhere",
        "oughtnt", "shant", "shouldnt", "uhuh", "wasnt", "werent",
        "oughtn't", "shan't", "shouldn't", "uh-uh", "wasn't", "weren't",
        "without", "wont", "wouldnt", "won't", "wouldn't", "rarely", "seldom", "despite",
    };
    return set;
}

const std::unordered_map<std::string, double>& special_cases() {
    static const std::unordered_map<std::string, double> dict = {
        {"the shit", 3.0},  {"the bomb", 3.0},    {"bad ass", 1.5},
        {"badass", 1.5},    {"bus stop", 0.0},    {"yeah right", -2.0},
        {"kiss of death", -1.5}, {"to die for", 3.0},
        {"beating heart", 3.1},  {"broken heart", -2.9},
    };
    return dict;
}

bool is_ascii_punct(unsigned char c) {
    // Mirrors Python's string.punctuation.
    return (c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) ||
           (c >= 123 && c <= 126);
}

// Python str.isupper() restricted to ASCII case: at least one letter, no
// lowercase letters.
bool is_all_caps(const std::string& word) {
    bool any_alpha = false;
    for (unsigned char c : word) {
        if (c >= 'a' && c <= 'z') return false;
        if (c >= 'A' && c <= 'Z') any_alpha = true;
    }
    return any_alpha;
}

// Leading/trailing punctuation is stripped unless that would leave two or
// fewer characters, in which case the token was likely an emoticon and is
// kept verbatim.
std::string strip_punc_if_word(const std::string& token) {
    size_t begin = 0;
    size_t end = token.size();
    while (begin < end && is_ascii_punct(static_cast<unsigned char>(token[begin]))) ++begin;
    while (end > begin && is_ascii_punct(static_cast<unsigned char>(token[end - 1]))) --end;
    if (end - begin <= 2) return token;
    return token.substr(begin, end - begin);
}

struct SentiText {
    std::vector<std::string> tokens; // original case, outer punctuation stripped
    std::vector<std::string> lower;  // ASCII-lowered mirror of tokens
    bool is_cap_diff = false;        // some but not all tokens are ALL CAPS
};

SentiText make_sentitext(std::string_view text) {
    SentiText st;
    for (std::string_view raw : split_whitespace(text)) {
        st.tokens.push_back(strip_punc_if_word(std::string(raw)));
    }
    st.lower.reserve(st.tokens.size());
    size_t allcap = 0;
    for (const std::string& tok : st.tokens) {
        st.lower.push_back(to_lower_ascii(tok));
        if (is_all_caps(tok)) ++allcap;
    }
    const size_t differential = st.tokens.size() - allcap;
    st.is_cap_diff = differential > 0 && differential < st.tokens.size();
    return st;
}

bool negated(const std::string& lower_word) {
    if (negate_set().count(lower_word)) return true;
    return lower_word.find("n't") != std::string::npos;
}

double scalar_inc_dec(const std::string& word, const std::string& word_lower, double valence,
                      bool is_cap_diff) {
    auto it = booster_dict().find(word_lower);
    if (it == booster_dict().end()) return 0.0;
    double scalar = it->second;
    if (valence < 0) scalar = -scalar;
    if (is_all_caps(word) && is_cap_diff) {
        scalar += valence > 0 ? kCIncr : -kCIncr;
    }
    return scalar;
}

double negation_check(double valence, const std::vector<std::string>& lower, int start_i,
                      size_t i) {
    if (start_i == 0) {
        if (negated(lower[i - 1])) valence *= kNScalar;
    }
    if (start_i == 1) {
        if (lower[i - 2] == "never" && (lower[i - 1] == "so" || lower[i - 1] == "this")) {
            valence *= 1.25;
        } else if (lower[i - 2] == "without" && lower[i - 1] == "doubt") {
            // explicit pass-through
        } else if (negated(lower[i - 2])) {
            valence *= kNScalar;
        }
    }
    if (start_i == 2) {
        // Operator precedence matches the reference: the trailing "so"/"this"
        // alternative fires regardless of what sits at i-3.
        if ((lower[i - 3] == "never" && (lower[i - 2] == "so" || lower[i - 2] == "this")) ||
            (lower[i - 1] == "so" || lower[i - 1] == "this")) {
            valence *= 1.25;
        } else if (lower[i - 3] == "without" &&
                   (lower[i - 2] == "doubt" || lower[i - 1] == "doubt")) {
            // explicit pass-through
        } else if (negated(lower[i - 3])) {
            valence *= kNScalar;
        }
    }
    return valence;
}

// Only reached via the start_i == 2 branch, so i >= 3 is guaranteed.
double special_idioms_check(double valence, const std::vector<std::string>& lower, size_t i) {
    const std::string onezero = lower[i - 1] + " " + lower[i];
    const std::string twoonezero = lower[i - 2] + " " + lower[i - 1] + " " + lower[i];
    const std::string twoone = lower[i - 2] + " " + lower[i - 1];
    const std::string threetwoone = lower[i - 3] + " " + lower[i - 2] + " " + lower[i - 1];
    const std::string threetwo = lower[i - 3] + " " + lower[i - 2];

    for (const std::string* seq : {&onezero, &twoonezero, &twoone, &threetwoone, &threetwo}) {
        auto it = special_cases().find(*seq);
        if (it != special_cases().end()) {
            valence = it->second;
            break;
        }
    }

    if (lower.size() - 1 > i) {
        const std::string zeroone = lower[i] + " " + lower[i + 1];
        auto it = special_cases().find(zeroone);
        if (it != special_cases().end()) valence = it->second;
    }
    if (lower.size() - 1 > i + 1) {
        const std::string zeroonetwo = lower[i] + " " + lower[i + 1] + " " + lower[i + 2];
        auto it = special_cases().find(zeroonetwo);
        if (it != special_cases().end()) valence = it->second;
    }

    for (const std::string* n_gram : {&threetwoone, &threetwo, &twoone}) {
        auto it = booster_dict().find(*n_gram);
        if (it != booster_dict().end()) valence += it->second;
    }
    return valence;
}

double least_check(double valence, const std::vector<std::string>& lower, size_t i,
                   const Lexicon& lexicon) {
    if (i > 1 && !lexicon.contains(lower[i - 1]) && lower[i - 1] == "least") {
        if (lower[i - 2] != "at" && lower[i - 2] != "very") valence *= kNScalar;
    } else if (i > 0 && !lexicon.contains(lower[i - 1]) && lower[i - 1] == "least") {
        valence *= kNScalar;
    }
    return valence;
}

double sentiment_valence(const SentiText& st, size_t i, const Lexicon& lexicon) {
    const std::string& item = st.tokens[i];
    const std::string& item_lower = st.lower[i];
    if (!lexicon.contains(item_lower)) return 0.0;

    double valence = lexicon.valence(item_lower);
    const size_t n = st.tokens.size();

    // "no" negating the following lexicon item beats "no" as a standalone item.
    if (item_lower == "no" && i + 1 < n && lexicon.contains(st.lower[i + 1])) {
        valence = 0.0;
    }
    if ((i > 0 && st.lower[i - 1] == "no") || (i > 1 && st.lower[i - 2] == "no") ||
        (i > 2 && st.lower[i - 3] == "no" &&
         (st.lower[i - 1] == "or" || st.lower[i - 1] == "nor"))) {
        valence = lexicon.valence(item_lower) * kNScalar;
    }

    if (is_all_caps(item) && st.is_cap_diff) {
        valence += valence > 0 ? kCIncr : -kCIncr;
    }

    for (int start_i = 0; start_i < 3; ++start_i) {
        if (i > static_cast<size_t>(start_i) && !lexicon.contains(st.lower[i - (start_i + 1)])) {
            double s = scalar_inc_dec(st.tokens[i - (start_i + 1)], st.lower[i - (start_i + 1)],
                                      valence, st.is_cap_diff);
            if (start_i == 1 && s != 0.0) s *= 0.95;
            if (start_i == 2 && s != 0.0) s *= 0.9;
            valence += s;
            valence = negation_check(valence, st.lower, start_i, i);
            if (start_i == 2) valence = special_idioms_check(valence, st.lower, i);
        }
    }

    return least_check(valence, st.lower, i, lexicon);
}

// The reference resolves each visited value to its FIRST occurrence before
// scaling, so duplicate magnitudes collapse onto the earliest slot; kept
// deliberately for parity.
void but_check(const std::vector<std::string>& lower, std::vector<double>& sentiments) {
    auto but_it = std::find(lower.begin(), lower.end(), "but");
    if (but_it == lower.end()) return;
    const size_t bi = static_cast<size_t>(but_it - lower.begin());
    for (size_t k = 0; k < sentiments.size(); ++k) {
        const double v = sentiments[k];
        size_t si = 0;
        while (sentiments[si] != v) ++si;
        if (si < bi) {
            sentiments[si] = v * 0.5;
        } else if (si > bi) {
            sentiments[si] = v * 1.5;
        }
    }
}

double amplify_ep(std::string_view text) {
    long count = std::count(text.begin(), text.end(), '!');
    if (count > 4) count = 4;
    return static_cast<double>(count) * 0.292;
}

double amplify_qm(std::string_view text) {
    const long count = std::count(text.begin(), text.end(), '?');
    if (count <= 1) return 0.0;
    return count <= 3 ? static_cast<double>(count) * 0.18 : 0.96;
}

CompoundScore score_valence(const std::vector<double>& sentiments, std::string_view text) {
    CompoundScore out;
    if (sentiments.empty()) return out;

    double sum = std::accumulate(sentiments.begin(), sentiments.end(), 0.0);
    const double amp = amplify_ep(text) + amplify_qm(text);
    if (sum > 0) {
        sum += amp;
    } else if (sum < 0) {
        sum -= amp;
    }
    out.compound = normalize_valence(sum);

    double pos_sum = 0.0;
    double neg_sum = 0.0;
    int neu_count = 0;
    for (double v : sentiments) {
        if (v > 0) pos_sum += v + 1.0; // +/-1 compensates neutral counts of 1
        if (v < 0) neg_sum += v - 1.0;
        if (v == 0) ++neu_count;
    }
    if (pos_sum > std::fabs(neg_sum)) {
        pos_sum += amp;
    } else if (pos_sum < std::fabs(neg_sum)) {
        neg_sum -= amp;
    }

    const double total = pos_sum + std::fabs(neg_sum) + neu_count;
    out.pos = std::fabs(pos_sum / total);
    out.neg = std::fabs(neg_sum / total);
    out.neu = std::fabs(neu_count / total);
    return out;
}

void validate_token(const std::string& token, size_t line_no) {
    if (token.empty()) {
        throw DataError("lexicon line " + std::to_string(line_no) + ": empty token");
    }
    for (unsigned char c : token) {
        if (c == ' ' || c == '\t' || (c >= 'A' && c <= 'Z')) {
            throw DataError("lexicon line " + std::to_string(line_no) + ": token '" + token +
                            "' must be lowercase without whitespace");
        }
    }
}

} // namespace

Lexicon Lexicon::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open lexicon file: " + path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_text(content, path);
}

Lexicon Lexicon::from_text(std::string_view text, const std::string& origin) {
    Lexicon lex;
    std::string line;
    size_t line_no = 0;
    std::istringstream in{std::string(text)};
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string_view trimmed = trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;

        const std::vector<std::string> fields = split(line, '\t');
        if (fields.size() < 2) {
            throw DataError("lexicon line " + std::to_string(line_no) +
                            ": expected at least 2 tab-separated fields");
        }
        std::string token = fields[0];
        validate_token(token, line_no);
        double valence = 0.0;
        if (!parse_double(fields[1], valence) || !std::isfinite(valence)) {
            throw DataError("lexicon line " + std::to_string(line_no) + ": bad valence '" +
                            fields[1] + "'");
        }
        if (!lex.entries_.emplace(std::move(token), valence).second) {
            throw DataError("lexicon line " + std::to_string(line_no) + ": duplicate token '" +
                            fields[0] + "'");
        }
    }
    if (lex.entries_.empty()) throw DataError("lexicon file has no entries: " + origin);
    return lex;
}

Lexicon Lexicon::from_entries(const std::vector<std::pair<std::string, double>>& entries) {
    Lexicon lex;
    size_t line_no = 0;
    for (const auto& [token, valence] : entries) {
        ++line_no;
        validate_token(token, line_no);
        if (!std::isfinite(valence)) {
            throw DataError("lexicon entry " + std::to_string(line_no) + ": bad valence");
        }
        if (!lex.entries_.emplace(token, valence).second) {
            throw DataError("lexicon line " + std::to_string(line_no) + ": duplicate token '" +
                            token + "'");
        }
    }
    if (lex.entries_.empty()) throw DataError("lexicon has no entries");
    return lex;
}

bool Lexicon::contains(const std::string& lowercase_token) const {
    return entries_.count(lowercase_token) != 0;
}

double Lexicon::valence(const std::string& lowercase_token) const {
    auto it = entries_.find(lowercase_token);
    return it == entries_.end() ? 0.0 : it->second;
}

double normalize_valence(double x, double alpha) {
    const double norm = x / std::sqrt(x * x + alpha);
    return std::clamp(norm, -1.0, 1.0);
}

CompoundScore score_text(std::string_view text, const Lexicon& lexicon) {
    const SentiText st = make_sentitext(text);

    std::vector<double> sentiments;
    sentiments.reserve(st.tokens.size());
    for (size_t i = 0; i < st.tokens.size(); ++i) {
        // Boosters and the "kind of" bigram contribute through their
        // neighbours, never on their own.
        if (booster_dict().count(st.lower[i]) != 0) {
            sentiments.push_back(0.0);
            continue;
        }
        if (i + 1 < st.tokens.size() && st.lower[i] == "kind" && st.lower[i + 1] == "of") {
            sentiments.push_back(0.0);
            continue;
        }
        sentiments.push_back(sentiment_valence(st, i, lexicon));
    }

    but_check(st.lower, sentiments);
    return score_valence(sentiments, text);
}

// defined in the build-generated bundled_lexicon.cpp
const char* bundled_lexicon_text();

const Lexicon& bundled_lexicon() {
    static const Lexicon lex = Lexicon::from_text(bundled_lexicon_text(), "bundled lexicon");
    return lex;
}

} // namespace pressflow
