// English (Porter2) stemmer matching the current Snowball english.sbl
// (https://snowballstem.org/algorithms/english/stemmer.html), including the
// revisions that added the extra R1 prefixes and the -ing special cases.

#include "cce/stemmer.hpp"

#include <array>
#include <optional>
#include <string_view>
#include <utility>

#include "cce/text.hpp"

namespace cce {

namespace {

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y'; }

bool ends_with(const std::string& w, std::string_view suffix) {
    return w.size() >= suffix.size() && std::string_view(w).substr(w.size() - suffix.size()) == suffix;
}

bool contains_vowel(std::string_view s) {
    for (char c : s) {
        if (is_vowel(c)) return true;
    }
    return false;
}

bool is_double(std::string_view w) {
    static constexpr std::string_view doubles[] = {"bb", "dd", "ff", "gg", "mm", "nn", "pp", "rr", "tt"};
    for (auto d : doubles) {
        if (w.size() >= 2 && w.substr(w.size() - 2) == d) return true;
    }
    return false;
}

bool is_aeo(char c) { return c == 'a' || c == 'e' || c == 'o'; }

bool is_li_ending(char c) {
    return c == 'c' || c == 'd' || c == 'e' || c == 'g' || c == 'h' || c == 'k' || c == 'm' || c == 'n' ||
           c == 'r' || c == 't';
}

// Short syllable ending at position `end` (exclusive).
bool short_syllable_at(std::string_view w, std::size_t end) {
    if (end >= 4 && w.substr(end - 4, 4) == "past") return true;
    if (end == 2) return is_vowel(w[0]) && !is_vowel(w[1]);
    if (end < 3) return false;
    const char a = w[end - 3];
    const char b = w[end - 2];
    const char c = w[end - 1];
    return !is_vowel(a) && is_vowel(b) && !is_vowel(c) && c != 'w' && c != 'x' && c != 'Y';
}

class Porter2 {
public:
    explicit Porter2(std::string w) : w_(std::move(w)) {}

    std::string run() {
        if (auto special = exception1()) return *special;
        if (w_.size() <= 2) return w_;
        if (w_.front() == '\'') w_.erase(0, 1);

        mark_ys();
        find_regions();

        step0();
        step1a();
        step1b();
        step1c();
        step2();
        step3();
        step4();
        step5();
        return finish();
    }

private:
    std::string w_;
    std::size_t r1_ = 0;
    std::size_t r2_ = 0;

    std::optional<std::string> exception1() const {
        static const std::pair<std::string_view, std::string_view> table[] = {
            {"skis", "ski"},     {"skies", "sky"},   {"idly", "idl"},   {"gently", "gentl"}, {"ugly", "ugli"},
            {"early", "earli"},  {"only", "onli"},   {"singly", "singl"}, {"sky", "sky"},    {"news", "news"},
            {"howe", "howe"},    {"atlas", "atlas"}, {"cosmos", "cosmos"}, {"bias", "bias"}, {"andes", "andes"},
        };
        for (const auto& [from, to] : table) {
            if (w_ == from) return std::string(to);
        }
        return std::nullopt;
    }

    void mark_ys() {
        for (std::size_t i = 0; i < w_.size(); ++i) {
            if (w_[i] == 'y' && (i == 0 || is_vowel(w_[i - 1]))) w_[i] = 'Y';
        }
    }

    std::size_t region_after(std::size_t from) const {
        for (std::size_t i = from + 1; i < w_.size(); ++i) {
            if (!is_vowel(w_[i]) && is_vowel(w_[i - 1])) return i + 1;
        }
        return w_.size();
    }

    void find_regions() {
        static constexpr std::string_view prefixes[] = {"arsen", "commun", "emerg", "gener", "inter",
                                                        "later", "organ", "past",   "univers"};
        r1_ = std::string::npos;
        for (auto p : prefixes) {
            if (w_.compare(0, p.size(), p) == 0) {
                r1_ = p.size();
                break;
            }
        }
        if (r1_ == std::string::npos) r1_ = region_after(0);
        r2_ = r1_ >= w_.size() ? w_.size() : region_after(r1_);
    }

    bool in_r1(std::size_t suffix_len) const { return w_.size() - suffix_len >= r1_; }
    bool in_r2(std::size_t suffix_len) const { return w_.size() - suffix_len >= r2_; }

    void chop(std::size_t n) { w_.erase(w_.size() - n); }
    void replace(std::size_t n, std::string_view with) {
        chop(n);
        w_ += with;
    }

    bool is_short_word() const { return r1_ == w_.size() && short_syllable_at(w_, w_.size()); }

    // Longest suffix of `w_` among `suffixes`, or empty.
    template <std::size_t N>
    std::string_view longest(const std::array<std::string_view, N>& suffixes) const {
        std::string_view best;
        for (auto s : suffixes) {
            if (s.size() > best.size() && ends_with(w_, s)) best = s;
        }
        return best;
    }

    void step0() {
        static constexpr std::array<std::string_view, 3> suffixes{"'s'", "'s", "'"};
        if (auto s = longest(suffixes); !s.empty()) chop(s.size());
    }

    void step1a() {
        static constexpr std::array<std::string_view, 6> suffixes{"sses", "ied", "ies", "us", "ss", "s"};
        const auto s = longest(suffixes);
        if (s == "sses") {
            chop(2);
        } else if (s == "ied" || s == "ies") {
            replace(3, w_.size() > 4 ? "i" : "ie");
        } else if (s == "s") {
            // delete if a vowel occurs before the letter preceding the s
            if (w_.size() >= 3 && contains_vowel(std::string_view(w_).substr(0, w_.size() - 2))) chop(1);
        }
    }

    void step1b() {
        static constexpr std::array<std::string_view, 6> suffixes{"eed", "eedly", "ed", "edly", "ing", "ingly"};
        const auto s = longest(suffixes);
        if (s.empty()) return;
        const std::string_view stem = std::string_view(w_).substr(0, w_.size() - s.size());
        if (s == "eed" || s == "eedly") {
            if (in_r1(s.size()) && stem != "succ" && stem != "proc" && stem != "exc") replace(s.size(), "ee");
            return;
        }
        if (s == "ing") {
            static constexpr std::string_view keep[] = {"even", "cann", "inn", "earr", "herr", "out"};
            for (auto k : keep) {
                if (stem == k) return;
            }
            // dying -> die, lying -> lie
            if (stem.size() == 2 && stem[1] == 'y' && !is_vowel(stem[0])) {
                replace(4, "ie");
                return;
            }
        }
        if (!contains_vowel(stem)) return;
        chop(s.size());
        if (ends_with(w_, "at") || ends_with(w_, "bl") || ends_with(w_, "iz")) {
            w_ += 'e';
        } else if (is_double(w_)) {
            if (!(w_.size() == 3 && is_aeo(w_[0]))) chop(1);
        } else if (is_short_word()) {
            w_ += 'e';
        }
    }

    void step1c() {
        if (w_.size() > 2 && (w_.back() == 'y' || w_.back() == 'Y') && !is_vowel(w_[w_.size() - 2])) {
            w_.back() = 'i';
        }
    }

    void step2() {
        static constexpr std::array<std::pair<std::string_view, std::string_view>, 25> rules{{
            {"tional", "tion"}, {"enci", "ence"},    {"anci", "ance"},   {"abli", "able"},    {"entli", "ent"},
            {"izer", "ize"},    {"ization", "ize"},  {"ational", "ate"}, {"ation", "ate"},    {"ator", "ate"},
            {"alism", "al"},    {"aliti", "al"},     {"alli", "al"},     {"fulness", "ful"},  {"ousli", "ous"},
            {"ousness", "ous"}, {"iveness", "ive"},  {"iviti", "ive"},   {"biliti", "ble"},   {"bli", "ble"},
            {"ogi", "og"},      {"fulli", "ful"},    {"lessli", "less"}, {"li", ""},      {"ogist", "og"},
        }};
        const auto* rule = longest_rule(rules);
        if (rule == nullptr || !in_r1(rule->first.size())) return;
        const std::size_t n = rule->first.size();
        if (rule->first == "ogi") {
            if (w_.size() >= 4 && w_[w_.size() - 4] == 'l') replace(n, rule->second);
        } else if (rule->first == "li") {
            if (w_.size() >= 3 && is_li_ending(w_[w_.size() - 3])) chop(n);
        } else {
            replace(n, rule->second);
        }
    }

    void step3() {
        static constexpr std::array<std::pair<std::string_view, std::string_view>, 9> rules{{
            {"tional", "tion"}, {"ational", "ate"}, {"alize", "al"}, {"icate", "ic"}, {"iciti", "ic"},
            {"ical", "ic"},     {"ful", ""},        {"ness", ""},    {"ative", ""},
        }};
        const auto* rule = longest_rule(rules);
        if (rule == nullptr || !in_r1(rule->first.size())) return;
        if (rule->first == "ative" && !in_r2(rule->first.size())) return;
        replace(rule->first.size(), rule->second);
    }

    void step4() {
        static constexpr std::array<std::string_view, 18> suffixes{
            "al",  "ance", "ence", "er",  "ic",  "able", "ible", "ant", "ement",
            "ment", "ent", "ism",  "ate", "iti", "ous",  "ive",  "ize", "ion",
        };
        const auto s = longest(suffixes);
        if (s.empty() || !in_r2(s.size())) return;
        if (s == "ion") {
            const std::size_t before = w_.size() - 3;
            if (before >= 1 && (w_[before - 1] == 's' || w_[before - 1] == 't')) chop(3);
            return;
        }
        chop(s.size());
    }

    void step5() {
        if (w_.empty()) return;
        if (w_.back() == 'e') {
            if (in_r2(1) || (in_r1(1) && !short_syllable_at(w_, w_.size() - 1))) chop(1);
        } else if (w_.back() == 'l') {
            if (in_r2(1) && w_.size() >= 2 && w_[w_.size() - 2] == 'l') chop(1);
        }
    }

    template <std::size_t N>
    const std::pair<std::string_view, std::string_view>* longest_rule(
        const std::array<std::pair<std::string_view, std::string_view>, N>& rules) const {
        const std::pair<std::string_view, std::string_view>* best = nullptr;
        for (const auto& r : rules) {
            if ((best == nullptr || r.first.size() > best->first.size()) && ends_with(w_, r.first)) best = &r;
        }
        return best;
    }

    std::string finish() {
        for (char& c : w_) {
            if (c == 'Y') c = 'y';
        }
        return w_;
    }
};

}  // namespace

std::string stem(std::string_view word) { return Porter2(to_lower(word)).run(); }

}  // namespace cce
