#include "cce/matcher.hpp"

#include <algorithm>

#include "cce/error.hpp"
#include "cce/stemmer.hpp"
#include "cce/text.hpp"

namespace cce {

namespace {

// Keep in sync with data/stopwords_en.txt (checked by a unit test).
const char* const kStopwords[] = {
    "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "you're", "you've", "you'll", "you'd",
    "your", "yours", "yourself", "yourselves", "he", "him", "his", "himself", "she", "she's", "her", "hers",
    "herself", "it", "it's", "its", "itself", "they", "them", "their", "theirs", "themselves", "what", "which",
    "who", "whom", "this", "that", "that'll", "these", "those", "am", "is", "are", "was", "were", "be", "been",
    "being", "have", "has", "had", "having", "do", "does", "did", "doing", "a", "an", "the", "and", "but", "if",
    "or", "because", "as", "until", "while", "of", "at", "by", "for", "with", "about", "against", "between",
    "into", "through", "during", "before", "after", "above", "below", "to", "from", "up", "down", "in", "out",
    "on", "off", "over", "under", "again", "further", "then", "once", "here", "there", "when", "where", "why",
    "how", "all", "any", "both", "each", "few", "more", "most", "other", "some", "such", "no", "nor", "not",
    "only", "own", "same", "so", "than", "too", "very", "s", "t", "can", "will", "just", "don", "don't",
    "should", "should've", "now", "d", "ll", "m", "o", "re", "ve", "y", "ain", "aren", "aren't", "couldn",
    "couldn't", "didn", "didn't", "doesn", "doesn't", "hadn", "hadn't", "hasn", "hasn't", "haven", "haven't",
    "isn", "isn't", "ma", "mightn", "mightn't", "mustn", "mustn't", "needn", "needn't", "shan", "shan't",
    "shouldn", "shouldn't", "wasn", "wasn't", "weren", "weren't", "won", "won't", "wouldn", "wouldn't",
};

const std::vector<std::size_t> kNoTerms;

}  // namespace

const WordSet& default_stopwords() {
    static const WordSet words(std::begin(kStopwords), std::end(kStopwords));
    return words;
}

WordSet parse_word_list(std::string_view text) {
    WordSet out;
    for (const std::string& raw : split_fields(text, '\n')) {
        const auto fields = split_whitespace(chomp(raw));
        if (fields.empty() || fields.front().front() == '#') continue;
        out.insert(to_lower(fields.front()));
    }
    return out;
}

StemIndex::StemIndex(Glossary glossary, const MatcherConfig& config) : glossary_(std::move(glossary)) {
    for (std::size_t id = 0; id < glossary_.size(); ++id) {
        for (const std::string& w : glossary_[id].words) {
            const std::string lw = to_lower(w);
            if (config.stopwords.count(lw)) continue;
            auto& ids = index_[stem(lw)];
            if (ids.empty() || ids.back() != id) ids.push_back(id);
        }
    }
}

const std::vector<std::size_t>& StemIndex::lookup(std::string_view stem_text) const {
    const auto it = index_.find(stem_text);
    return it == index_.end() ? kNoTerms : it->second;
}

std::vector<std::string> entity_words(const EntitySpan& entity) { return split_whitespace(to_lower(entity.text)); }

std::vector<std::size_t> candidates(const StemIndex& index, const EntitySpan& entity, const MatcherConfig& config) {
    std::vector<std::size_t> out;
    bool any_content = false;
    for (const std::string& w : entity_words(entity)) {
        if (config.stopwords.count(w)) continue;
        any_content = true;
        const auto& ids = index.lookup(stem(w));
        out.insert(out.end(), ids.begin(), ids.end());
    }
    if (!any_content) throw NoContentWords();
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Eigen::MatrixXd sim_matrix(const GlossaryTerm& term, const std::vector<std::string>& words,
                           const EmbeddingProvider& provider) {
    const auto m = static_cast<Eigen::Index>(term.words.size());
    const auto n = static_cast<Eigen::Index>(words.size());
    Eigen::MatrixXd s(m, n);
    std::vector<Eigen::VectorXd> cols;
    cols.reserve(words.size());
    for (const auto& w : words) cols.push_back(provider.lookup(to_lower(w)));
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::VectorXd row = provider.lookup(to_lower(term.words[static_cast<std::size_t>(i)]));
        for (Eigen::Index j = 0; j < n; ++j) s(i, j) = similarity(row, cols[static_cast<std::size_t>(j)]);
    }
    return s;
}

std::vector<bool> countable_mask(const GlossaryTerm& term, const MatcherConfig& config) {
    std::vector<bool> mask;
    mask.reserve(term.words.size());
    for (const auto& w : term.words) mask.push_back(config.extra_stopwords.count(to_lower(w)) == 0);
    return mask;
}

double coverage_score(const Eigen::MatrixXd& matrix, const std::vector<bool>& countable, double s_c) {
    if (static_cast<Eigen::Index>(countable.size()) != matrix.rows()) {
        throw DimensionMismatch("countable mask length differs from matrix rows");
    }
    std::size_t m = 0;
    double total = 0.0;
    for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
        if (!countable[static_cast<std::size_t>(i)]) continue;
        ++m;
        if (matrix.cols() == 0) continue;
        const double best = matrix.row(i).maxCoeff();
        if (best > s_c) total += best;
    }
    if (m == 0) throw NoCountableWords();
    return total / static_cast<double>(m);
}

ScoredCandidate score_candidate(const StemIndex& index, std::size_t term_id, const std::vector<std::string>& words,
                                const EmbeddingProvider& provider, const MatcherConfig& config) {
    const GlossaryTerm& term = index.glossary()[term_id];
    const Eigen::MatrixXd s = sim_matrix(term, words, provider);
    const std::vector<bool> mask = countable_mask(term, config);
    ScoredCandidate out;
    out.term_id = term_id;
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
        if (mask[static_cast<std::size_t>(i)] && s.cols() > 0) out.row_max.push_back(s.row(i).maxCoeff());
    }
    out.score = coverage_score(s, mask, config.s_c);
    return out;
}

std::vector<MatchResult> match(const EntitySpan& entity, const StemIndex& index, const EmbeddingProvider& provider,
                               const MatcherConfig& config) {
    const std::vector<std::string> words = entity_words(entity);
    std::vector<MatchResult> out;
    for (std::size_t id : candidates(index, entity, config)) {
        double score = 0.0;
        try {
            score = score_candidate(index, id, words, provider, config).score;
        } catch (const NoCountableWords&) {
            continue;
        }
        if (score <= config.min_score) continue;
        const GlossaryTerm& term = index.glossary()[id];
        out.push_back({term.cid, term.concept_type, score, id});
    }
    std::sort(out.begin(), out.end(), [](const MatchResult& a, const MatchResult& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.term_id < b.term_id;
    });
    if (out.size() > config.top_k) out.resize(config.top_k);
    return out;
}

}  // namespace cce
