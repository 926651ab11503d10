#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cce/corpus.hpp"
#include "cce/embeddings.hpp"
#include "cce/synthesizer.hpp"

namespace cce {

using WordSet = std::set<std::string, std::less<>>;

/// Built-in English stopword list (same words as data/stopwords_en.txt).
const WordSet& default_stopwords();
inline constexpr std::string_view kStopwordListVersion = "en-1";

/// One word per line; `#` comments and blank lines ignored; lowercased.
WordSet parse_word_list(std::string_view text);

struct MatcherConfig {
    /// Row maxima must be strictly above this to count.
    double s_c = 0.6;
    /// Candidates scoring at or below this are dropped.
    double min_score = 0.0;
    std::size_t top_k = 10;
    WordSet stopwords = default_stopwords();
    /// Term words left out of the word count m (glossary specific).
    WordSet extra_stopwords = {"configuration", "color"};
};

/// stem -> term ids, over every non-stopword word of every term.
class StemIndex {
public:
    StemIndex(Glossary glossary, const MatcherConfig& config);

    const Glossary& glossary() const { return glossary_; }
    /// Sorted term ids for a stem; empty when unknown.
    const std::vector<std::size_t>& lookup(std::string_view stem) const;
    const std::map<std::string, std::vector<std::size_t>, std::less<>>& entries() const { return index_; }

private:
    Glossary glossary_;
    std::map<std::string, std::vector<std::size_t>, std::less<>> index_;
};

inline StemIndex build_index(Glossary glossary, const MatcherConfig& config) {
    return StemIndex(std::move(glossary), config);
}

/// Lowercased words of an entity's surface text.
std::vector<std::string> entity_words(const EntitySpan& entity);

/// Term ids sharing at least one non-stopword stem with the entity, ascending.
/// Throws NoContentWords when every entity word is a stopword.
std::vector<std::size_t> candidates(const StemIndex& index, const EntitySpan& entity, const MatcherConfig& config);

/// m x n cosine similarities between term words (rows) and entity words
/// (columns), on unstemmed lowercased words.
Eigen::MatrixXd sim_matrix(const GlossaryTerm& term, const std::vector<std::string>& entity_words,
                           const EmbeddingProvider& provider);

/// true for term words that count towards m (not in extra_stopwords).
std::vector<bool> countable_mask(const GlossaryTerm& term, const MatcherConfig& config);

/// Mean over countable rows of rowmax * [rowmax > s_c]. Throws
/// NoCountableWords when the mask selects nothing.
double coverage_score(const Eigen::MatrixXd& matrix, const std::vector<bool>& countable, double s_c);

struct ScoredCandidate {
    std::size_t term_id = 0;
    std::vector<double> row_max;  // one per countable term word
    double score = 0.0;
};

ScoredCandidate score_candidate(const StemIndex& index, std::size_t term_id,
                                const std::vector<std::string>& entity_words, const EmbeddingProvider& provider,
                                const MatcherConfig& config);

struct MatchResult {
    std::string cid;
    std::string concept_type;
    double score = 0.0;
    std::size_t term_id = 0;

    bool operator==(const MatchResult&) const = default;
};

/// Scores every candidate, drops scores <= min_score and terms without
/// countable words, sorts by score descending then term id, keeps top_k.
std::vector<MatchResult> match(const EntitySpan& entity, const StemIndex& index, const EmbeddingProvider& provider,
                               const MatcherConfig& config);

}  // namespace cce
