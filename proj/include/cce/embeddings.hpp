#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace cce {

/// n x d, row i is the vector of token i.
using SentenceEmbedding = Eigen::MatrixXd;

enum class OovMode { hashed_ngram, zero };

/// Static word vectors with a deterministic fallback for unknown words.
/// Lookups never depend on the surrounding sentence; embed() takes whole
/// sentences so a contextual back end could slot in behind the same call.
class EmbeddingProvider {
public:
    EmbeddingProvider(std::size_t dimension, OovMode oov_mode = OovMode::hashed_ngram);

    std::size_t dimension() const { return dim_; }
    OovMode oov_mode() const { return oov_mode_; }
    void set_oov_mode(OovMode mode) { oov_mode_ = mode; }
    std::size_t vocabulary_size() const { return vocab_.size(); }
    bool contains(std::string_view word) const;

    /// Adds or replaces a vector; throws DimensionMismatch on wrong length.
    void add(std::string word, Eigen::VectorXd vec);

    Eigen::VectorXd lookup(std::string_view word) const;
    SentenceEmbedding embed(const std::vector<std::string>& tokens) const;

    /// Mean of unit vectors derived from the FNV-1a hashes of the padded
    /// word's character 3-grams ("<w>" bytes), each hash expanded to d
    /// uniform(-1, 1) values with SplitMix64 and normalised.
    Eigen::VectorXd hashed_vector(std::string_view word) const;

    /// Vocabulary in sorted order, for serialization.
    const std::map<std::string, Eigen::VectorXd, std::less<>>& vocabulary() const { return vocab_; }

private:
    std::size_t dim_;
    OovMode oov_mode_;
    std::map<std::string, Eigen::VectorXd, std::less<>> vocab_;
};

/// Plain-text vectors: `<word> <v1> ... <vd>` per line, with an optional
/// `<vocab_size> <d>` header line.
EmbeddingProvider load_vectors(std::string_view text, OovMode oov_mode = OovMode::hashed_ngram);
std::string serialize_vectors(const EmbeddingProvider& provider);

/// Independent random unit vectors for each distinct word.
EmbeddingProvider random_unit_vectors(const std::vector<std::string>& words, std::size_t dimension,
                                      std::uint64_t seed);

/// Cosine similarity; 0 when either vector is all zero.
double similarity(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

}  // namespace cce
