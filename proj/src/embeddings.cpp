#include "cce/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include "cce/error.hpp"
#include "cce/rng.hpp"
#include "cce/text.hpp"

namespace cce {

namespace {

bool parse_double(const std::string& s, double& out) {
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_size(const std::string& s, std::size_t& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

void append_double(std::string& out, double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

}  // namespace

EmbeddingProvider::EmbeddingProvider(std::size_t dimension, OovMode oov_mode)
    : dim_(dimension), oov_mode_(oov_mode) {
    if (dimension == 0) throw DimensionMismatch("embedding dimension must be positive");
}

bool EmbeddingProvider::contains(std::string_view word) const { return vocab_.find(word) != vocab_.end(); }

void EmbeddingProvider::add(std::string word, Eigen::VectorXd vec) {
    if (static_cast<std::size_t>(vec.size()) != dim_) {
        throw DimensionMismatch("vector for '" + word + "' has length " + std::to_string(vec.size()) +
                                ", expected " + std::to_string(dim_));
    }
    vocab_.insert_or_assign(std::move(word), std::move(vec));
}

Eigen::VectorXd EmbeddingProvider::hashed_vector(std::string_view word) const {
    const std::string padded = "<" + std::string(word) + ">";
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim_));
    std::size_t grams = 0;
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
        std::uint64_t state = fnv1a64(std::string_view(padded).substr(i, 3));
        Eigen::VectorXd v(static_cast<Eigen::Index>(dim_));
        for (Eigen::Index j = 0; j < v.size(); ++j) {
            v[j] = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-52 - 1.0;
        }
        const double norm = v.norm();
        if (norm > 0.0) sum += v / norm;
        ++grams;
    }
    return grams ? Eigen::VectorXd(sum / static_cast<double>(grams)) : sum;
}

Eigen::VectorXd EmbeddingProvider::lookup(std::string_view word) const {
    if (auto it = vocab_.find(word); it != vocab_.end()) return it->second;
    if (oov_mode_ == OovMode::zero) return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim_));
    return hashed_vector(word);
}

SentenceEmbedding EmbeddingProvider::embed(const std::vector<std::string>& tokens) const {
    SentenceEmbedding x(static_cast<Eigen::Index>(tokens.size()), static_cast<Eigen::Index>(dim_));
    for (std::size_t i = 0; i < tokens.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = lookup(tokens[i]).transpose();
    return x;
}

EmbeddingProvider load_vectors(std::string_view text, OovMode oov_mode) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    std::size_t dim = 0;
    std::vector<std::pair<std::string, Eigen::VectorXd>> rows;
    bool first = true;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const std::string_view line = chomp(text.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        auto fields = split_whitespace(line);
        if (fields.empty()) continue;

        if (first) {
            first = false;
            std::size_t a = 0;
            std::size_t b = 0;
            if (fields.size() == 2 && parse_size(fields[0], a) && parse_size(fields[1], b)) continue;
        }
        if (fields.size() < 2) throw MalformedLine(line_no, "expected <word> <v1> ... <vd>");
        const std::size_t d = fields.size() - 1;
        if (dim == 0) dim = d;
        if (d != dim) {
            throw DimensionMismatch("line " + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                                    " values, found " + std::to_string(d));
        }
        Eigen::VectorXd v(static_cast<Eigen::Index>(d));
        for (std::size_t j = 0; j < d; ++j) {
            if (!parse_double(fields[j + 1], v[static_cast<Eigen::Index>(j)])) {
                throw MalformedLine(line_no, "bad number '" + fields[j + 1] + "'");
            }
        }
        rows.emplace_back(std::move(fields[0]), std::move(v));
    }
    if (rows.empty()) throw EmptyFile();
    EmbeddingProvider provider(dim, oov_mode);
    for (auto& [w, v] : rows) provider.add(std::move(w), std::move(v));
    return provider;
}

std::string serialize_vectors(const EmbeddingProvider& provider) {
    std::string out = std::to_string(provider.vocabulary_size()) + " " + std::to_string(provider.dimension()) + "\n";
    for (const auto& [word, vec] : provider.vocabulary()) {
        out += word;
        for (Eigen::Index j = 0; j < vec.size(); ++j) {
            out += ' ';
            append_double(out, vec[j]);
        }
        out += '\n';
    }
    return out;
}

EmbeddingProvider random_unit_vectors(const std::vector<std::string>& words, std::size_t dimension,
                                      std::uint64_t seed) {
    const std::set<std::string> distinct(words.begin(), words.end());
    EmbeddingProvider provider(dimension);
    Rng rng(seed);
    for (const std::string& w : distinct) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(dimension));
        double norm = 0.0;
        while (norm < 1e-6) {
            for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = rng.uniform(-1.0, 1.0);
            norm = v.norm();
        }
        provider.add(w, v / norm);
    }
    return provider;
}

double similarity(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    if (u.size() != v.size()) throw DimensionMismatch("similarity of vectors with different lengths");
    // sqrt(uu * vv) rather than |u| |v| so that similarity(u, u) is exactly 1.
    const double uu = u.dot(u);
    const double vv = v.dot(v);
    if (uu == 0.0 || vv == 0.0) return 0.0;
    return std::clamp(u.dot(v) / std::sqrt(uu * vv), -1.0, 1.0);
}

}  // namespace cce
