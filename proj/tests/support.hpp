#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "cce/corpus.hpp"
#include "cce/crf.hpp"
#include "cce/embeddings.hpp"
#include "cce/matcher.hpp"
#include "cce/rng.hpp"
#include "cce/stemmer.hpp"
#include "cce/tagger.hpp"
#include "cce/text.hpp"

namespace cce::testing {

inline std::string data_path(const std::string& name) { return std::string(CCE_DATA_DIR) + "/" + name; }

/// Calls f on each of the 3^n tag paths in lexicographic order.
inline void for_each_path(std::size_t n, const std::function<void(const crf::TagPath&)>& f) {
    crf::TagPath y(n, BioTag::B);
    for (;;) {
        f(y);
        std::size_t i = n;
        while (i > 0) {
            --i;
            if (y[i] != BioTag::O) {
                y[i] = static_cast<BioTag>(static_cast<int>(y[i]) + 1);
                break;
            }
            y[i] = BioTag::B;
            if (i == 0) return;
        }
        if (n == 0) return;
    }
}

inline double brute_log_partition(const crf::Emissions& p, const crf::Transitions& a) {
    std::vector<double> scores;
    for_each_path(static_cast<std::size_t>(p.rows()), [&](const crf::TagPath& y) {
        scores.push_back(crf::sequence_score(p, a, y));
    });
    double m = -std::numeric_limits<double>::infinity();
    for (double s : scores) m = std::max(m, s);
    double sum = 0.0;
    for (double s : scores) sum += std::exp(s - m);
    return m + std::log(sum);
}

/// Highest scoring path; the first in lexicographic order among ties, which is
/// the lower-index preference when scores tie.
inline crf::Decoded brute_viterbi(const crf::Emissions& p, const crf::Transitions& a) {
    crf::Decoded best;
    best.score = -std::numeric_limits<double>::infinity();
    for_each_path(static_cast<std::size_t>(p.rows()), [&](const crf::TagPath& y) {
        const double s = crf::sequence_score(p, a, y);
        if (s > best.score) best = {y, s};
    });
    return best;
}

inline Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double lo, double hi) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(lo, hi);
    }
    return m;
}

inline crf::Transitions random_transitions(Rng& rng, double lo, double hi) {
    crf::Transitions a = random_matrix(rng, crf::kStates, crf::kStates, lo, hi);
    crf::freeze_transitions(a);
    return a;
}

/// Random BIO-valid tag sequence.
inline std::vector<BioTag> random_bio(Rng& rng, std::size_t n) {
    std::vector<BioTag> tags(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool can_continue = i > 0 && tags[i - 1] != BioTag::O;
        const auto r = rng.below(can_continue ? 3 : 2);
        if (r == 0) {
            tags[i] = BioTag::B;
        } else if (r == 1) {
            tags[i] = BioTag::O;
        } else {
            tags[i] = BioTag::I;
        }
    }
    return tags;
}

inline std::vector<std::string> numbered_words(std::size_t n, const std::string& prefix = "w") {
    std::vector<std::string> words;
    for (std::size_t i = 0; i < n; ++i) words.push_back(prefix + std::to_string(i));
    return words;
}

struct GradCheck {
    double max_rel_error = 0.0;
    std::size_t checked = 0;
    std::string worst;  // tensor(row,col) with the largest error
};

/// Central finite differences of mean_nll against gradients() over every
/// learnable entry. Relative error is |a - n| / max(|a|, |n|, floor).
inline GradCheck check_gradients(const TaggerParams& params, const std::vector<const Example*>& batch,
                                 double step = 1e-5, double floor = 1e-6) {
    const BatchGradient analytic = gradients(params, batch);
    const auto grads = analytic.grad.tensors();
    TaggerParams probe = params;
    auto tensors = probe.tensors();
    GradCheck out;
    for (std::size_t k = 0; k < TaggerParams::kTensorCount; ++k) {
        Eigen::MatrixXd& t = *tensors[k].second;
        const Eigen::MatrixXd& g = *grads[k].second;
        const bool is_transitions = tensors[k].first == "transitions";
        for (Eigen::Index i = 0; i < t.rows(); ++i) {
            for (Eigen::Index j = 0; j < t.cols(); ++j) {
                if (is_transitions && !crf::is_learnable(i, j)) continue;
                const double keep = t(i, j);
                t(i, j) = keep + step;
                const double up = mean_nll(probe, batch);
                t(i, j) = keep - step;
                const double down = mean_nll(probe, batch);
                t(i, j) = keep;
                const double numeric = (up - down) / (2.0 * step);
                const double err = std::abs(numeric - g(i, j)) /
                                   std::max({std::abs(numeric), std::abs(g(i, j)), floor});
                ++out.checked;
                if (err > out.max_rel_error) {
                    out.max_rel_error = err;
                    out.worst = std::string(tensors[k].first) + "(" + std::to_string(i) + "," + std::to_string(j) + ")";
                }
            }
        }
    }
    return out;
}

// Scores every glossary term, then keeps those sharing a non-stopword stem
// with the entity. Shares only similarity() with the library.
inline std::vector<MatchResult> brute_force_match(const std::string& entity_text, const Glossary& g,
                                           const EmbeddingProvider& provider, const MatcherConfig& cfg) {
    const std::vector<std::string> words = split_whitespace(to_lower(entity_text));
    std::set<std::string> entity_stems;
    for (const auto& w : words) {
        if (!cfg.stopwords.count(w)) entity_stems.insert(stem(w));
    }
    std::vector<MatchResult> out;
    for (std::size_t id = 0; id < g.size(); ++id) {
        const GlossaryTerm& t = g[id];
        double total = 0.0;
        std::size_t m = 0;
        bool overlap = false;
        for (const auto& tw : t.words) {
            if (!cfg.stopwords.count(tw) && entity_stems.count(stem(tw))) overlap = true;
            if (cfg.extra_stopwords.count(tw)) continue;
            ++m;
            double best = -2.0;
            for (const auto& ew : words) best = std::max(best, similarity(provider.lookup(tw), provider.lookup(ew)));
            if (best > cfg.s_c) total += best;
        }
        if (!overlap || m == 0) continue;
        const double score = total / static_cast<double>(m);
        if (score > cfg.min_score) out.push_back({t.cid, t.concept_type, score, id});
    }
    std::stable_sort(out.begin(), out.end(), [](const MatchResult& a, const MatchResult& b) { return a.score > b.score; });
    if (out.size() > cfg.top_k) out.resize(cfg.top_k);
    return out;
}

// Spans as (start, end); an I without an open span starts one.
inline std::set<std::pair<std::size_t, std::size_t>> oracle_spans(const std::vector<BioTag>& tags) {
    std::set<std::pair<std::size_t, std::size_t>> out;
    std::size_t start = 0;
    bool open = false;
    for (std::size_t i = 0; i <= tags.size(); ++i) {
        const BioTag t = i < tags.size() ? tags[i] : BioTag::O;
        if (open && t != BioTag::I) {
            out.emplace(start, i);
            open = false;
        }
        if (t == BioTag::B || (t == BioTag::I && !open)) {
            start = i;
            open = true;
        }
    }
    return out;
}

}  // namespace cce::testing
