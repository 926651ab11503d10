#include "cce/crf.hpp"

#include <cmath>
#include <limits>

#include "cce/error.hpp"

namespace cce::crf {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr Eigen::Index K = static_cast<Eigen::Index>(kNumTags);

double log_sum_exp(const double* v, Eigen::Index n) {
    double hi = kNegInf;
    for (Eigen::Index i = 0; i < n; ++i) hi = std::max(hi, v[i]);
    if (hi == kNegInf) return kNegInf;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) sum += std::exp(v[i] - hi);
    return hi + std::log(sum);
}

void check_shapes(const Emissions& p, const Transitions& a) {
    if (p.cols() != K) throw DimensionMismatch("emission matrix must have 3 columns");
    if (a.rows() != kStates || a.cols() != kStates) throw DimensionMismatch("transition matrix must be 5x5");
}

Eigen::Index idx(BioTag t) { return static_cast<Eigen::Index>(t); }

// alpha(i, j): log-sum of scores of all prefixes ending in tag j at position i,
// including the START transition.
Eigen::MatrixXd forward(const Emissions& p, const Transitions& a) {
    const Eigen::Index n = p.rows();
    Eigen::MatrixXd alpha(n, K);
    for (Eigen::Index j = 0; j < K; ++j) alpha(0, j) = a(kStart, j) + p(0, j);
    double terms[K];
    for (Eigen::Index i = 1; i < n; ++i) {
        for (Eigen::Index j = 0; j < K; ++j) {
            for (Eigen::Index prev = 0; prev < K; ++prev) terms[prev] = alpha(i - 1, prev) + a(prev, j);
            alpha(i, j) = p(i, j) + log_sum_exp(terms, K);
        }
    }
    return alpha;
}

// beta(i, j): log-sum of scores of all suffixes after position i given tag j
// there, including the STOP transition.
Eigen::MatrixXd backward(const Emissions& p, const Transitions& a) {
    const Eigen::Index n = p.rows();
    Eigen::MatrixXd beta(n, K);
    for (Eigen::Index j = 0; j < K; ++j) beta(n - 1, j) = a(j, kStop);
    double terms[K];
    for (Eigen::Index i = n - 2; i >= 0; --i) {
        for (Eigen::Index j = 0; j < K; ++j) {
            for (Eigen::Index next = 0; next < K; ++next) terms[next] = a(j, next) + p(i + 1, next) + beta(i + 1, next);
            beta(i, j) = log_sum_exp(terms, K);
        }
    }
    return beta;
}

double finish(const Eigen::MatrixXd& alpha, const Transitions& a) {
    const Eigen::Index last = alpha.rows() - 1;
    double terms[K];
    for (Eigen::Index j = 0; j < K; ++j) terms[j] = alpha(last, j) + a(j, kStop);
    return log_sum_exp(terms, K);
}

}  // namespace

Transitions make_transitions() {
    Transitions a = Transitions::Zero(kStates, kStates);
    freeze_transitions(a);
    return a;
}

void freeze_transitions(Transitions& a) {
    a.col(kStart).setConstant(kNegInf);
    a.row(kStop).setConstant(kNegInf);
}

bool is_learnable(Eigen::Index from, Eigen::Index to) { return to != kStart && from != kStop; }

double sequence_score(const Emissions& p, const Transitions& a, const TagPath& y) {
    check_shapes(p, a);
    if (static_cast<Eigen::Index>(y.size()) != p.rows()) throw DimensionMismatch("tag path length differs from emissions");
    if (y.empty()) return a(kStart, kStop);
    double score = a(kStart, idx(y.front()));
    for (std::size_t i = 0; i < y.size(); ++i) {
        score += p(static_cast<Eigen::Index>(i), idx(y[i]));
        if (i + 1 < y.size()) score += a(idx(y[i]), idx(y[i + 1]));
    }
    return score + a(idx(y.back()), kStop);
}

double log_partition(const Emissions& p, const Transitions& a) {
    check_shapes(p, a);
    if (p.rows() == 0) return a(kStart, kStop);
    return finish(forward(p, a), a);
}

double log_likelihood(const Emissions& p, const Transitions& a, const TagPath& y) {
    return sequence_score(p, a, y) - log_partition(p, a);
}

Decoded viterbi(const Emissions& p, const Transitions& a) {
    check_shapes(p, a);
    const Eigen::Index n = p.rows();
    Decoded out;
    if (n == 0) {
        out.score = a(kStart, kStop);
        return out;
    }
    Eigen::MatrixXd best(n, K);
    Eigen::MatrixXi back = Eigen::MatrixXi::Zero(n, K);
    for (Eigen::Index j = 0; j < K; ++j) best(0, j) = a(kStart, j) + p(0, j);
    for (Eigen::Index i = 1; i < n; ++i) {
        for (Eigen::Index j = 0; j < K; ++j) {
            Eigen::Index arg = 0;
            double top = best(i - 1, 0) + a(0, j);
            for (Eigen::Index prev = 1; prev < K; ++prev) {
                const double s = best(i - 1, prev) + a(prev, j);
                if (s > top) {
                    top = s;
                    arg = prev;
                }
            }
            best(i, j) = top + p(i, j);
            back(i, j) = static_cast<int>(arg);
        }
    }
    Eigen::Index last = 0;
    double top = best(n - 1, 0) + a(0, kStop);
    for (Eigen::Index j = 1; j < K; ++j) {
        const double s = best(n - 1, j) + a(j, kStop);
        if (s > top) {
            top = s;
            last = j;
        }
    }
    out.tags.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        out.tags[static_cast<std::size_t>(i)] = static_cast<BioTag>(last);
        if (i > 0) last = back(i, last);
    }
    // Re-summed in path order so the score matches sequence_score bit for bit.
    out.score = sequence_score(p, a, out.tags);
    return out;
}

Eigen::MatrixXd marginals(const Emissions& p, const Transitions& a) {
    check_shapes(p, a);
    const Eigen::Index n = p.rows();
    if (n == 0) return Eigen::MatrixXd(0, K);
    const Eigen::MatrixXd alpha = forward(p, a);
    const Eigen::MatrixXd beta = backward(p, a);
    const double log_z = finish(alpha, a);
    return (alpha + beta).array().unaryExpr([log_z](double v) { return std::exp(v - log_z); }).matrix();
}

NllGradient nll_gradient(const Emissions& p, const Transitions& a, const TagPath& y) {
    check_shapes(p, a);
    const Eigen::Index n = p.rows();
    if (static_cast<Eigen::Index>(y.size()) != n) throw DimensionMismatch("tag path length differs from emissions");

    NllGradient g;
    g.d_emissions = Eigen::MatrixXd::Zero(n, K);
    g.d_transitions = Eigen::MatrixXd::Zero(kStates, kStates);
    if (n == 0) return g;

    const Eigen::MatrixXd alpha = forward(p, a);
    const Eigen::MatrixXd beta = backward(p, a);
    const double log_z = finish(alpha, a);
    g.nll = log_z - sequence_score(p, a, y);

    // Expected counts.
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < K; ++j) g.d_emissions(i, j) = std::exp(alpha(i, j) + beta(i, j) - log_z);
    }
    for (Eigen::Index j = 0; j < K; ++j) {
        g.d_transitions(kStart, j) = g.d_emissions(0, j);
        g.d_transitions(j, kStop) = g.d_emissions(n - 1, j);
    }
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        for (Eigen::Index from = 0; from < K; ++from) {
            for (Eigen::Index to = 0; to < K; ++to) {
                g.d_transitions(from, to) +=
                    std::exp(alpha(i, from) + a(from, to) + p(i + 1, to) + beta(i + 1, to) - log_z);
            }
        }
    }

    // Minus observed counts.
    g.d_transitions(kStart, idx(y.front())) -= 1.0;
    g.d_transitions(idx(y.back()), kStop) -= 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto yi = idx(y[static_cast<std::size_t>(i)]);
        g.d_emissions(i, yi) -= 1.0;
        if (i + 1 < n) g.d_transitions(yi, idx(y[static_cast<std::size_t>(i + 1)])) -= 1.0;
    }
    return g;
}

}  // namespace cce::crf
