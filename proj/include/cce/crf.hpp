#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "cce/corpus.hpp"

namespace cce::crf {

/// Row/column indices of the transition matrix. The first kNumTags match
/// BioTag; START and STOP are the two virtual states.
inline constexpr Eigen::Index kStart = 3;
inline constexpr Eigen::Index kStop = 4;
inline constexpr Eigen::Index kStates = 5;

/// Emission scores, n x kNumTags.
using Emissions = Eigen::MatrixXd;
/// Transition scores A(from, to), kStates x kStates. Column START and row
/// STOP are -inf and never learned.
using Transitions = Eigen::MatrixXd;

/// Zero transitions with the frozen entries set to -inf.
Transitions make_transitions();
/// Re-applies the -inf pattern to column START and row STOP.
void freeze_transitions(Transitions& a);
/// True for entries that are learnable (not into START, not out of STOP).
bool is_learnable(Eigen::Index from, Eigen::Index to);

using TagPath = std::vector<BioTag>;

/// Sum of the n+1 transition scores START -> y1 -> ... -> yn -> STOP and the
/// n emission scores.
double sequence_score(const Emissions& p, const Transitions& a, const TagPath& y);

/// log of the sum of exp(score) over all 3^n tag sequences (forward algorithm).
double log_partition(const Emissions& p, const Transitions& a);

double log_likelihood(const Emissions& p, const Transitions& a, const TagPath& y);

struct Decoded {
    TagPath tags;
    double score = 0.0;
};

/// Highest scoring path. Ties go to the lower tag index (B < I < O) at every
/// backpointer and at the final state.
Decoded viterbi(const Emissions& p, const Transitions& a);

/// Gradient of the negative log-likelihood -log P(y | p) with respect to the
/// emissions and the transitions, via forward-backward marginals.
struct NllGradient {
    double nll = 0.0;
    Eigen::MatrixXd d_emissions;    // n x kNumTags
    Eigen::MatrixXd d_transitions;  // kStates x kStates, zero on frozen entries
};

NllGradient nll_gradient(const Emissions& p, const Transitions& a, const TagPath& y);

/// Per-position tag marginals P(y_i = j | p), n x kNumTags.
Eigen::MatrixXd marginals(const Emissions& p, const Transitions& a);

}  // namespace cce::crf
