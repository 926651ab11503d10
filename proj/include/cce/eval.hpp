#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cce/corpus.hpp"
#include "cce/embeddings.hpp"

namespace cce {

struct TrainConfig;

struct EvalReport {
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;
    std::size_t false_negatives = 0;
    double precision = 0.0;
    double recall = 0.0;
    double micro_f1 = 0.0;
};

/// span: exact (start, end) match of decoded entities (CoNLL style).
/// token: per-token agreement on non-O tags.
enum class EvalMode { span, token };

/// P/R/F1 from pooled counts; zero denominators give zero.
EvalReport make_report(std::size_t tp, std::size_t fp, std::size_t fn);

/// Pooled micro-F1 over aligned corpora. Throws AlignmentError when sentence
/// counts or token texts differ. Predicted tags are decoded leniently.
EvalReport micro_f1(const Corpus& gold, const Corpus& pred, EvalMode mode = EvalMode::span);

/// Fraction of tokens whose predicted tag equals gold.
double token_accuracy(const Corpus& gold, const Corpus& pred);

// ---------------------------------------------------------------------------
// Grid search

struct HyperSpace {
    std::vector<std::size_t> hidden_sizes;
    std::vector<double> learning_rates;
    std::vector<std::size_t> batch_sizes;
    std::vector<std::string> providers;

    std::size_t cell_count() const;
};

struct HyperConfig {
    std::string provider;
    std::size_t hidden_size = 0;
    double learning_rate = 0.0;
    std::size_t batch_size = 0;
};

struct RunScore {
    std::uint64_t seed = 0;
    double dev_f1 = 0.0;
    std::string error;  // empty on success
};

struct HyperResult {
    HyperConfig config;
    double mean_dev_f1 = 0.0;
    std::vector<RunScore> runs;
    bool failed = false;  // any run raised
};

struct GridOptions {
    std::size_t evals_per_config = 3;
    std::size_t epochs = 10;
    std::uint64_t seed = 0;
    double dropout = 0.0;
    std::size_t threads = 1;
};

struct GridReport {
    /// Ranked by mean dev F1, best first; failed cells last; ties keep
    /// enumeration order (provider, hidden size, learning rate, batch size).
    std::vector<HyperResult> table;
    const HyperResult& best() const { return table.front(); }
    std::size_t total_runs() const;
};

using ProviderFactory = std::function<const EmbeddingProvider&(const std::string& name)>;

/// Cartesian product of the space in enumeration order.
std::vector<HyperConfig> enumerate(const HyperSpace& space);

/// Run r of every cell uses seed + r. Errors inside a cell are recorded in
/// that cell and do not stop the grid.
GridReport grid_search(const HyperSpace& space, const Corpus& train, const Corpus& dev,
                       const ProviderFactory& providers, const GridOptions& options);

/// One row per (config, run): provider, hidden_size, learning_rate,
/// batch_size, run, seed, dev_f1, status. Tab separated with a header.
std::string grid_report_tsv(const GridReport& report);
std::string grid_report_json(const GridReport& report);
std::string grid_report_summary(const GridReport& report);

// ---------------------------------------------------------------------------
// Hybrid vs note-only comparison

struct Table1Row {
    std::uint64_t seed = 0;
    double hybrid_on_query = 0.0;
    double hybrid_on_note = 0.0;
    double note_only_on_query = 0.0;
    double note_only_on_note = 0.0;
};

struct Table1Report {
    std::vector<Table1Row> rows;
    Table1Row mean;  // seed field unused
};

/// For each seed: split both corpora 7:2:1 with that seed, merge the splits
/// into a hybrid set, train a hybrid model and a note-only model with the
/// same config (seeded with the run seed) and score both on the query-style
/// and the note-style test splits.
Table1Report table1_experiment(const Corpus& note_corpus, const Corpus& query_corpus,
                               const EmbeddingProvider& provider, const TrainConfig& config,
                               const std::vector<std::uint64_t>& seeds);

std::string table1_tsv(const Table1Report& report);
std::string table1_json(const Table1Report& report);
std::string table1_summary(const Table1Report& report);

}  // namespace cce
