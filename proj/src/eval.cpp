#include "cce/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <future>
#include <set>
#include <utility>

#include <nlohmann/json.hpp>

#include "cce/error.hpp"
#include "cce/tagger.hpp"

namespace cce {

namespace {

void check_aligned(const Corpus& gold, const Corpus& pred) {
    if (gold.size() != pred.size()) {
        throw AlignmentError("gold has " + std::to_string(gold.size()) + " sentences, prediction has " +
                             std::to_string(pred.size()));
    }
    for (std::size_t s = 0; s < gold.size(); ++s) {
        const auto& g = gold.sentences[s];
        const auto& p = pred.sentences[s];
        if (g.tokens.size() != p.tokens.size() || g.tags.size() != p.tags.size() || p.tags.size() != p.tokens.size()) {
            throw AlignmentError("sentence " + std::to_string(s + 1) + ": length differs");
        }
        for (std::size_t i = 0; i < g.tokens.size(); ++i) {
            if (g.tokens[i].text != p.tokens[i].text) {
                throw AlignmentError("sentence " + std::to_string(s + 1) + ": token " + std::to_string(i) + " differs");
            }
        }
    }
}

std::string fmt_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string fmt_fixed(double v, int places) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", places, v);
    return buf;
}

}  // namespace

EvalReport make_report(std::size_t tp, std::size_t fp, std::size_t fn) {
    EvalReport r{tp, fp, fn, 0.0, 0.0, 0.0};
    if (tp + fp > 0) r.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (tp + fn > 0) r.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (r.precision + r.recall > 0.0) r.micro_f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    return r;
}

EvalReport micro_f1(const Corpus& gold, const Corpus& pred, EvalMode mode) {
    check_aligned(gold, pred);
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    for (std::size_t s = 0; s < gold.size(); ++s) {
        const auto& g = gold.sentences[s];
        const auto& p = pred.sentences[s];
        if (mode == EvalMode::token) {
            for (std::size_t i = 0; i < g.tags.size(); ++i) {
                const bool gold_entity = g.tags[i] != BioTag::O;
                const bool pred_entity = p.tags[i] != BioTag::O;
                const bool same = g.tags[i] == p.tags[i];
                if (pred_entity && same) ++tp;
                if (pred_entity && !same) ++fp;
                if (gold_entity && !same) ++fn;
            }
            continue;
        }
        std::set<std::pair<std::size_t, std::size_t>> gold_spans;
        for (const auto& e : extract_entities(g)) gold_spans.emplace(e.start, e.end);
        std::size_t matched = 0;
        for (const auto& e : extract_entities(p)) {
            if (gold_spans.count({e.start, e.end})) {
                ++tp;
                ++matched;
            } else {
                ++fp;
            }
        }
        fn += gold_spans.size() - matched;
    }
    return make_report(tp, fp, fn);
}

double token_accuracy(const Corpus& gold, const Corpus& pred) {
    check_aligned(gold, pred);
    std::size_t total = 0;
    std::size_t right = 0;
    for (std::size_t s = 0; s < gold.size(); ++s) {
        for (std::size_t i = 0; i < gold.sentences[s].tags.size(); ++i) {
            ++total;
            if (gold.sentences[s].tags[i] == pred.sentences[s].tags[i]) ++right;
        }
    }
    return total == 0 ? 1.0 : static_cast<double>(right) / static_cast<double>(total);
}

std::size_t HyperSpace::cell_count() const {
    return hidden_sizes.size() * learning_rates.size() * batch_sizes.size() * providers.size();
}

std::vector<HyperConfig> enumerate(const HyperSpace& space) {
    std::vector<HyperConfig> out;
    out.reserve(space.cell_count());
    for (const auto& provider : space.providers) {
        for (std::size_t hidden : space.hidden_sizes) {
            for (double lr : space.learning_rates) {
                for (std::size_t batch : space.batch_sizes) out.push_back({provider, hidden, lr, batch});
            }
        }
    }
    return out;
}

std::size_t GridReport::total_runs() const {
    std::size_t n = 0;
    for (const auto& r : table) n += r.runs.size();
    return n;
}

GridReport grid_search(const HyperSpace& space, const Corpus& train_corpus, const Corpus& dev,
                       const ProviderFactory& providers, const GridOptions& options) {
    if (space.cell_count() == 0) throw DataError("hyperparameter space has an empty dimension");
    if (options.evals_per_config == 0) throw DataError("evals_per_config must be positive");

    const std::vector<HyperConfig> cells = enumerate(space);
    std::vector<HyperResult> results(cells.size());

    auto run_cell = [&](std::size_t c) {
        HyperResult& res = results[c];
        res.config = cells[c];
        double sum = 0.0;
        std::size_t ok = 0;
        for (std::size_t r = 0; r < options.evals_per_config; ++r) {
            RunScore score;
            score.seed = options.seed + r;
            try {
                TrainConfig cfg;
                cfg.hidden_size = res.config.hidden_size;
                cfg.learning_rate = res.config.learning_rate;
                cfg.batch_size = res.config.batch_size;
                cfg.epochs = options.epochs;
                cfg.dropout = options.dropout;
                cfg.seed = score.seed;
                const EmbeddingProvider& provider = providers(res.config.provider);
                const TrainResult tr = train(train_corpus, dev, provider, cfg);
                score.dev_f1 = micro_f1(dev, predict_corpus(tr.params, provider, dev)).micro_f1;
                sum += score.dev_f1;
                ++ok;
            } catch (const std::exception& e) {
                score.error = e.what();
                res.failed = true;
            }
            res.runs.push_back(std::move(score));
        }
        res.mean_dev_f1 = ok ? sum / static_cast<double>(ok) : 0.0;
    };

    const std::size_t threads = std::max<std::size_t>(1, options.threads);
    if (threads == 1) {
        for (std::size_t c = 0; c < cells.size(); ++c) run_cell(c);
    } else {
        // Results are written by cell index, so completion order is irrelevant.
        for (std::size_t start = 0; start < cells.size(); start += threads) {
            std::vector<std::future<void>> jobs;
            for (std::size_t c = start; c < std::min(cells.size(), start + threads); ++c) {
                jobs.push_back(std::async(std::launch::async, run_cell, c));
            }
            for (auto& j : jobs) j.get();
        }
    }

    std::stable_sort(results.begin(), results.end(), [](const HyperResult& a, const HyperResult& b) {
        if (a.failed != b.failed) return !a.failed;
        return a.mean_dev_f1 > b.mean_dev_f1;
    });
    return GridReport{std::move(results)};
}

std::string grid_report_tsv(const GridReport& report) {
    std::string out = "provider\thidden_size\tlearning_rate\tbatch_size\trun\tseed\tdev_f1\tstatus\n";
    for (const auto& cell : report.table) {
        for (std::size_t r = 0; r < cell.runs.size(); ++r) {
            const auto& run = cell.runs[r];
            out += cell.config.provider + '\t' + std::to_string(cell.config.hidden_size) + '\t' +
                   fmt_double(cell.config.learning_rate) + '\t' + std::to_string(cell.config.batch_size) + '\t' +
                   std::to_string(r) + '\t' + std::to_string(run.seed) + '\t' + fmt_double(run.dev_f1) + '\t' +
                   (run.error.empty() ? "ok" : "error") + '\n';
        }
    }
    return out;
}

std::string grid_report_json(const GridReport& report) {
    nlohmann::json j;
    j["version"] = "1";
    auto& rows = j["configs"] = nlohmann::json::array();
    for (const auto& cell : report.table) {
        nlohmann::json runs = nlohmann::json::array();
        for (const auto& run : cell.runs) {
            nlohmann::json rj{{"seed", run.seed}, {"dev_f1", run.dev_f1}};
            if (!run.error.empty()) rj["error"] = run.error;
            runs.push_back(std::move(rj));
        }
        rows.push_back({{"provider", cell.config.provider},
                        {"hidden_size", cell.config.hidden_size},
                        {"learning_rate", cell.config.learning_rate},
                        {"mini_batch_size", cell.config.batch_size},
                        {"mean_dev_f1", cell.mean_dev_f1},
                        {"failed", cell.failed},
                        {"runs", std::move(runs)}});
    }
    return j.dump(2) + "\n";
}

std::string grid_report_summary(const GridReport& report) {
    std::string out = std::to_string(report.table.size()) + " configs, " + std::to_string(report.total_runs()) + " runs\n";
    out += "rank  provider             hidden  lr      batch  mean_dev_f1\n";
    for (std::size_t i = 0; i < report.table.size(); ++i) {
        const auto& c = report.table[i];
        char line[256];
        std::snprintf(line, sizeof line, "%-5zu %-20s %-7zu %-7s %-6zu %s%s\n", i + 1, c.config.provider.c_str(),
                      c.config.hidden_size, fmt_double(c.config.learning_rate).c_str(), c.config.batch_size,
                      fmt_fixed(c.mean_dev_f1, 4).c_str(), c.failed ? "  (failed runs)" : "");
        out += line;
    }
    return out;
}

Table1Report table1_experiment(const Corpus& note_corpus, const Corpus& query_corpus,
                               const EmbeddingProvider& provider, const TrainConfig& config,
                               const std::vector<std::uint64_t>& seeds) {
    if (note_corpus.empty() || query_corpus.empty()) throw EmptyCorpus();
    if (seeds.empty()) throw DataError("table1 needs at least one seed");

    Table1Report report;
    for (std::uint64_t seed : seeds) {
        SplitSpec spec;
        spec.seed = seed;
        const SplitCorpus notes = split(note_corpus, spec);
        const SplitCorpus queries = split(query_corpus, spec);
        const SplitCorpus hybrid = merge_hybrid(notes, queries, seed);

        TrainConfig cfg = config;
        cfg.seed = seed;
        const TrainResult hybrid_model = train(hybrid.train, hybrid.dev, provider, cfg);
        const TrainResult note_model = train(notes.train, notes.dev, provider, cfg);

        auto score = [&](const TaggerParams& params, const Corpus& test) {
            return micro_f1(test, predict_corpus(params, provider, test)).micro_f1;
        };
        Table1Row row;
        row.seed = seed;
        row.hybrid_on_query = score(hybrid_model.params, queries.test);
        row.hybrid_on_note = score(hybrid_model.params, notes.test);
        row.note_only_on_query = score(note_model.params, queries.test);
        row.note_only_on_note = score(note_model.params, notes.test);
        report.rows.push_back(row);
    }
    const double n = static_cast<double>(report.rows.size());
    for (const auto& r : report.rows) {
        report.mean.hybrid_on_query += r.hybrid_on_query / n;
        report.mean.hybrid_on_note += r.hybrid_on_note / n;
        report.mean.note_only_on_query += r.note_only_on_query / n;
        report.mean.note_only_on_note += r.note_only_on_note / n;
    }
    return report;
}

std::string table1_tsv(const Table1Report& report) {
    std::string out = "seed\tmodel\ttest_set\tmicro_f1\n";
    for (const auto& r : report.rows) {
        const std::string seed = std::to_string(r.seed);
        out += seed + "\thybrid\tquery_style\t" + fmt_double(r.hybrid_on_query) + '\n';
        out += seed + "\thybrid\tnote_style\t" + fmt_double(r.hybrid_on_note) + '\n';
        out += seed + "\tnote_only\tquery_style\t" + fmt_double(r.note_only_on_query) + '\n';
        out += seed + "\tnote_only\tnote_style\t" + fmt_double(r.note_only_on_note) + '\n';
    }
    return out;
}

std::string table1_json(const Table1Report& report) {
    auto row_json = [](const Table1Row& r) {
        return nlohmann::json{{"hybrid", {{"query_style", r.hybrid_on_query}, {"note_style", r.hybrid_on_note}}},
                              {"note_only", {{"query_style", r.note_only_on_query}, {"note_style", r.note_only_on_note}}}};
    };
    nlohmann::json j;
    j["version"] = "1";
    auto& rows = j["seeds"] = nlohmann::json::array();
    for (const auto& r : report.rows) {
        nlohmann::json rj = row_json(r);
        rj["seed"] = r.seed;
        rows.push_back(std::move(rj));
    }
    j["mean"] = row_json(report.mean);
    return j.dump(2) + "\n";
}

std::string table1_summary(const Table1Report& report) {
    std::string out = "model       query_style  note_style\n";
    out += "hybrid      " + fmt_fixed(report.mean.hybrid_on_query, 3) + "        " +
           fmt_fixed(report.mean.hybrid_on_note, 3) + "\n";
    out += "note_only   " + fmt_fixed(report.mean.note_only_on_query, 3) + "        " +
           fmt_fixed(report.mean.note_only_on_note, 3) + "\n";
    out += "(mean span micro-F1 over " + std::to_string(report.rows.size()) + " seeds)\n";
    return out;
}

}  // namespace cce
