#include "cce/cli.hpp"

#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "cce/corpus.hpp"
#include "cce/embeddings.hpp"
#include "cce/error.hpp"
#include "cce/eval.hpp"
#include "cce/matcher.hpp"
#include "cce/service.hpp"
#include "cce/synthesizer.hpp"
#include "cce/tagger.hpp"
#include "cce/text.hpp"

#include <CLI11.hpp>
#include <httplib.h>

namespace cce {

namespace {

// Prefixes any data error raised while loading `path` with the path.
template <typename F>
auto with_path(const std::string& path, F&& load) {
    try {
        return load(read_file(path));
    } catch (const IoError&) {
        throw;
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

Corpus load_corpus(const std::string& path) {
    return with_path(path, [&](const std::string& text) { return parse_corpus(text, path); });
}

Glossary load_glossary(const std::string& path) {
    return with_path(path, [](const std::string& text) { return parse_glossary(text); });
}

EmbeddingProvider load_provider(const std::string& path, bool zero_oov) {
    return with_path(path, [zero_oov](const std::string& text) {
        return load_vectors(text, zero_oov ? OovMode::zero : OovMode::hashed_ngram);
    });
}

std::vector<std::string> load_templates(const std::string& path) {
    if (path.empty()) return default_note_templates();
    return with_path(path, [](const std::string& text) { return parse_templates(text); });
}

// Up to two corpora; two are merged with merge_hybrid semantics.
Corpus load_merged(const std::vector<std::string>& paths, std::uint64_t seed) {
    Corpus merged = load_corpus(paths.at(0));
    for (std::size_t i = 1; i < paths.size(); ++i) merged = merge_corpora(merged, load_corpus(paths[i]), seed);
    return merged;
}

struct TrainFlags {
    std::size_t hidden = 256;
    double lr = 0.05;
    std::size_t batch = 32;
    std::size_t epochs = 10;
    double dropout = 0.0;
    std::uint64_t seed = 0;
    double clip = 5.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--hidden-size", hidden, "LSTM hidden size")->capture_default_str();
        cmd->add_option("--lr", lr, "SGD learning rate")->capture_default_str();
        cmd->add_option("--batch", batch, "mini-batch size")->capture_default_str();
        cmd->add_option("--epochs", epochs, "training epochs")->capture_default_str();
        cmd->add_option("--dropout", dropout, "dropout on BiLSTM output")->capture_default_str();
        cmd->add_option("--seed", seed, "random seed")->capture_default_str();
        cmd->add_option("--clip", clip, "global gradient-norm clip (0 disables)")->capture_default_str();
    }

    TrainConfig config() const {
        TrainConfig c;
        c.hidden_size = hidden;
        c.learning_rate = lr;
        c.batch_size = batch;
        c.epochs = epochs;
        c.dropout = dropout;
        c.seed = seed;
        c.clip_norm = clip;
        return c;
    }
};

struct MatchFlags {
    double s_c = 0.6;
    double min_score = 0.0;
    std::size_t top_k = 10;
    std::string stopwords_path;
    std::string extra_stopwords_path;

    void attach(CLI::App* cmd) {
        cmd->add_option("--s-c", s_c, "word similarity cutoff")->capture_default_str();
        cmd->add_option("--min-score", min_score, "drop candidates scoring at or below this")->capture_default_str();
        cmd->add_option("--top-k", top_k, "matches kept per entity")->capture_default_str()->check(CLI::PositiveNumber);
        cmd->add_option("--stopwords", stopwords_path, "stopword list file (default: built-in)");
        cmd->add_option("--extra-stopwords", extra_stopwords_path,
                        "words excluded from term word counts (default: configuration, color)");
    }

    MatcherConfig config() const {
        MatcherConfig c;
        c.s_c = s_c;
        c.min_score = min_score;
        c.top_k = top_k;
        if (!stopwords_path.empty()) c.stopwords = parse_word_list(read_file(stopwords_path));
        if (!extra_stopwords_path.empty()) c.extra_stopwords = parse_word_list(read_file(extra_stopwords_path));
        return c;
    }
};

Engine load_engine(const std::string& model, const std::string& vectors, const std::string& glossary,
                   const MatchFlags& flags) {
    TaggerParams params = with_path(model, [](const std::string& bytes) { return parse_model(bytes); });
    return Engine(std::move(params), load_provider(vectors, false), load_glossary(glossary), flags.config());
}

template <typename T>
std::vector<T> parse_list(const std::string& csv) {
    std::vector<T> out;
    for (const std::string& f : split_fields(csv, ',')) {
        if (f.empty()) continue;
        std::istringstream ss(f);
        T v{};
        if (!(ss >> v) || !ss.eof()) throw CLI::ValidationError("bad list element '" + f + "'");
        out.push_back(v);
    }
    if (out.empty()) throw CLI::ValidationError("empty list '" + csv + "'");
    return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Clinical concept extraction: BiLSTM-CRF entity tagging and glossary term matching", "cce"};
    app.require_subcommand(1);

    // synthesize
    auto* synth = app.add_subcommand("synthesize", "generate a query-style or note-style corpus from a glossary");
    std::string synth_glossary, synth_mode = "query", synth_out, synth_templates;
    SynthesisConfig synth_cfg;
    synth_cfg.count = 100;
    synth->add_option("--glossary", synth_glossary, "glossary file")->required();
    synth->add_option("--mode", synth_mode, "query or note")->check(CLI::IsMember({"query", "note"}))->capture_default_str();
    synth->add_option("--count", synth_cfg.count, "sentences to generate")->capture_default_str();
    synth->add_option("--seed", synth_cfg.seed, "random seed")->capture_default_str();
    synth->add_option("--min-terms", synth_cfg.min_terms, "fewest terms per query")->capture_default_str();
    synth->add_option("--max-terms", synth_cfg.max_terms, "most terms per query")->capture_default_str();
    synth->add_option("--templates", synth_templates, "note template file (default: built-in templates)");
    synth->add_option("--out", synth_out, "output corpus file")->required();

    // vectors
    auto* vecs = app.add_subcommand("vectors", "write random unit vectors for a glossary/template vocabulary");
    std::string vec_glossary, vec_templates, vec_out;
    std::vector<std::string> vec_corpora;
    std::size_t vec_dim = 50;
    std::uint64_t vec_seed = 0;
    vecs->add_option("--glossary", vec_glossary, "glossary file")->required();
    vecs->add_option("--templates", vec_templates, "note template file (default: built-in templates)");
    vecs->add_option("--corpus", vec_corpora, "extra corpus files whose tokens get vectors");
    vecs->add_option("--dim", vec_dim, "vector dimension")->capture_default_str()->check(CLI::PositiveNumber);
    vecs->add_option("--seed", vec_seed, "random seed")->capture_default_str();
    vecs->add_option("--out", vec_out, "output vector file")->required();

    // split
    auto* split_cmd = app.add_subcommand("split", "shuffle and split a corpus 7:2:1 into train/dev/test files");
    std::string split_in, split_prefix;
    std::uint64_t split_seed = 0;
    split_cmd->add_option("--corpus", split_in, "input corpus")->required();
    split_cmd->add_option("--seed", split_seed, "shuffle seed")->capture_default_str();
    split_cmd->add_option("--out-prefix", split_prefix, "writes PREFIX.train, PREFIX.dev, PREFIX.test")->required();

    // train
    auto* train_cmd = app.add_subcommand("train", "train a BiLSTM-CRF tagger");
    std::vector<std::string> train_paths, dev_paths;
    std::string train_vectors, model_out, log_out;
    TrainFlags train_flags;
    train_cmd->add_option("--train", train_paths, "training corpus (twice for a hybrid set)")->required()->expected(1, 2);
    train_cmd->add_option("--dev", dev_paths, "dev corpus (twice for a hybrid set)")->expected(1, 2);
    train_cmd->add_option("--vectors", train_vectors, "word vector file")->required();
    train_cmd->add_option("--model-out", model_out, "model file to write")->required();
    train_cmd->add_option("--log", log_out, "write the per-epoch training log here");
    train_flags.attach(train_cmd);

    // tag
    auto* tag_cmd = app.add_subcommand("tag", "print BIO tags for queries");
    std::string tag_model, tag_vectors, tag_text;
    tag_cmd->add_option("--model", tag_model, "model file")->required();
    tag_cmd->add_option("--vectors", tag_vectors, "word vector file")->required();
    tag_cmd->add_option("text", tag_text, "query text (default: one query per stdin line)");

    // query
    auto* query_cmd = app.add_subcommand("query", "tag queries and rank glossary terms per entity");
    std::string q_model, q_vectors, q_glossary, q_text;
    bool q_json = false;
    MatchFlags q_flags;
    query_cmd->add_option("--model", q_model, "model file")->required();
    query_cmd->add_option("--vectors", q_vectors, "word vector file")->required();
    query_cmd->add_option("--glossary", q_glossary, "glossary file")->required();
    query_cmd->add_flag("--json", q_json, "emit JSON lines instead of the human listing");
    query_cmd->add_option("text", q_text, "query text (default: one query per stdin line)");
    q_flags.attach(query_cmd);

    // serve
    auto* serve_cmd = app.add_subcommand("serve", "HTTP query service");
    std::string s_model, s_vectors, s_glossary, s_host = "127.0.0.1";
    int s_port = 8080;
    MatchFlags s_flags;
    serve_cmd->add_option("--model", s_model, "model file")->required();
    serve_cmd->add_option("--vectors", s_vectors, "word vector file")->required();
    serve_cmd->add_option("--glossary", s_glossary, "glossary file")->required();
    serve_cmd->add_option("--host", s_host, "bind address")->capture_default_str();
    serve_cmd->add_option("--port", s_port, "port")->capture_default_str();
    s_flags.attach(serve_cmd);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "micro-F1 of a model on a corpus");
    std::string e_model, e_vectors, e_corpus, e_mode = "span", e_report;
    eval_cmd->add_option("--model", e_model, "model file")->required();
    eval_cmd->add_option("--vectors", e_vectors, "word vector file")->required();
    eval_cmd->add_option("--corpus", e_corpus, "gold corpus")->required();
    eval_cmd->add_option("--mode", e_mode, "span or token")->check(CLI::IsMember({"span", "token"}))->capture_default_str();
    eval_cmd->add_option("--report", e_report, "write the JSON report here");

    // hypersearch
    auto* hs_cmd = app.add_subcommand("hypersearch", "exhaustive grid search over tagger hyperparameters");
    std::vector<std::string> hs_train, hs_dev, hs_vectors;
    std::string hs_hidden = "128,256", hs_lrs = "0.05,0.1", hs_batches = "32,64,128", hs_tsv, hs_json;
    GridOptions hs_opts;
    hs_cmd->add_option("--train", hs_train, "training corpus (twice for a hybrid set)")->required()->expected(1, 2);
    hs_cmd->add_option("--dev", hs_dev, "dev corpus (twice for a hybrid set)")->required()->expected(1, 2);
    hs_cmd->add_option("--vectors", hs_vectors, "NAME=PATH embedding variant (repeatable)")->required();
    hs_cmd->add_option("--hidden-sizes", hs_hidden, "comma separated")->capture_default_str();
    hs_cmd->add_option("--lrs", hs_lrs, "comma separated")->capture_default_str();
    hs_cmd->add_option("--batches", hs_batches, "comma separated")->capture_default_str();
    hs_cmd->add_option("--evals", hs_opts.evals_per_config, "runs per config")->capture_default_str();
    hs_cmd->add_option("--epochs", hs_opts.epochs, "epochs per run")->capture_default_str();
    hs_cmd->add_option("--seed", hs_opts.seed, "base seed; run r uses seed + r")->capture_default_str();
    hs_cmd->add_option("--threads", hs_opts.threads, "cells trained concurrently")->capture_default_str();
    hs_cmd->add_option("--out-tsv", hs_tsv, "per-run table");
    hs_cmd->add_option("--out-json", hs_json, "full JSON report");

    // table1
    auto* t1_cmd = app.add_subcommand("table1", "hybrid vs note-only training comparison");
    std::string t1_notes, t1_queries, t1_vectors, t1_seeds = "1,2,3", t1_tsv, t1_json;
    TrainFlags t1_flags;
    t1_cmd->add_option("--notes", t1_notes, "note-style corpus")->required();
    t1_cmd->add_option("--queries", t1_queries, "query-style corpus")->required();
    t1_cmd->add_option("--vectors", t1_vectors, "word vector file")->required();
    t1_cmd->add_option("--seeds", t1_seeds, "comma separated run seeds")->capture_default_str();
    t1_cmd->add_option("--out-tsv", t1_tsv, "F1 cells as TSV");
    t1_cmd->add_option("--out-json", t1_json, "JSON report");
    t1_flags.attach(t1_cmd);

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*synth) {
            const Glossary glossary = load_glossary(synth_glossary);
            Corpus corpus = synth_mode == "query"
                                ? synthesize_query_corpus(glossary, synth_cfg)
                                : synthesize_note_corpus(glossary, load_templates(synth_templates), synth_cfg);
            write_file(synth_out, serialize_corpus(corpus));
            out << "wrote " << corpus.size() << " " << synth_mode << "-style sentences to " << synth_out << "\n";
        } else if (*vecs) {
            std::vector<std::string> words;
            const Glossary glossary = load_glossary(vec_glossary);
            for (const auto& t : glossary.terms()) words.insert(words.end(), t.words.begin(), t.words.end());
            for (const auto& tmpl : load_templates(vec_templates)) {
                for (const auto& chunk : split_whitespace(tmpl)) {
                    if (chunk == "{E}") continue;
                    for (auto& w : tokenize(chunk)) words.push_back(std::move(w));
                }
            }
            for (const auto& path : vec_corpora) {
                const Corpus corpus = load_corpus(path);
                for (const auto& s : corpus.sentences) {
                    for (const auto& t : s.tokens) words.push_back(to_lower(t.text));
                }
            }
            const EmbeddingProvider provider = random_unit_vectors(words, vec_dim, vec_seed);
            write_file(vec_out, serialize_vectors(provider));
            out << "wrote " << provider.vocabulary_size() << " vectors of dimension " << vec_dim << " to " << vec_out << "\n";
        } else if (*split_cmd) {
            SplitSpec spec;
            spec.seed = split_seed;
            const SplitCorpus parts = split(load_corpus(split_in), spec);
            write_file(split_prefix + ".train", serialize_corpus(parts.train));
            write_file(split_prefix + ".dev", serialize_corpus(parts.dev));
            write_file(split_prefix + ".test", serialize_corpus(parts.test));
            out << "train " << parts.train.size() << ", dev " << parts.dev.size() << ", test " << parts.test.size() << "\n";
        } else if (*train_cmd) {
            const Corpus train_corpus = load_merged(train_paths, train_flags.seed);
            const Corpus dev = dev_paths.empty() ? Corpus{} : load_merged(dev_paths, train_flags.seed + 1);
            const EmbeddingProvider provider = load_provider(train_vectors, false);
            TrainConfig cfg = train_flags.config();
            cfg.on_epoch = [&out, has_dev = !dev.empty()](const EpochRecord& r, const TaggerParams&) {
                out << "epoch " << r.epoch << "  train_nll " << r.train_nll;
                if (has_dev) out << "  dev_f1 " << r.dev_f1;
                out << "\n";
                return true;
            };
            const TrainResult result = train(train_corpus, dev, provider, cfg);
            save_model(result.params, model_out);
            if (!log_out.empty()) write_file(log_out, format_log(result.log));
            out << "best epoch " << result.best_epoch << "; model written to " << model_out << "\n";
        } else if (*tag_cmd) {
            const TaggerParams params = with_path(tag_model, [](const std::string& b) { return parse_model(b); });
            const EmbeddingProvider provider = load_provider(tag_vectors, false);
            auto run_one = [&](const std::string& text) {
                const TaggedSentence s = tag(params, provider, text);
                for (std::size_t i = 0; i < s.size(); ++i) {
                    out << (i ? " " : "") << s.tokens[i].text << "/" << tag_char(s.tags[i]);
                }
                out << "\n";
            };
            if (!tag_text.empty()) {
                run_one(tag_text);
            } else {
                for (std::string line; std::getline(in, line);) {
                    if (tokenize(line).empty()) continue;
                    run_one(line);
                }
            }
        } else if (*query_cmd) {
            const Engine engine = load_engine(q_model, q_vectors, q_glossary, q_flags);
            auto run_one = [&](const std::string& text) {
                const QueryResponse r = engine.run(text);
                out << (q_json ? format_json(r) + "\n" : format_human(r));
            };
            if (!q_text.empty()) {
                run_one(q_text);
            } else {
                for (std::string line; std::getline(in, line);) {
                    if (tokenize(line).empty()) {
                        if (!split_whitespace(line).empty()) err << "warning: skipping empty query\n";
                        continue;
                    }
                    run_one(line);
                }
            }
        } else if (*serve_cmd) {
            const Engine engine = load_engine(s_model, s_vectors, s_glossary, s_flags);
            auto server = make_server(engine);
            out << "listening on " << s_host << ":" << s_port << std::endl;
            if (!server->listen(s_host, s_port)) {
                err << "error: cannot listen on " << s_host << ":" << s_port << "\n";
                return kExitData;
            }
        } else if (*eval_cmd) {
            const TaggerParams params = with_path(e_model, [](const std::string& b) { return parse_model(b); });
            const EmbeddingProvider provider = load_provider(e_vectors, false);
            const Corpus gold = load_corpus(e_corpus);
            const EvalReport r =
                micro_f1(gold, predict_corpus(params, provider, gold), e_mode == "span" ? EvalMode::span : EvalMode::token);
            const nlohmann::json j{{"version", kWireVersion}, {"mode", e_mode}, {"true_positives", r.true_positives},
                                   {"false_positives", r.false_positives}, {"false_negatives", r.false_negatives},
                                   {"precision", r.precision}, {"recall", r.recall}, {"micro_f1", r.micro_f1}};
            if (!e_report.empty()) write_file(e_report, j.dump(2) + "\n");
            out << "precision " << r.precision << "  recall " << r.recall << "  micro_f1 " << r.micro_f1 << "\n";
        } else if (*hs_cmd) {
            HyperSpace space;
            space.hidden_sizes = parse_list<std::size_t>(hs_hidden);
            space.learning_rates = parse_list<double>(hs_lrs);
            space.batch_sizes = parse_list<std::size_t>(hs_batches);
            std::map<std::string, EmbeddingProvider> providers;
            for (const auto& spec : hs_vectors) {
                const auto eq = spec.find('=');
                const std::string name = eq == std::string::npos ? spec : spec.substr(0, eq);
                const std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
                if (!providers.emplace(name, load_provider(path, false)).second) {
                    throw CLI::ValidationError("duplicate vectors name '" + name + "'");
                }
                space.providers.push_back(name);
            }
            const Corpus train_corpus = load_merged(hs_train, hs_opts.seed);
            const Corpus dev = load_merged(hs_dev, hs_opts.seed + 1);
            const GridReport report = grid_search(
                space, train_corpus, dev, [&](const std::string& n) -> const EmbeddingProvider& { return providers.at(n); },
                hs_opts);
            if (!hs_tsv.empty()) write_file(hs_tsv, grid_report_tsv(report));
            if (!hs_json.empty()) write_file(hs_json, grid_report_json(report));
            out << grid_report_summary(report);
        } else if (*t1_cmd) {
            const Table1Report report = table1_experiment(load_corpus(t1_notes), load_corpus(t1_queries),
                                                          load_provider(t1_vectors, false), t1_flags.config(),
                                                          parse_list<std::uint64_t>(t1_seeds));
            if (!t1_tsv.empty()) write_file(t1_tsv, table1_tsv(report));
            if (!t1_json.empty()) write_file(t1_json, table1_json(report));
            out << table1_summary(report);
        }
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitOk;
}

}  // namespace cce
