#include "cce/tagger.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "cce/error.hpp"
#include "cce/eval.hpp"
#include "cce/text.hpp"

namespace cce {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

Index as_index(std::size_t v) { return static_cast<Index>(v); }

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// Post-activation gate values and states of one LSTM pass, rows indexed by
// original token position regardless of direction.
struct LstmTrace {
    MatrixXd gates;      // n x 4h: i, f, o, g
    MatrixXd cell;       // n x h
    MatrixXd cell_tanh;  // n x h
    MatrixXd hidden;     // n x h
};

LstmTrace run_lstm(const LstmWeights& w, const MatrixXd& x, bool reverse) {
    const Index n = x.rows();
    const Index h = w.w_rec.cols();
    LstmTrace tr{MatrixXd(n, 4 * h), MatrixXd(n, h), MatrixXd(n, h), MatrixXd(n, h)};
    const MatrixXd pre = (x * w.w_in.transpose()).rowwise() + w.bias.col(0).transpose();

    VectorXd h_prev = VectorXd::Zero(h);
    VectorXd c_prev = VectorXd::Zero(h);
    for (Index s = 0; s < n; ++s) {
        const Index t = reverse ? n - 1 - s : s;
        VectorXd z = pre.row(t).transpose() + w.w_rec * h_prev;
        for (Index j = 0; j < 3 * h; ++j) z[j] = sigmoid(z[j]);
        for (Index j = 3 * h; j < 4 * h; ++j) z[j] = std::tanh(z[j]);
        const VectorXd c = z.segment(h, h).cwiseProduct(c_prev) + z.segment(0, h).cwiseProduct(z.segment(3 * h, h));
        const VectorXd ct = c.array().tanh().matrix();
        const VectorXd hc = z.segment(2 * h, h).cwiseProduct(ct);
        tr.gates.row(t) = z.transpose();
        tr.cell.row(t) = c.transpose();
        tr.cell_tanh.row(t) = ct.transpose();
        tr.hidden.row(t) = hc.transpose();
        h_prev = hc;
        c_prev = c;
    }
    return tr;
}

// Accumulates weight gradients for one direction given dLoss/dhidden.
void backprop_lstm(const LstmWeights& w, const MatrixXd& x, const LstmTrace& tr, const MatrixXd& d_hidden,
                   bool reverse, LstmWeights& grad) {
    const Index n = x.rows();
    const Index h = w.w_rec.cols();
    MatrixXd dz_all(n, 4 * h);
    MatrixXd h_prev_all = MatrixXd::Zero(n, h);

    VectorXd dh_next = VectorXd::Zero(h);
    VectorXd dc_next = VectorXd::Zero(h);
    for (Index s = n - 1; s >= 0; --s) {
        const Index t = reverse ? n - 1 - s : s;
        const Index p = reverse ? t + 1 : t - 1;
        const VectorXd c_prev = s > 0 ? VectorXd(tr.cell.row(p).transpose()) : VectorXd::Zero(h);
        if (s > 0) h_prev_all.row(t) = tr.hidden.row(p);

        const Eigen::ArrayXd gi = tr.gates.row(t).segment(0, h).transpose().array();
        const Eigen::ArrayXd gf = tr.gates.row(t).segment(h, h).transpose().array();
        const Eigen::ArrayXd go = tr.gates.row(t).segment(2 * h, h).transpose().array();
        const Eigen::ArrayXd gg = tr.gates.row(t).segment(3 * h, h).transpose().array();
        const Eigen::ArrayXd ct = tr.cell_tanh.row(t).transpose().array();

        const VectorXd dh = d_hidden.row(t).transpose() + dh_next;
        const Eigen::ArrayXd d_o = dh.array() * ct;
        const Eigen::ArrayXd dc = dh.array() * go * (1.0 - ct * ct) + dc_next.array();

        VectorXd dz(4 * h);
        dz.segment(0, h) = (dc * gg * gi * (1.0 - gi)).matrix();
        dz.segment(h, h) = (dc * c_prev.array() * gf * (1.0 - gf)).matrix();
        dz.segment(2 * h, h) = (d_o * go * (1.0 - go)).matrix();
        dz.segment(3 * h, h) = (dc * gi * (1.0 - gg * gg)).matrix();
        dz_all.row(t) = dz.transpose();

        dc_next = (dc * gf).matrix();
        dh_next = w.w_rec.transpose() * dz;
    }
    grad.w_in.noalias() += dz_all.transpose() * x;
    grad.w_rec.noalias() += dz_all.transpose() * h_prev_all;
    grad.bias.col(0) += dz_all.colwise().sum().transpose();
}

MatrixXd dropout_mask(Index rows, Index cols, double rate, Rng& rng) {
    MatrixXd mask(rows, cols);
    const double keep_scale = 1.0 / (1.0 - rate);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) mask(i, j) = rng.uniform01() < rate ? 0.0 : keep_scale;
    }
    return mask;
}

// Everything the backward pass needs from one forward pass.
struct ForwardPass {
    LstmTrace fwd;
    LstmTrace bwd;
    MatrixXd features;  // n x 2h after dropout
    MatrixXd mask;      // empty when no dropout
    crf::Emissions scores;
};

ForwardPass forward_pass(const TaggerParams& params, const SentenceEmbedding& x, RunMode mode, double dropout,
                         Rng* rng) {
    if (static_cast<std::size_t>(x.cols()) != params.input_dim) {
        throw DimensionMismatch("embedding has " + std::to_string(x.cols()) + " columns, model expects " +
                                std::to_string(params.input_dim));
    }
    ForwardPass fp;
    fp.fwd = run_lstm(params.forward, x, false);
    fp.bwd = run_lstm(params.backward, x, true);
    const Index h = as_index(params.hidden);
    fp.features.resize(x.rows(), 2 * h);
    fp.features.leftCols(h) = fp.fwd.hidden;
    fp.features.rightCols(h) = fp.bwd.hidden;
    if (mode == RunMode::train && dropout > 0.0) {
        if (rng == nullptr) throw std::invalid_argument("dropout in train mode needs an rng");
        fp.mask = dropout_mask(fp.features.rows(), fp.features.cols(), dropout, *rng);
        fp.features = fp.features.cwiseProduct(fp.mask);
    }
    fp.scores = (fp.features * params.emit_w).rowwise() + params.emit_b.row(0);
    return fp;
}

TaggerParams zero_like(const TaggerParams& p) {
    TaggerParams g = zero_params(p.input_dim, p.hidden);
    g.transitions.setZero();
    return g;
}

void fill_uniform(MatrixXd& m, double bound, Rng& rng) {
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) m(i, j) = rng.uniform(-bound, bound);
    }
}

void init_lstm(LstmWeights& w, std::size_t input_dim, std::size_t hidden, Rng& rng) {
    fill_uniform(w.w_in, 1.0 / std::sqrt(static_cast<double>(input_dim)), rng);
    fill_uniform(w.w_rec, 1.0 / std::sqrt(static_cast<double>(hidden)), rng);
    w.bias.setZero();
    w.bias.block(as_index(hidden), 0, as_index(hidden), 1).setOnes();
}

void append_double(std::string& out, double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

}  // namespace

TaggerParams::TensorList TaggerParams::tensors() {
    return {{{"forward.w_in", &forward.w_in},
             {"forward.w_rec", &forward.w_rec},
             {"forward.bias", &forward.bias},
             {"backward.w_in", &backward.w_in},
             {"backward.w_rec", &backward.w_rec},
             {"backward.bias", &backward.bias},
             {"emit.w", &emit_w},
             {"emit.b", &emit_b},
             {"transitions", &transitions}}};
}

TaggerParams::ConstTensorList TaggerParams::tensors() const {
    auto mut = const_cast<TaggerParams*>(this)->tensors();
    ConstTensorList out;
    for (std::size_t i = 0; i < kTensorCount; ++i) out[i] = {mut[i].first, mut[i].second};
    return out;
}

bool TaggerParams::operator==(const TaggerParams& other) const {
    if (input_dim != other.input_dim || hidden != other.hidden) return false;
    const auto a = tensors();
    const auto b = other.tensors();
    for (std::size_t i = 0; i < kTensorCount; ++i) {
        if (a[i].second->rows() != b[i].second->rows() || a[i].second->cols() != b[i].second->cols()) return false;
        if (!(a[i].second->array() == b[i].second->array()).all()) return false;
    }
    return true;
}

TaggerParams zero_params(std::size_t input_dim, std::size_t hidden) {
    if (input_dim == 0 || hidden == 0) throw DimensionMismatch("input and hidden sizes must be positive");
    const Index d = as_index(input_dim);
    const Index h = as_index(hidden);
    TaggerParams p;
    p.input_dim = input_dim;
    p.hidden = hidden;
    for (LstmWeights* w : {&p.forward, &p.backward}) {
        w->w_in = MatrixXd::Zero(4 * h, d);
        w->w_rec = MatrixXd::Zero(4 * h, h);
        w->bias = MatrixXd::Zero(4 * h, 1);
    }
    p.emit_w = MatrixXd::Zero(2 * h, as_index(kNumTags));
    p.emit_b = MatrixXd::Zero(1, as_index(kNumTags));
    p.transitions = crf::make_transitions();
    return p;
}

TaggerParams init_params(std::size_t input_dim, std::size_t hidden, Rng& rng) {
    TaggerParams p = zero_params(input_dim, hidden);
    init_lstm(p.forward, input_dim, hidden, rng);
    init_lstm(p.backward, input_dim, hidden, rng);
    fill_uniform(p.emit_w, 1.0 / std::sqrt(2.0 * static_cast<double>(hidden)), rng);
    const double bound = 1.0 / std::sqrt(static_cast<double>(crf::kStates));
    for (Index i = 0; i < crf::kStates; ++i) {
        for (Index j = 0; j < crf::kStates; ++j) {
            if (crf::is_learnable(i, j)) p.transitions(i, j) = rng.uniform(-bound, bound);
        }
    }
    return p;
}

crf::Emissions emissions(const TaggerParams& params, const SentenceEmbedding& x, RunMode mode, double dropout,
                         Rng* rng) {
    return forward_pass(params, x, mode, dropout, rng).scores;
}

BatchGradient gradients(const TaggerParams& params, const std::vector<const Example*>& batch, double dropout,
                        Rng* rng) {
    if (batch.empty()) throw std::invalid_argument("empty batch");
    BatchGradient out{0.0, zero_like(params)};
    TaggerParams& g = out.grad;
    const Index h = as_index(params.hidden);
    const RunMode mode = dropout > 0.0 ? RunMode::train : RunMode::infer;

    for (const Example* ex : batch) {
        if (ex->x.rows() == 0) continue;
        const ForwardPass fp = forward_pass(params, ex->x, mode, dropout, rng);
        const crf::NllGradient crf_grad = crf::nll_gradient(fp.scores, params.transitions, ex->y);
        out.mean_nll += crf_grad.nll;

        g.transitions += crf_grad.d_transitions;
        g.emit_w.noalias() += fp.features.transpose() * crf_grad.d_emissions;
        g.emit_b.row(0) += crf_grad.d_emissions.colwise().sum();

        MatrixXd d_features = crf_grad.d_emissions * params.emit_w.transpose();
        if (fp.mask.size() != 0) d_features = d_features.cwiseProduct(fp.mask);
        backprop_lstm(params.forward, ex->x, fp.fwd, d_features.leftCols(h), false, g.forward);
        backprop_lstm(params.backward, ex->x, fp.bwd, d_features.rightCols(h), true, g.backward);
    }

    const double scale = 1.0 / static_cast<double>(batch.size());
    out.mean_nll *= scale;
    for (auto& [name, tensor] : g.tensors()) *tensor *= scale;
    return out;
}

double mean_nll(const TaggerParams& params, const std::vector<const Example*>& batch) {
    if (batch.empty()) return 0.0;
    double total = 0.0;
    for (const Example* ex : batch) {
        if (ex->x.rows() == 0) continue;
        total -= crf::log_likelihood(emissions(params, ex->x), params.transitions, ex->y);
    }
    return total / static_cast<double>(batch.size());
}

double global_norm(const TaggerParams& grad) {
    double sq = 0.0;
    for (const auto& [name, tensor] : grad.tensors()) {
        if (name == "transitions") {
            for (Index i = 0; i < tensor->rows(); ++i) {
                for (Index j = 0; j < tensor->cols(); ++j) {
                    if (crf::is_learnable(i, j)) sq += (*tensor)(i, j) * (*tensor)(i, j);
                }
            }
        } else {
            sq += tensor->squaredNorm();
        }
    }
    return std::sqrt(sq);
}

SentenceEmbedding embed_sentence(const EmbeddingProvider& provider, const std::vector<std::string>& words) {
    std::vector<std::string> lowered;
    lowered.reserve(words.size());
    for (const auto& w : words) lowered.push_back(to_lower(w));
    return provider.embed(lowered);
}

std::vector<Example> make_examples(const Corpus& corpus, const EmbeddingProvider& provider) {
    std::vector<Example> out;
    out.reserve(corpus.size());
    for (const auto& s : corpus.sentences) out.push_back({embed_sentence(provider, s.words()), s.tags});
    return out;
}

std::vector<BioTag> predict_tags(const TaggerParams& params, const EmbeddingProvider& provider,
                                 const std::vector<std::string>& words) {
    if (words.empty()) return {};
    const crf::Emissions p = emissions(params, embed_sentence(provider, words));
    return repair_bio(crf::viterbi(p, params.transitions).tags);
}

Corpus predict_corpus(const TaggerParams& params, const EmbeddingProvider& provider, const Corpus& corpus) {
    Corpus out;
    out.name = corpus.name + ".pred";
    out.sentences.reserve(corpus.size());
    for (const auto& s : corpus.sentences) {
        TaggedSentence p = s;
        p.tags = predict_tags(params, provider, s.words());
        out.sentences.push_back(std::move(p));
    }
    return out;
}

TaggedSentence tag(const TaggerParams& params, const EmbeddingProvider& provider, std::string_view query_text) {
    const std::vector<std::string> words = tokenize(query_text);
    if (words.empty()) throw EmptyQuery();
    return make_sentence(words, predict_tags(params, provider, words));
}

TrainResult train(const Corpus& train_corpus, const Corpus& dev_corpus, const EmbeddingProvider& provider,
                  const TrainConfig& config) {
    if (train_corpus.empty()) throw EmptyCorpus();
    if (config.hidden_size == 0 || config.batch_size == 0 || config.epochs == 0 || !(config.learning_rate > 0.0)) {
        throw DataError("hidden size, batch size, epochs and learning rate must be positive");
    }
    if (config.dropout < 0.0 || config.dropout >= 1.0) throw DataError("dropout must be in [0, 1)");

    const std::vector<Example> examples = make_examples(train_corpus, provider);
    Rng rng(config.seed);
    TaggerParams params = init_params(provider.dimension(), config.hidden_size, rng);

    TrainResult result;
    std::vector<std::size_t> order(examples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    double best_f1 = -1.0;

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        rng.shuffle(std::span<std::size_t>(order));
        double nll_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t stop = std::min(order.size(), start + config.batch_size);
            std::vector<const Example*> batch;
            batch.reserve(stop - start);
            for (std::size_t i = start; i < stop; ++i) batch.push_back(&examples[order[i]]);

            BatchGradient bg = gradients(params, batch, config.dropout, &rng);
            nll_sum += bg.mean_nll * static_cast<double>(batch.size());
            double step = config.learning_rate;
            if (config.clip_norm > 0.0) {
                const double norm = global_norm(bg.grad);
                if (norm > config.clip_norm) step *= config.clip_norm / norm;
            }
            auto target = params.tensors();
            const auto grads = bg.grad.tensors();
            for (std::size_t k = 0; k < TaggerParams::kTensorCount; ++k) *target[k].second -= step * *grads[k].second;
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_nll = nll_sum / static_cast<double>(examples.size());
        if (!dev_corpus.empty()) rec.dev_f1 = micro_f1(dev_corpus, predict_corpus(params, provider, dev_corpus)).micro_f1;
        result.log.push_back(rec);

        const bool better = dev_corpus.empty() || rec.dev_f1 >= best_f1;
        if (better) {
            best_f1 = rec.dev_f1;
            result.params = params;
            result.best_epoch = epoch;
        }
        if (config.on_epoch && !config.on_epoch(rec, params)) break;
    }
    return result;
}

std::string format_log(const std::vector<EpochRecord>& log) {
    std::string out;
    for (const auto& r : log) {
        out += std::to_string(r.epoch);
        out += '\t';
        append_double(out, r.train_nll);
        out += '\t';
        append_double(out, r.dev_f1);
        out += '\n';
    }
    return out;
}

// Model container:
//   "cce-model v1\n"
//   one line of JSON metadata (dimensions and tensor shapes) + "\n"
//   each tensor's values as little-endian IEEE-754 binary64, row-major,
//   in metadata order.
std::string serialize_model(const TaggerParams& params) {
    nlohmann::json meta;
    meta["input_dim"] = params.input_dim;
    meta["hidden_size"] = params.hidden;
    meta["num_tags"] = kNumTags;
    meta["provider_dim"] = params.input_dim;
    meta["dtype"] = "float64-le";
    meta["layout"] = "row-major";
    auto& list = meta["tensors"] = nlohmann::json::array();
    for (const auto& [name, tensor] : params.tensors()) {
        list.push_back({{"name", name}, {"shape", {tensor->rows(), tensor->cols()}}});
    }

    std::string out(kModelHeader);
    out += '\n';
    out += meta.dump();
    out += '\n';
    for (const auto& [name, tensor] : params.tensors()) {
        for (Index i = 0; i < tensor->rows(); ++i) {
            for (Index j = 0; j < tensor->cols(); ++j) {
                const auto bits = std::bit_cast<std::uint64_t>((*tensor)(i, j));
                for (int b = 0; b < 8; ++b) out += static_cast<char>((bits >> (8 * b)) & 0xFF);
            }
        }
    }
    return out;
}

TaggerParams parse_model(std::string_view bytes) {
    const std::size_t nl1 = bytes.find('\n');
    if (nl1 == std::string_view::npos || bytes.substr(0, nl1) != kModelHeader) {
        throw ModelFormatError("not a model file (expected header '" + std::string(kModelHeader) + "')");
    }
    const std::size_t nl2 = bytes.find('\n', nl1 + 1);
    if (nl2 == std::string_view::npos) throw ModelFormatError("truncated model metadata");

    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(bytes.substr(nl1 + 1, nl2 - nl1 - 1));
    } catch (const nlohmann::json::exception& e) {
        throw ModelFormatError(std::string("bad model metadata: ") + e.what());
    }
    TaggerParams params;
    try {
        if (meta.at("num_tags").get<std::size_t>() != kNumTags) throw ModelFormatError("model has unsupported tag count");
        params = zero_params(meta.at("input_dim").get<std::size_t>(), meta.at("hidden_size").get<std::size_t>());
        const auto& list = meta.at("tensors");
        auto tensors = params.tensors();
        if (list.size() != tensors.size()) throw ModelFormatError("unexpected tensor count");
        std::size_t offset = nl2 + 1;
        for (std::size_t k = 0; k < tensors.size(); ++k) {
            auto& [name, tensor] = tensors[k];
            const auto& entry = list[k];
            if (entry.at("name").get<std::string>() != name ||
                entry.at("shape").at(0).get<Index>() != tensor->rows() ||
                entry.at("shape").at(1).get<Index>() != tensor->cols()) {
                throw ModelFormatError("tensor " + std::to_string(k) + " does not match '" + std::string(name) + "'");
            }
            const std::size_t need = static_cast<std::size_t>(tensor->size()) * 8;
            if (bytes.size() < offset + need) throw ModelFormatError("truncated tensor data");
            for (Index i = 0; i < tensor->rows(); ++i) {
                for (Index j = 0; j < tensor->cols(); ++j) {
                    std::uint64_t bits = 0;
                    for (int b = 0; b < 8; ++b) {
                        bits |= std::uint64_t{static_cast<unsigned char>(bytes[offset++])} << (8 * b);
                    }
                    (*tensor)(i, j) = std::bit_cast<double>(bits);
                }
            }
        }
        if (offset != bytes.size()) throw ModelFormatError("trailing bytes after tensor data");
    } catch (const nlohmann::json::exception& e) {
        throw ModelFormatError(std::string("bad model metadata: ") + e.what());
    }
    crf::freeze_transitions(params.transitions);
    return params;
}

void save_model(const TaggerParams& params, const std::string& path) { write_file(path, serialize_model(params)); }

TaggerParams load_model(const std::string& path) { return parse_model(read_file(path)); }

}  // namespace cce
