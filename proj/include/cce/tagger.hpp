#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cce/corpus.hpp"
#include "cce/crf.hpp"
#include "cce/embeddings.hpp"
#include "cce/rng.hpp"

namespace cce {

/// One direction of the BiLSTM. Gate blocks are stacked as rows in the order
/// input, forget, output, cell candidate, each `hidden` rows tall.
struct LstmWeights {
    Eigen::MatrixXd w_in;   // 4h x d
    Eigen::MatrixXd w_rec;  // 4h x h
    Eigen::MatrixXd bias;   // 4h x 1
};

struct TaggerParams {
    std::size_t input_dim = 0;
    std::size_t hidden = 0;
    LstmWeights forward;
    LstmWeights backward;
    Eigen::MatrixXd emit_w;          // 2h x 3, rows 0..h-1 read the forward LSTM
    Eigen::MatrixXd emit_b;          // 1 x 3
    crf::Transitions transitions;    // 5 x 5

    static constexpr std::size_t kTensorCount = 9;
    using TensorList = std::array<std::pair<std::string_view, Eigen::MatrixXd*>, kTensorCount>;
    using ConstTensorList = std::array<std::pair<std::string_view, const Eigen::MatrixXd*>, kTensorCount>;

    /// Every weight tensor with a stable name, in serialization order.
    TensorList tensors();
    ConstTensorList tensors() const;

    bool operator==(const TaggerParams& other) const;
};

/// All-zero parameters of the right shapes (transitions keep their -inf
/// entries).
TaggerParams zero_params(std::size_t input_dim, std::size_t hidden);

/// Weights uniform in +-1/sqrt(fan_in), LSTM biases zero except the forget
/// gate at 1, learnable transitions uniform in +-1/sqrt(5).
TaggerParams init_params(std::size_t input_dim, std::size_t hidden, Rng& rng);

enum class RunMode { train, infer };

/// Per-token tag scores from the BiLSTM. In train mode a dropout mask drawn
/// from `rng` is applied to the concatenated hidden states.
crf::Emissions emissions(const TaggerParams& params, const SentenceEmbedding& x, RunMode mode = RunMode::infer,
                         double dropout = 0.0, Rng* rng = nullptr);

struct Example {
    SentenceEmbedding x;
    crf::TagPath y;
};

/// Gradient of the mean negative log-likelihood over a batch. The gradient is
/// stored in a TaggerParams whose frozen transition entries are zero.
struct BatchGradient {
    double mean_nll = 0.0;
    TaggerParams grad;
};

BatchGradient gradients(const TaggerParams& params, const std::vector<const Example*>& batch,
                        double dropout = 0.0, Rng* rng = nullptr);

/// Mean NLL alone (no backprop), inference mode.
double mean_nll(const TaggerParams& params, const std::vector<const Example*>& batch);

double global_norm(const TaggerParams& grad);

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    double train_nll = 0.0;
    double dev_f1 = 0.0;
};

struct TrainConfig {
    std::size_t hidden_size = 256;
    double learning_rate = 0.05;
    std::size_t batch_size = 32;
    std::size_t epochs = 10;
    double dropout = 0.0;
    std::uint64_t seed = 0;
    double clip_norm = 5.0;
    /// Called after each epoch with the current parameters; returning false
    /// stops training early.
    std::function<bool(const EpochRecord&, const TaggerParams&)> on_epoch;
};

struct TrainResult {
    TaggerParams params;
    std::vector<EpochRecord> log;
    std::size_t best_epoch = 0;
};

/// Mini-batch SGD on the mean NLL. Returns the parameters of the epoch with
/// the best dev span micro-F1 (latest epoch among ties; the final epoch when
/// dev is empty).
TrainResult train(const Corpus& train_corpus, const Corpus& dev_corpus, const EmbeddingProvider& provider,
                  const TrainConfig& config);

/// Training log as text, one `epoch\ttrain_nll\tdev_f1` line per epoch with
/// round-trip precision.
std::string format_log(const std::vector<EpochRecord>& log);

/// Embeds lowercased token texts; tagging and training share this.
SentenceEmbedding embed_sentence(const EmbeddingProvider& provider, const std::vector<std::string>& words);
std::vector<Example> make_examples(const Corpus& corpus, const EmbeddingProvider& provider);

/// Viterbi tags for already-tokenized words, BIO-repaired.
std::vector<BioTag> predict_tags(const TaggerParams& params, const EmbeddingProvider& provider,
                                 const std::vector<std::string>& words);

/// Same tokens as `corpus`, predicted tags.
Corpus predict_corpus(const TaggerParams& params, const EmbeddingProvider& provider, const Corpus& corpus);

/// Tokenize, embed, decode. Throws EmptyQuery when no tokens remain.
TaggedSentence tag(const TaggerParams& params, const EmbeddingProvider& provider, std::string_view query_text);

/// Versioned model container; byte layout in docs/model_format.md.
inline constexpr std::string_view kModelHeader = "cce-model v1";
std::string serialize_model(const TaggerParams& params);
TaggerParams parse_model(std::string_view bytes);
void save_model(const TaggerParams& params, const std::string& path);
TaggerParams load_model(const std::string& path);

}  // namespace cce
