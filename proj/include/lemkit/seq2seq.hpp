#pragma once

// Character-level encoder-decoder with additive attention.
//
// The encoder is a single gated recurrent (GRU) layer read left to right.
// The decoder is a GRU cell whose input at each step is the embedding of
// the previous target character concatenated with an attention context
// vector; attention scores the encoder states against the previous decoder
// state through v . tanh(W s + U h). Logits project [state ; context] onto
// the vocabulary. Training is teacher-forced with a mean per-position
// cross-entropy loss; gradients are derived analytically and checked
// against finite differences in the test suite.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lemkit/corpus.hpp"
#include "lemkit/encoding.hpp"
#include "lemkit/metrics.hpp"
#include "lemkit/rng.hpp"
#include "lemkit/tensor.hpp"

namespace lemkit {

struct GruWeights {
    // Input and recurrent matrices plus bias for the update (z), reset (r)
    // and candidate (n) paths. Input size differs between encoder (d) and
    // decoder (d + h); hidden size is h throughout.
    Tensor2 wz, wr, wn;  // h x input
    Tensor2 uz, ur, un;  // h x h
    Vec bz, br, bn;      // h
};

struct ModelParams {
    std::size_t vocab = 0;
    std::size_t d = 0;  // embedding size
    std::size_t h = 0;  // hidden size

    Tensor2 embed;      // vocab x d, shared by encoder and decoder
    GruWeights enc;     // input d
    GruWeights dec;     // input d + h
    Tensor2 att_w;      // h x h, applied to the decoder state
    Tensor2 att_u;      // h x h, applied to encoder states
    Vec att_v;          // h
    Tensor2 out_w;      // vocab x 2h, applied to [state ; context]
    Vec out_b;          // vocab

    static ModelParams zeros(std::size_t vocab, std::size_t d, std::size_t h);
};

/// Named views over every parameter array in the fixed serialization order.
/// This single ordering drives the optimizer, gradient clipping, the
/// checkpoint format and the gradient check.
struct ParamView {
    const char* name;
    double* data;
    std::size_t size;
};
std::vector<ParamView> param_views(ModelParams& p);

struct TrainConfig {
    std::size_t d = 32;
    std::size_t h = 64;
    double learning_rate = 0.002;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t batch_size = 8;
    std::size_t epochs = 20;
    std::uint64_t seed = 0;
    double gradient_clip_norm = 5.0;
    // Teacher forcing is the only supported training regime; the flag
    // exists so the contract is explicit, and validate() rejects false.
    bool teacher_forcing = true;
    double max_decode_len_factor = 2.0;
    std::size_t fixed_input_len = 0;  // 0 = per-example lengths, no padding
    std::size_t max_span = 64;

    void validate() const;
};

struct AdamState {
    std::vector<Vec> m;  // first moments, one array per ParamView
    std::vector<Vec> v;  // second moments
    std::size_t t = 0;

    static AdamState zeros_like(ModelParams& p);
};

/// Xavier-uniform weights (per matrix, bound sqrt(6/(fan_in+fan_out))),
/// zero biases; deterministic in the seed.
ModelParams init_params(std::size_t vocab, std::size_t d, std::size_t h,
                        std::uint64_t seed);

/// Everything backward() needs from a forward pass. Exposed mainly so the
/// tests can inspect activations (e.g. attention normalization).
struct ForwardCache {
    std::vector<TokenId> input_ids;
    std::vector<TokenId> target_ids;
    // encoder activations, one entry per input position
    std::vector<Vec> enc_z, enc_r, enc_g, enc_m, enc_h;
    std::vector<Vec> att_uh;  // att_u * h_j, reused by every decoder step
    // decoder activations, one entry per target position
    std::vector<TokenId> prev_ids;
    std::vector<Vec> dec_q, dec_alpha, dec_ctx;
    std::vector<Vec> dec_z, dec_r, dec_g, dec_m, dec_s;
    std::vector<Vec> dec_probs;
    std::vector<Tensor2> att_tanh;  // per step: T x h, rows tanh(q + u_j)
};

struct ForwardResult {
    double loss = 0.0;
    std::unique_ptr<ForwardCache> cache;
};

ForwardResult forward(const ModelParams& params,
                      const std::vector<TokenId>& input_ids,
                      const std::vector<TokenId>& target_ids);

/// Exact gradients of the forward loss, accumulated into `grads` (so a
/// batch may sum several examples before averaging).
void backward(const ModelParams& params, const ForwardCache& cache,
              ModelParams& grads);

/// Bias-corrected adaptive-moment update with global-norm clipping first.
void adam_step(ModelParams& params, ModelParams& grads, AdamState& state,
               const TrainConfig& config);

struct EpochLog {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    Metrics dev;
};

struct TrainResult {
    ModelParams params;  // best dev-score parameters
    std::size_t best_epoch = 0;
    std::vector<EpochLog> log;
};

/// Teacher-forced training over a corpus split. Context per sample is drawn
/// from the policy each epoch; dev metrics use the same policy with a fixed
/// evaluation stream, and the best-dev-score parameters are returned.
TrainResult train(const Corpus& train_corpus, const Corpus& dev_corpus,
                  const Vocab& vocab, const ContextPolicy& policy,
                  const TrainConfig& config);

struct PredictOutcome {
    std::string text;
    bool truncated = false;  // decode hit the length cap before EOS
};

/// Greedy decode. `window` may be null for no-context prediction.
PredictOutcome predict(const ModelParams& params, const std::string& phrase,
                       const ContextWindow* window, const Vocab& vocab,
                       const TrainConfig& config);

// ---- checkpoint io -----------------------------------------------------------
//
// Binary layout (all little-endian):
//   bytes 0..3   magic "LMKC"
//   u32          format version (1)
//   u64          vocab hash (FNV-1a of the vocab file text)
//   u32          vocab size
//   u32          d
//   u32          h
//   f64[...]     parameter arrays in param_views order
// Round trips byte-exactly.

void save_checkpoint(const std::string& path, const ModelParams& params,
                     std::uint64_t vocab_hash);

struct Checkpoint {
    ModelParams params;
    std::uint64_t vocab_hash = 0;
};
Checkpoint load_checkpoint(const std::string& path);

}  // namespace lemkit
