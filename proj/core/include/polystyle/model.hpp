#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polystyle/tensor.hpp"

namespace polystyle {

struct ContentCode {
    Tensor values;  // [m, d]
};

struct StyleCode {
    Tensor mu;     // [d]
    Tensor sigma;  // [d], strictly positive (softplus output)
};

struct FusedCode {
    Tensor values;  // [m, d]
};

struct Hyperparams {
    int d = 64;          // latent / hidden width
    int vocab_size = 0;
    int max_len = 25;    // raw tokens, excluding BOS/EOS
    int kernel = 3;
    int content_layers = 3;
    int style_layers = 3;
    int decoder_layers = 4;

    void validate() const;
    bool operator==(const Hyperparams&) const = default;
};

struct ConvLayer {
    Tensor w;  // [c_out, k, c_in]
    Tensor b;  // [c_out]
};

struct LinearLayer {
    Tensor w;  // [in, out]
    Tensor b;  // [out]
};

struct DomainParams {
    Tensor embedding;                    // [V, d]
    std::vector<ConvLayer> content_convs;   // 3 blocks, d -> 2d (GLU)
    std::vector<ConvLayer> style_convs;     // 3 blocks, d -> 2d (GLU)
    LinearLayer style_mlp1;              // d -> d
    LinearLayer style_mlp2;              // d -> 2d (mu | raw sigma)
    std::vector<ConvLayer> decoder_convs;   // 4 causal blocks, d -> 2d (GLU)
    std::vector<LinearLayer> decoder_attn;  // per-block query projection d -> d
    LinearLayer out_proj;                // d -> V
    std::vector<ConvLayer> disc_convs;   // 2 blocks, d -> d (tanh)
    LinearLayer disc_out;                // d -> 1
    LinearLayer bridge1;                 // d -> d
    LinearLayer bridge2;                 // d -> d
};

struct ModelParams {
    Hyperparams hp;
    DomainParams domains[2];
    LinearLayer classifier1;  // 2d -> d, shared style classifier head
    LinearLayer classifier2;  // d -> 2
    uint64_t init_seed = 0;
    uint64_t vocab_hash = 0;
    bool trained = false;

    static ModelParams init(const Hyperparams& hp, uint64_t seed);

    // Registries in fixed declaration order (checkpoint layout depends on it).
    std::vector<NamedParam> all_params();
    std::vector<NamedParam> generator_params();      // everything but discriminators
    std::vector<NamedParam> discriminator_params();  // D1 + D2
    void zero_all_grads();

    // Temporarily clears requires_grad; restore_grad_flags undoes it.
    static std::vector<TensorNode*> freeze(std::vector<NamedParam>& group);
    static void unfreeze(const std::vector<TensorNode*>& frozen);
};

// RAII parameter freeze for stop-gradient passes (D step vs G step).
class FreezeGuard {
public:
    explicit FreezeGuard(std::vector<NamedParam> group);
    ~FreezeGuard();
    FreezeGuard(const FreezeGuard&) = delete;
    FreezeGuard& operator=(const FreezeGuard&) = delete;

private:
    std::vector<TensorNode*> frozen_;
};

// tokens are framed ids [BOS ... EOS]; domain is 1 or 2.

ContentCode encode_content(const ModelParams& params, int domain,
                           const std::vector<int>& tokens);

struct ContentTrace {
    Tensor hidden;  // second-layer activations E^{c,h}, [m, d]
    Tensor code;    // final content code, [m, d]
};
ContentTrace encode_content_trace(const ModelParams& params, int domain,
                                  const std::vector<int>& tokens);
// Runs the remaining content-encoder blocks on given second-layer activations.
Tensor encode_content_tail(const ModelParams& params, int domain, const Tensor& hidden);

StyleCode encode_style(const ModelParams& params, int domain,
                       const std::vector<int>& tokens);

// z^k = s_sigma * (c^k - mu(c)) / max(std(c), eps) + s_mu. No learnable parameters.
FusedCode compose(const ContentCode& content, const StyleCode& style);

struct DecoderTrace {
    Tensor second_last;  // activations after the next-to-last block, [t, d]
    Tensor logits;       // [t, V]
};
// Teacher-forced pass over the whole prefix; prefix must begin with BOS.
DecoderTrace decoder_forward(const ModelParams& params, int domain, const FusedCode& fused,
                             const std::vector<int>& prefix_tokens);

// Next-token distribution after the prefix (sums to 1). Causal: the row for
// step t depends only on prefix tokens before t and on `fused`.
Tensor decode_step(const ModelParams& params, int domain, const FusedCode& fused,
                   const std::vector<int>& prefix_tokens);

// P(z came from this domain's reconstruction stream), scalar in (0,1).
Tensor discriminate(const ModelParams& params, int domain, const FusedCode& z);

// Distribution over domain labels {1,2} from concat(mu, sigma).
Tensor classify_style(const ModelParams& params, const StyleCode& style);

// Per-position 2-layer MLP from decoder second-last activations into the
// target content encoder's second-layer space; `direction` is the target
// domain of the transfer whose decoder produced `decoder_hidden`.
Tensor bridge(const ModelParams& params, int direction, const Tensor& decoder_hidden);

// Checkpoint: magic "STYF", u32 version, hyperparameters, parameter blobs in
// declaration order, trailing FNV-1a checksum. Round-trips bitwise.
void save_checkpoint(const ModelParams& params, const std::string& path);
ModelParams load_checkpoint(const std::string& path);

}  // namespace polystyle
