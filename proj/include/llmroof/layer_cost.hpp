#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "llmroof/model_spec.hpp"

namespace llmroof {

// Inference phase. Prefill processes len new rows per request; decode
// processes one new row per request against a context of length len.
struct Phase {
    enum class Kind { Prefill, Decode };
    Kind kind = Kind::Decode;
    int64_t len = 1;  // prefill: L_in, decode: attended context length L

    static Phase prefill(int64_t l_in) { return {Kind::Prefill, l_in}; }
    static Phase decode(int64_t l) { return {Kind::Decode, l}; }
    int64_t new_rows_per_request() const { return kind == Kind::Prefill ? len : 1; }
    bool is_decode() const { return kind == Kind::Decode; }
};

enum class LayerKind {
    QkvCompress,  // MLA (a): H -> C_Q, C_KV, k_rope
    QRope,        // MLA (b)
    QDecompress,  // MLA (c)
    KDecompress,  // MLA (d); with reorder: Q-side W_DK multiply
    VDecompress,  // MLA (e); with reorder: output-side W_DV multiply
    Score,        // (f)
    ScoreRope,    // (g) decoupled-RoPE score term
    Softmax,
    Context,      // (h)
    OutProj,
    QkvProj,  // MHA/GQA fused Q/K/V projection
    FfnGate,
    FfnUp,
    FfnDown,
    FfnAct,
    Router,
    SharedExpert,
    RoutedExpert,
    AllReduce,
    MoeDispatch,
    MoeCombine,
};

const char* to_string(LayerKind kind);

// Coarse grouping used by the sweep output schema.
enum class LayerGroup { AttnFc, KvDecompress, CoreAttn, Ffn, Moe, Comm };
LayerGroup group_of(LayerKind kind);
const char* to_string(LayerGroup group);

struct LayerCost {
    LayerKind kind;
    double flops = 0.0;
    double bytes = 0.0;

    double ai() const { return bytes > 0 ? flops / bytes : 0.0; }
};

// Generic FC layer: rows x in_dim times in_dim x out_dim. Bytes count the
// weight once plus input and output activations.
LayerCost fc_cost(double b_eff, double in_dim, double out_dim, double dtype_bytes,
                  LayerKind kind = LayerKind::FfnGate);

// Per-device costs of every layer in an MLA attention block.
//
// Byte accounting: weights and L-sized streams (the latent cache, decompressed
// K/V, prefill activations) are read/written once per layer. The score matrix
// is written once by the score layer and streamed through softmax and context.
// Single-row (decode) activations are written by their producer and hit cache
// at the consumer. `fused` makes score and context share one C_KV read.
std::vector<LayerCost> mla_block_cost(const ModelSpec& model, Phase phase, bool reorder,
                                      bool fused, int64_t b, int64_t heads_per_device);

// Score/softmax/context for MHA/GQA; kv_heads_per_device already accounts for
// the GQA group and any head partitioning.
std::vector<LayerCost> mha_core_attention_cost(const ModelSpec& model, Phase phase, int64_t b,
                                               int64_t heads_per_device,
                                               int64_t kv_heads_per_device);

// Whole MHA/GQA attention block (projections + core attention).
std::vector<LayerCost> mha_block_cost(const ModelSpec& model, Phase phase, int64_t b,
                                      int64_t heads_per_device, int64_t kv_heads_per_device);

// Dispatch on the model's attention variant.
std::vector<LayerCost> attention_block_cost(const ModelSpec& model, Phase phase, bool reorder,
                                            bool fused, int64_t b, int64_t deg_tp);

// FFN / MoE block costs. For dense FFN `b` is the device's row count and
// d_ffn may be pre-divided for TP. For MoE the list carries the router and
// shared expert at `b` rows plus ONE routed expert at `tokens_per_expert`
// rows; the caller scales routed-expert entries by the device's expert count.
std::vector<LayerCost> ffn_or_moe_cost(const ModelSpec& model, int64_t b,
                                       int64_t tokens_per_expert, int64_t deg_tp = 1);

}  // namespace llmroof
