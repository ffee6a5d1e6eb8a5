#include "llmroof/layer_cost.hpp"

#include <stdexcept>

namespace llmroof {

const char* to_string(LayerKind kind) {
    switch (kind) {
        case LayerKind::QkvCompress: return "qkv_compress";
        case LayerKind::QRope: return "q_rope";
        case LayerKind::QDecompress: return "q_decompress";
        case LayerKind::KDecompress: return "k_decompress";
        case LayerKind::VDecompress: return "v_decompress";
        case LayerKind::Score: return "score";
        case LayerKind::ScoreRope: return "score_rope";
        case LayerKind::Softmax: return "softmax";
        case LayerKind::Context: return "context";
        case LayerKind::OutProj: return "out_proj";
        case LayerKind::QkvProj: return "qkv_proj";
        case LayerKind::FfnGate: return "ffn_gate";
        case LayerKind::FfnUp: return "ffn_up";
        case LayerKind::FfnDown: return "ffn_down";
        case LayerKind::FfnAct: return "ffn_act";
        case LayerKind::Router: return "router";
        case LayerKind::SharedExpert: return "shared_expert";
        case LayerKind::RoutedExpert: return "routed_expert";
        case LayerKind::AllReduce: return "tp_allreduce";
        case LayerKind::MoeDispatch: return "moe_dispatch";
        case LayerKind::MoeCombine: return "moe_combine";
    }
    return "unknown";
}

LayerGroup group_of(LayerKind kind) {
    switch (kind) {
        case LayerKind::QkvCompress:
        case LayerKind::QRope:
        case LayerKind::QDecompress:
        case LayerKind::OutProj:
        case LayerKind::QkvProj:
            return LayerGroup::AttnFc;
        case LayerKind::KDecompress:
        case LayerKind::VDecompress:
            return LayerGroup::KvDecompress;
        case LayerKind::Score:
        case LayerKind::ScoreRope:
        case LayerKind::Softmax:
        case LayerKind::Context:
            return LayerGroup::CoreAttn;
        case LayerKind::FfnGate:
        case LayerKind::FfnUp:
        case LayerKind::FfnDown:
        case LayerKind::FfnAct:
            return LayerGroup::Ffn;
        case LayerKind::Router:
        case LayerKind::SharedExpert:
        case LayerKind::RoutedExpert:
            return LayerGroup::Moe;
        case LayerKind::AllReduce:
        case LayerKind::MoeDispatch:
        case LayerKind::MoeCombine:
            return LayerGroup::Comm;
    }
    return LayerGroup::AttnFc;
}

const char* to_string(LayerGroup group) {
    switch (group) {
        case LayerGroup::AttnFc: return "attn_fc";
        case LayerGroup::KvDecompress: return "kv_decompress";
        case LayerGroup::CoreAttn: return "core_attn";
        case LayerGroup::Ffn: return "ffn";
        case LayerGroup::Moe: return "moe";
        case LayerGroup::Comm: return "comm";
    }
    return "unknown";
}

LayerCost fc_cost(double b_eff, double in_dim, double out_dim, double dtype_bytes,
                  LayerKind kind) {
    LayerCost c{kind, 0.0, 0.0};
    c.flops = 2.0 * b_eff * in_dim * out_dim;
    c.bytes = dtype_bytes * (in_dim * out_dim + b_eff * in_dim + b_eff * out_dim);
    return c;
}

namespace {

// Activation residency: single-row (decode) tensors are produced once and
// consumed from cache; anything L-sized always pays memory traffic.
struct Ctx {
    double dt = 0.0;     // dtype bytes
    double b = 0.0;      // requests on this device
    double rows = 0.0;   // b * new rows per request
    double l = 0.0;      // attended context length
    bool row1 = false;   // one new row per request (decode or l_in == 1)
    double heads = 0.0;  // heads on this device
    double read(double elems) const { return row1 ? 0.0 : dt * elems; }
};

LayerCost make(LayerKind kind, double flops, double bytes) { return {kind, flops, bytes}; }

}  // namespace

std::vector<LayerCost> mla_block_cost(const ModelSpec& model, Phase phase, bool reorder,
                                      bool fused, int64_t b, int64_t heads_per_device) {
    if (!model.is_mla()) throw std::invalid_argument("mla_block_cost requires an MLA model");
    const auto& mla = model.mla();
    Ctx cx;
    cx.dt = static_cast<double>(model.dtype_bytes);
    cx.b = static_cast<double>(b);
    cx.rows = cx.b * static_cast<double>(phase.new_rows_per_request());
    cx.l = static_cast<double>(phase.len);
    cx.row1 = phase.new_rows_per_request() == 1;
    cx.heads = static_cast<double>(heads_per_device);

    const double d_emb = static_cast<double>(model.d_emb);
    const double d_hd = static_cast<double>(model.d_hd);
    const double d_qco = static_cast<double>(mla.d_qco);
    const double d_kvco = static_cast<double>(mla.d_kvco);
    const double d_rope = static_cast<double>(mla.d_rope);
    const double nh = cx.heads;
    const double r = cx.rows;
    const double bl = cx.b * cx.l;

    std::vector<LayerCost> out;
    out.reserve(10);

    // (a) H -> C_Q, C_KV, k_rope. Head-independent, replicated under TP.
    {
        double width = d_qco + d_kvco + d_rope;
        out.push_back(make(LayerKind::QkvCompress, 2.0 * r * d_emb * width,
                           cx.dt * (d_emb * width + r * width) + cx.read(r * d_emb)));
    }
    // (b) C_Q -> per-head rotary queries (projection + rotation in place).
    out.push_back(make(LayerKind::QRope, 2.0 * r * d_qco * nh * d_rope,
                       cx.dt * (d_qco * nh * d_rope + r * nh * d_rope) + cx.read(r * d_qco)));
    // (c) C_Q -> Q.
    out.push_back(make(LayerKind::QDecompress, 2.0 * r * d_qco * nh * d_hd,
                       cx.dt * (d_qco * nh * d_hd + r * nh * d_hd) + cx.read(r * d_qco)));

    if (reorder) {
        // (d) Q-side W_DK multiply: rows independent of L.
        out.push_back(make(LayerKind::KDecompress, 2.0 * r * nh * d_hd * d_kvco,
                           cx.dt * (d_kvco * nh * d_hd + r * nh * d_kvco) +
                               cx.read(r * nh * d_hd)));
        // (e) output-side W_DV multiply on the latent context.
        out.push_back(make(LayerKind::VDecompress, 2.0 * r * nh * d_kvco * d_hd,
                           cx.dt * (d_kvco * nh * d_hd + r * nh * d_hd) +
                               cx.read(r * nh * d_kvco)));
        // (f) scores against the shared latent cache; S written once.
        out.push_back(make(LayerKind::Score, 2.0 * r * nh * cx.l * d_kvco,
                           cx.dt * (bl * d_kvco + r * nh * cx.l) + cx.read(r * nh * d_kvco)));
        // (h) latent context; reuses the score layer's C_KV read when fused.
        out.push_back(make(LayerKind::Context, 2.0 * r * nh * cx.l * d_kvco,
                           cx.dt * ((fused ? 0.0 : bl * d_kvco) + r * nh * d_kvco)));
    } else {
        // (d)/(e) decompress the whole cached context every step.
        double dec_flops = 2.0 * bl * d_kvco * nh * d_hd;
        double dec_bytes = cx.dt * (bl * d_kvco + d_kvco * nh * d_hd + bl * nh * d_hd);
        out.push_back(make(LayerKind::KDecompress, dec_flops, dec_bytes));
        out.push_back(make(LayerKind::VDecompress, dec_flops, dec_bytes));
        // (f) plain per-head score.
        out.push_back(make(LayerKind::Score, 2.0 * r * nh * cx.l * d_hd,
                           cx.dt * (bl * nh * d_hd + r * nh * cx.l) + cx.read(r * nh * d_hd)));
        // (h) plain per-head context.
        out.push_back(make(LayerKind::Context, 2.0 * r * nh * cx.l * d_hd,
                           cx.dt * (bl * nh * d_hd + r * nh * d_hd)));
    }

    // (g) decoupled-RoPE score term; the rope cache is shared across heads.
    out.push_back(make(LayerKind::ScoreRope, 2.0 * r * nh * cx.l * d_rope,
                       cx.dt * bl * d_rope + cx.read(r * nh * d_rope)));
    // Softmax streams between score and context.
    out.push_back(make(LayerKind::Softmax, 0.0, 0.0));
    // Output projection over this device's heads.
    out.push_back(make(LayerKind::OutProj, 2.0 * r * nh * d_hd * d_emb,
                       cx.dt * (nh * d_hd * d_emb + r * d_emb) + cx.read(r * nh * d_hd)));
    return out;
}

std::vector<LayerCost> mha_core_attention_cost(const ModelSpec& model, Phase phase, int64_t b,
                                               int64_t heads_per_device,
                                               int64_t kv_heads_per_device) {
    Ctx cx;
    cx.dt = static_cast<double>(model.dtype_bytes);
    cx.b = static_cast<double>(b);
    cx.rows = cx.b * static_cast<double>(phase.new_rows_per_request());
    cx.l = static_cast<double>(phase.len);
    cx.row1 = phase.new_rows_per_request() == 1;

    const double d_hd = static_cast<double>(model.d_hd);
    const double nh = static_cast<double>(heads_per_device);
    const double kvh = static_cast<double>(kv_heads_per_device);
    const double r = cx.rows;
    const double bl = cx.b * cx.l;

    std::vector<LayerCost> out;
    out.push_back(make(LayerKind::Score, 2.0 * r * nh * cx.l * d_hd,
                       cx.dt * (bl * kvh * d_hd + r * nh * cx.l) + cx.read(r * nh * d_hd)));
    out.push_back(make(LayerKind::Softmax, 0.0, 0.0));
    out.push_back(make(LayerKind::Context, 2.0 * r * nh * cx.l * d_hd,
                       cx.dt * (bl * kvh * d_hd + r * nh * d_hd)));
    return out;
}

std::vector<LayerCost> mha_block_cost(const ModelSpec& model, Phase phase, int64_t b,
                                      int64_t heads_per_device, int64_t kv_heads_per_device) {
    Ctx cx;
    cx.dt = static_cast<double>(model.dtype_bytes);
    cx.rows = static_cast<double>(b) * static_cast<double>(phase.new_rows_per_request());
    cx.row1 = phase.new_rows_per_request() == 1;

    const double d_emb = static_cast<double>(model.d_emb);
    const double d_hd = static_cast<double>(model.d_hd);
    const double nh = static_cast<double>(heads_per_device);
    const double kvh = static_cast<double>(kv_heads_per_device);
    const double r = cx.rows;

    std::vector<LayerCost> out;
    double qkv_width = (nh + 2.0 * kvh) * d_hd;
    out.push_back(make(LayerKind::QkvProj, 2.0 * r * d_emb * qkv_width,
                       cx.dt * (d_emb * qkv_width + r * qkv_width) + cx.read(r * d_emb)));
    auto core = mha_core_attention_cost(model, phase, b, heads_per_device, kv_heads_per_device);
    out.insert(out.end(), core.begin(), core.end());
    out.push_back(make(LayerKind::OutProj, 2.0 * r * nh * d_hd * d_emb,
                       cx.dt * (nh * d_hd * d_emb + r * d_emb) + cx.read(r * nh * d_hd)));
    return out;
}

std::vector<LayerCost> attention_block_cost(const ModelSpec& model, Phase phase, bool reorder,
                                            bool fused, int64_t b, int64_t deg_tp) {
    int64_t heads = model.n_hd / deg_tp;
    if (model.is_mla()) return mla_block_cost(model, phase, reorder, fused, b, heads);
    int64_t kv_heads = heads / model.kv_group_size();
    if (kv_heads < 1) kv_heads = 1;
    return mha_block_cost(model, phase, b, heads, kv_heads);
}

std::vector<LayerCost> ffn_or_moe_cost(const ModelSpec& model, int64_t b,
                                       int64_t tokens_per_expert, int64_t deg_tp) {
    const double dt = static_cast<double>(model.dtype_bytes);
    const double d_emb = static_cast<double>(model.d_emb);
    std::vector<LayerCost> out;

    if (auto* dense = std::get_if<DenseFfn>(&model.ffn)) {
        double width = static_cast<double>(dense->d_ffn) / static_cast<double>(deg_tp);
        double rows = static_cast<double>(b);
        if (dense->gated)
            out.push_back(fc_cost(rows, d_emb, width, dt, LayerKind::FfnGate));
        out.push_back(fc_cost(rows, d_emb, width, dt, LayerKind::FfnUp));
        out.push_back(make(LayerKind::FfnAct, 0.0, dt * (dense->gated ? 3.0 : 2.0) * rows * width));
        out.push_back(fc_cost(rows, width, d_emb, dt, LayerKind::FfnDown));
        return out;
    }

    const auto& moe = model.moe();
    const double d_moe = static_cast<double>(moe.d_moe);
    out.push_back(fc_cost(static_cast<double>(b), d_emb, static_cast<double>(moe.n_e), dt,
                          LayerKind::Router));
    for (int64_t s = 0; s < moe.n_shared; ++s) {
        auto gate = fc_cost(static_cast<double>(b), d_emb, d_moe, dt, LayerKind::SharedExpert);
        out.push_back(gate);
        out.push_back(gate);  // up projection, same shape
        out.push_back(fc_cost(static_cast<double>(b), d_moe, d_emb, dt, LayerKind::SharedExpert));
        out.push_back(make(LayerKind::SharedExpert, 0.0,
                           dt * 3.0 * static_cast<double>(b) * d_moe));
    }
    // One routed expert; the engine multiplies by the device's expert count.
    double t = static_cast<double>(tokens_per_expert);
    out.push_back(fc_cost(t, d_emb, d_moe, dt, LayerKind::RoutedExpert));
    out.push_back(fc_cost(t, d_emb, d_moe, dt, LayerKind::RoutedExpert));
    out.push_back(fc_cost(t, d_moe, d_emb, dt, LayerKind::RoutedExpert));
    out.push_back(make(LayerKind::RoutedExpert, 0.0, dt * 3.0 * t * d_moe));
    return out;
}

}  // namespace llmroof
