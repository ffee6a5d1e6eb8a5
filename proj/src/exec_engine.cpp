#include "llmroof/exec_engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace llmroof {

namespace {

double roofline(const LayerCost& layer, const AcceleratorSpec& acc) {
    return roofline_time(layer.flops, layer.bytes, acc);
}

// Accumulates (kind -> seconds) over a whole model evaluation.
struct TimeBook {
    std::map<LayerKind, double> seconds;
    double total = 0.0;

    void add(LayerKind kind, double s, double repeat = 1.0) {
        seconds[kind] += s * repeat;
        total += s * repeat;
    }
    void add_layers(const std::vector<LayerCost>& layers, const AcceleratorSpec& acc,
                    double repeat, double routed_multiplier = 1.0) {
        for (const auto& layer : layers) {
            double mult = layer.kind == LayerKind::RoutedExpert ? routed_multiplier : 1.0;
            add(layer.kind, roofline(layer, acc) * mult, repeat);
        }
    }
};

// Dense-FFN rows match the attention data layout (same TP x DP split).
void add_dense_ffn(TimeBook& book, const ModelSpec& model, const DeploymentPlan& plan,
                   int64_t rows, double blocks, const EngineParams& params) {
    if (blocks <= 0) return;
    ModelSpec dense_view = model;
    if (model.is_moe()) {
        const auto& moe = model.moe();
        dense_view.ffn = DenseFfn{moe.d_ffn_dense, true};
    }
    auto layers = ffn_or_moe_cost(dense_view, rows, 0, plan.deg_tp);
    book.add_layers(layers, plan.system.accelerator, blocks);
    if (plan.deg_tp > 1) {
        auto ar = tp_allreduce(rows * plan.deg_dp, plan,
                               static_cast<double>(model.d_emb * model.dtype_bytes));
        book.add(LayerKind::AllReduce, ar.time * (1.0 - params.comm_overlap), blocks);
    }
}

void add_moe_blocks(TimeBook& book, const ModelSpec& model, const DeploymentPlan& plan,
                    int64_t b, double blocks, const EngineParams& params) {
    if (blocks <= 0) return;
    const auto& moe = model.moe();
    int64_t tokens_per_expert = 0;
    if (moe.n_e > 0) {
        tokens_per_expert = static_cast<int64_t>(
            std::ceil(params.expert_skew * static_cast<double>(b) *
                      static_cast<double>(moe.n_k) / static_cast<double>(moe.n_e)));
    }
    int64_t local_rows = ceil_div(b, plan.n_acc());
    auto layers = ffn_or_moe_cost(model, local_rows, tokens_per_expert);
    double local_experts =
        moe.n_e > 0 ? static_cast<double>(ceil_div(moe.n_e, plan.deg_ep)) : 0.0;
    book.add_layers(layers, plan.system.accelerator, blocks, local_experts);
    auto comm = moe_dispatch_combine(b, plan, model);
    double t = comm.time * (1.0 - params.comm_overlap);
    book.add(LayerKind::MoeDispatch, t / 2.0, blocks);
    book.add(LayerKind::MoeCombine, t / 2.0, blocks);
}

TimeBook evaluate(const ModelSpec& model, const DeploymentPlan& plan, Phase phase, int64_t b,
                  bool reorder, const EngineParams& params) {
    TimeBook book;
    int64_t attn_rows = effective_batch(BlockRole::AttentionFc, b, plan, model);
    auto attn = attention_block_cost(model, phase, reorder, plan.fused, attn_rows, plan.deg_tp);
    book.add_layers(attn, plan.system.accelerator, static_cast<double>(model.n_dec));
    if (plan.deg_tp > 1) {
        auto ar = tp_allreduce(b * phase.new_rows_per_request(), plan,
                               static_cast<double>(model.d_emb * model.dtype_bytes));
        book.add(LayerKind::AllReduce, ar.time * (1.0 - params.comm_overlap),
                 static_cast<double>(model.n_dec));
    }

    // FFN rows: every new token flows through the FFN once.
    int64_t ffn_rows = attn_rows * phase.new_rows_per_request();
    int64_t ffn_tokens = b * phase.new_rows_per_request();
    if (model.is_moe()) {
        add_dense_ffn(book, model, plan, ffn_rows,
                      static_cast<double>(model.dense_block_count()), params);
        add_moe_blocks(book, model, plan, ffn_tokens,
                       static_cast<double>(model.moe_block_count()), params);
    } else {
        add_dense_ffn(book, model, plan, ffn_rows, static_cast<double>(model.n_dec), params);
    }
    return book;
}

StageResult finish(const DeploymentPlan& plan, const TimeBook& book, int64_t b, bool feasible,
                   const std::string& reason) {
    StageResult res;
    res.tpot = book.total;
    res.feasible = feasible;
    res.infeasibility_reason = reason;
    if (book.total > 0) {
        double sys_b = static_cast<double>(b) * static_cast<double>(plan.instances);
        res.throughput_tok_s = sys_b / book.total;
        res.per_device_tok_s =
            res.throughput_tok_s /
            (static_cast<double>(plan.n_acc()) * static_cast<double>(plan.instances));
    }
    res.breakdown.reserve(book.seconds.size());
    for (const auto& [kind, s] : book.seconds)
        res.breakdown.push_back({kind, s, book.total > 0 ? s / book.total : 0.0});
    return res;
}

}  // namespace

double m_act_bytes(const ModelSpec& model, int64_t l, bool reorder, double act_scale) {
    // Live set of the widest layer for one request: its score rows plus the
    // widest single-row activation.
    double score_rows = static_cast<double>(model.n_hd) * static_cast<double>(l);
    double row_width;
    if (model.is_mla() && reorder)
        row_width = static_cast<double>(model.n_hd) * static_cast<double>(model.mla().d_kvco);
    else
        row_width = static_cast<double>(model.d_dec());
    double ffn_width = 0.0;
    if (auto* d = std::get_if<DenseFfn>(&model.ffn))
        ffn_width = static_cast<double>(d->d_ffn);
    else
        ffn_width = static_cast<double>(model.moe().d_moe);
    row_width = std::max(row_width, ffn_width);
    return act_scale * static_cast<double>(model.dtype_bytes) * (score_rows + row_width);
}

double weight_bytes_per_device(const ModelSpec& model, const DeploymentPlan& plan) {
    double tp = static_cast<double>(plan.deg_tp);
    double attn = static_cast<double>(model.n_dec) *
                  static_cast<double>(attn_weight_bytes(model)) / tp;
    double ffn = 0.0;
    if (model.is_moe()) {
        const auto& moe = model.moe();
        double per_moe_block = 0.0;
        if (moe.n_e > 0) {
            per_moe_block += static_cast<double>(ceil_div(moe.n_e, plan.deg_ep)) *
                             static_cast<double>(expert_weight_bytes(model));
            per_moe_block += static_cast<double>(model.d_emb * moe.n_e * model.dtype_bytes);
        }
        per_moe_block += static_cast<double>(moe.n_shared) *
                         static_cast<double>(expert_weight_bytes(model));
        ffn = static_cast<double>(model.moe_block_count()) * per_moe_block +
              static_cast<double>(model.dense_block_count()) *
                  static_cast<double>(dense_ffn_weight_bytes(model)) / tp;
    } else {
        ffn = static_cast<double>(model.n_dec) *
              static_cast<double>(dense_ffn_weight_bytes(model)) / tp;
    }
    return attn + ffn;
}

double memory_required(const ModelSpec& model, const DeploymentPlan& plan, int64_t b, int64_t l,
                       const EngineParams& params) {
    double weights = weight_bytes_per_device(model, plan);
    if (b == 0) return weights;
    double kv = ckv_replication_bytes(plan, model, b, l);
    double requests = static_cast<double>(ceil_div(b, plan.deg_dp));
    double act = requests * m_act_bytes(model, l, plan.reorder, params.act_scale) /
                 static_cast<double>(plan.deg_tp);
    double materialized = 0.0;
    if (model.is_mla() && !plan.reorder) {
        // Decompressed K and V for the whole context live per step.
        materialized = requests * 2.0 * static_cast<double>(l) *
                       static_cast<double>(model.d_dec()) *
                       static_cast<double>(model.dtype_bytes) /
                       static_cast<double>(plan.deg_tp);
    }
    return weights + kv + act + materialized;
}

StageResult decode_tpot(const ModelSpec& model, const DeploymentPlan& plan, int64_t b, int64_t l,
                        const EngineParams& params) {
    auto violations = validate_plan(plan, model);
    if (!violations.empty()) {
        StageResult res;
        res.feasible = false;
        res.infeasibility_reason = "plan";
        return res;
    }
    TimeBook book = evaluate(model, plan, Phase::decode(l), b, plan.reorder, params);
    bool fits = memory_required(model, plan, b, l, params) <= plan.system.accelerator.mem_cap;
    return finish(plan, book, b, fits, fits ? "" : "capacity");
}

StageResult prefill_time(const ModelSpec& model, const DeploymentPlan& plan, int64_t b,
                         int64_t l_in, const EngineParams& params) {
    auto violations = validate_plan(plan, model);
    if (!violations.empty()) {
        StageResult res;
        res.feasible = false;
        res.infeasibility_reason = "plan";
        return res;
    }
    TimeBook book = evaluate(model, plan, Phase::prefill(l_in), b, plan.reorder, params);
    bool fits = memory_required(model, plan, b, l_in, params) <= plan.system.accelerator.mem_cap;
    // throughput counts one (first) token per request per pass
    return finish(plan, book, b, fits, fits ? "" : "capacity");
}

std::vector<StageResult::Slice> breakdown(const ModelSpec& model, const DeploymentPlan& plan,
                                          int64_t b, int64_t l, Phase::Kind phase,
                                          const EngineParams& params) {
    StageResult res = phase == Phase::Kind::Decode ? decode_tpot(model, plan, b, l, params)
                                                   : prefill_time(model, plan, b, l, params);
    return res.breakdown;
}

double attention_block_time(const ModelSpec& model, const DeploymentPlan& plan, Phase phase,
                            int64_t b, bool reorder, bool fused) {
    int64_t rows = effective_batch(BlockRole::AttentionFc, b, plan, model);
    auto layers = attention_block_cost(model, phase, reorder, fused, rows, plan.deg_tp);
    double total = 0.0;
    for (const auto& layer : layers) total += roofline(layer, plan.system.accelerator);
    if (plan.deg_tp > 1)
        total += tp_allreduce(b * phase.new_rows_per_request(), plan,
                              static_cast<double>(model.d_emb * model.dtype_bytes))
                     .time;
    return total;
}

double core_attention_time(const ModelSpec& model, const DeploymentPlan& plan, Phase phase,
                           int64_t b, bool reorder, bool fused) {
    int64_t rows = effective_batch(BlockRole::AttentionFc, b, plan, model);
    auto layers = attention_block_cost(model, phase, reorder, fused, rows, plan.deg_tp);
    double total = 0.0;
    for (const auto& layer : layers)
        if (group_of(layer.kind) == LayerGroup::CoreAttn)
            total += roofline(layer, plan.system.accelerator);
    return total;
}

}  // namespace llmroof
