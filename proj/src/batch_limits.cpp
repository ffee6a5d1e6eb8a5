#include "llmroof/batch_limits.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace llmroof {

void b_rp(const ModelSpec& model, const DeploymentPlan& plan, int64_t& b_attn, int64_t& b_moe,
          int64_t& b_ridge) {
    double rp = ridge_point(plan.system.accelerator);
    b_attn = static_cast<int64_t>(std::ceil(rp * static_cast<double>(plan.deg_dp)));
    b_moe = 0;
    if (model.is_moe() && model.moe().n_k > 0) {
        const auto& moe = model.moe();
        b_moe = static_cast<int64_t>(
            std::ceil(rp * static_cast<double>(moe.n_e) / static_cast<double>(moe.n_k)));
    }
    b_ridge = std::max(b_attn, b_moe);
}

int64_t b_cap(const ModelSpec& model, const DeploymentPlan& plan, int64_t l,
              const EngineParams& params, std::string* note) {
    double weights = weight_bytes_per_device(model, plan);
    double cap = plan.system.accelerator.mem_cap;
    if (weights >= cap) {
        if (note) *note = "weights exceed capacity";
        return 0;
    }
    // Per-request bytes on the device that hosts it.
    double kv = static_cast<double>(kv_bytes_per_token(model)) * static_cast<double>(l);
    if (!model.is_mla()) kv /= static_cast<double>(plan.deg_tp);
    double act = m_act_bytes(model, l, plan.reorder, params.act_scale) /
                 static_cast<double>(plan.deg_tp);
    double materialized = 0.0;
    if (model.is_mla() && !plan.reorder) {
        materialized = 2.0 * static_cast<double>(l) * static_cast<double>(model.d_dec()) *
                       static_cast<double>(model.dtype_bytes) / static_cast<double>(plan.deg_tp);
    }
    // Requests shard ceil-wise over DP groups, so the limit is a whole number
    // of requests per group; this keeps b_cap exactly on the engine's
    // feasibility frontier.
    double requests_per_device = std::floor((cap - weights) / (kv + act + materialized));
    return static_cast<int64_t>(requests_per_device) * plan.deg_dp;
}

double t_min_block(const ModelSpec& model, const DeploymentPlan& plan, int64_t b, int64_t l,
                   const EngineParams& params) {
    // Per decoder block: the KV rows for this block plus the (reused, but
    // re-touched) activation buffer, spread over the system's bandwidth.
    double kv_per_token_block = static_cast<double>(kv_bytes_per_token(model)) /
                                static_cast<double>(model.n_dec);
    double traffic = static_cast<double>(b) *
                     (kv_per_token_block * static_cast<double>(l) +
                      m_act_bytes(model, l, plan.reorder, params.act_scale)) /
                     (static_cast<double>(plan.n_acc()) * plan.system.accelerator.mem_bw);
    double comm = 0.0;
    if (model.is_moe()) {
        comm = moe_dispatch_combine(b, plan, model).time *
               static_cast<double>(model.moe_block_count()) /
               static_cast<double>(model.n_dec);
    }
    if (plan.deg_tp > 1) {
        comm += tp_allreduce(b, plan,
                             static_cast<double>(model.d_emb * model.dtype_bytes))
                    .time;
    }
    return traffic + comm * (1.0 - params.comm_overlap);
}

namespace {

// Largest b in [1, hi] with pred(b) true; pred must be monotone (true then false).
int64_t bisect_max(int64_t hi, const std::function<bool(int64_t)>& pred) {
    if (!pred(1)) return 0;
    int64_t lo = 1;
    while (pred(hi)) {
        lo = hi;
        if (hi > (int64_t{1} << 40)) return hi;  // unbounded in practice
        hi *= 2;
    }
    while (lo + 1 < hi) {
        int64_t mid = lo + (hi - lo) / 2;
        (pred(mid) ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace

int64_t b_slo(const ModelSpec& model, const DeploymentPlan& plan, int64_t l, double tpot_slo,
              const EngineParams& params, std::string* note) {
    double load_floor = weight_bytes_per_device(model, plan) / plan.system.accelerator.mem_bw;
    if (tpot_slo <= load_floor) {
        if (note) *note = "slo below the weight-load floor";
        return 0;
    }
    double n_dec = static_cast<double>(model.n_dec);
    double load_per_block = load_floor / n_dec;
    auto fits = [&](int64_t b) {
        return n_dec * (load_per_block + t_min_block(model, plan, b, l, params)) <= tpot_slo;
    };
    return bisect_max(1024, fits);
}

int64_t b_slo_engine(const ModelSpec& model, const DeploymentPlan& plan, int64_t l,
                     double tpot_slo, const EngineParams& params) {
    auto fits = [&](int64_t b) {
        return decode_tpot(model, plan, b, l, params).tpot <= tpot_slo;
    };
    return bisect_max(1024, fits);
}

BatchLimits batch_limits(const ModelSpec& model, const DeploymentPlan& plan, int64_t l,
                         std::optional<double> tpot_slo, const EngineParams& params) {
    BatchLimits out;
    b_rp(model, plan, out.b_attn, out.b_moe, out.b_rp);
    out.b_cap = b_cap(model, plan, l, params, &out.note);
    int64_t tightest = out.b_cap;
    out.binding = "capacity";
    if (tpot_slo) {
        out.b_slo = b_slo(model, plan, l, *tpot_slo, params, &out.note);
        out.b_slo_engine = b_slo_engine(model, plan, l, *tpot_slo, params);
        if (*out.b_slo < tightest) {
            tightest = *out.b_slo;
            out.binding = "slo";
        }
    }
    if (tightest >= out.b_rp) out.binding = "ridge";
    return out;
}

}  // namespace llmroof
