#include "llmroof/comm_model.hpp"

namespace llmroof {

CommCost moe_dispatch_combine(int64_t b, const DeploymentPlan& plan, const ModelSpec& model) {
    CommCost cost;
    if (!model.is_moe()) return cost;
    const auto& moe = model.moe();
    if (moe.n_k == 0 || b == 0) return cost;

    const auto& ic = plan.system.interconnect;
    double n_acc = static_cast<double>(plan.n_acc());
    // Per-device wire bytes in one direction (dispatch); combine mirrors it.
    double per_dir = static_cast<double>(b) * static_cast<double>(moe.n_k) *
                     static_cast<double>(model.d_emb) * static_cast<double>(model.dtype_bytes) /
                     n_acc;
    double frac_inter = (n_acc - static_cast<double>(ic.group_size)) / n_acc;
    cost.bytes_intra = 2.0 * per_dir * (1.0 - frac_inter);
    cost.bytes_inter = 2.0 * per_dir * frac_inter;
    cost.phases = 2;
    cost.time = cost.bytes_intra / ic.intra_bw +
                (cost.bytes_inter > 0 ? cost.bytes_inter / ic.inter_bw : 0.0) +
                ic.link_latency * cost.phases;
    return cost;
}

CommCost tp_allreduce(int64_t b, const DeploymentPlan& plan, double bytes_per_row) {
    CommCost cost;
    if (plan.deg_tp <= 1) return cost;
    const auto& ic = plan.system.interconnect;
    double p = static_cast<double>(plan.deg_tp);
    double payload = static_cast<double>(ceil_div(b, plan.deg_dp)) * bytes_per_row;
    // Ring all-reduce: reduce-scatter + all-gather, 2(p-1) steps of payload/p.
    cost.bytes_intra = 2.0 * (p - 1.0) / p * payload;
    cost.phases = 1;
    cost.time = cost.bytes_intra / ic.intra_bw + ic.link_latency;
    return cost;
}

}  // namespace llmroof
