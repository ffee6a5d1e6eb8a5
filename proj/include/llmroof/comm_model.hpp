#pragma once

#include <cstdint>

#include "llmroof/parallelism.hpp"

namespace llmroof {

// Bandwidth-bound transfer cost at the bottleneck device.
struct CommCost {
    double bytes_intra = 0.0;  // bytes on intra-group links, per device
    double bytes_inter = 0.0;  // bytes on inter-group links, per device
    double time = 0.0;         // seconds
    int phases = 0;            // transfer phases (for the latency term)
};

// All-to-all dispatch of every token to its n_k routed experts plus the
// combine on the way back, for one MoE block. Uniform destinations: the
// fraction (n_acc - group_size)/n_acc of traffic crosses group boundaries.
CommCost moe_dispatch_combine(int64_t b, const DeploymentPlan& plan, const ModelSpec& model);

// Ring all-reduce of (b/deg_dp) rows of bytes_per_row over the TP group.
CommCost tp_allreduce(int64_t b, const DeploymentPlan& plan, double bytes_per_row);

}  // namespace llmroof
