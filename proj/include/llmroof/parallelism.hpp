#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "llmroof/hw_model.hpp"
#include "llmroof/layer_cost.hpp"
#include "llmroof/model_spec.hpp"

namespace llmroof {

inline int64_t ceil_div(int64_t a, int64_t b) { return (a + b - 1) / b; }

// How a model is laid out on a system: TP x DP for attention (and dense FFN),
// EP = n_acc for MoE blocks. `instances` replicates the whole system that many
// times with no links between instances (throughput scales, latency does not).
struct DeploymentPlan {
    SystemSpec system;
    int64_t deg_tp = 1;
    int64_t deg_dp = 1;
    int64_t deg_ep = 1;
    bool reorder = true;
    bool fused = false;
    Phase::Kind stage = Phase::Kind::Decode;
    int64_t instances = 1;
    std::string id;

    int64_t n_acc() const { return system.n_acc; }
};

enum class BlockRole { AttentionFc, MoeExpert };

// Rows seen by one device's FC layers in the given block.
int64_t effective_batch(BlockRole role, int64_t b, const DeploymentPlan& plan,
                        const ModelSpec& model);

int64_t heads_per_device(const DeploymentPlan& plan, const ModelSpec& model);

// Stored KV-cache bytes per device. The MLA latent cache is shared by all
// heads, so TP replicates it; MHA/GQA caches split by heads.
double ckv_replication_bytes(const DeploymentPlan& plan, const ModelSpec& model, int64_t b,
                             int64_t l);

// Every violated invariant, in order; empty means the plan is valid.
std::vector<std::string> validate_plan(const DeploymentPlan& plan, const ModelSpec& model);

DeploymentPlan make_plan(const AcceleratorSpec& acc, int64_t n_acc, int64_t deg_tp,
                         int64_t deg_dp, double intra_bw, double inter_bw, int64_t group_size,
                         bool reorder = true, bool fused = false);

}  // namespace llmroof
