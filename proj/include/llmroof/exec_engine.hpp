#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "llmroof/comm_model.hpp"
#include "llmroof/layer_cost.hpp"
#include "llmroof/model_spec.hpp"
#include "llmroof/parallelism.hpp"

namespace llmroof {

// Sensitivity knobs. Defaults reproduce the headline numbers.
struct EngineParams {
    double comm_overlap = 0.0;  // fraction of comm hidden under compute, [0,1]
    double expert_skew = 1.0;   // >= 1, multiplies the max-loaded expert's tokens
    double act_scale = 1.0;     // multiplies M_act(L)
};

struct StageResult {
    double tpot = 0.0;                 // seconds per step (prefill: total time)
    double throughput_tok_s = 0.0;     // system-wide tokens/s
    double per_device_tok_s = 0.0;
    bool feasible = true;
    std::string infeasibility_reason;  // "capacity" | "plan" when infeasible
    struct Slice {
        LayerKind kind;
        double seconds;
        double fraction;
    };
    std::vector<Slice> breakdown;  // one entry per layer kind, whole model
};

// Per-request activation bytes of the widest layer in one decoder block
// (reused across blocks for capacity; paid per block for traffic).
double m_act_bytes(const ModelSpec& model, int64_t l, bool reorder, double act_scale = 1.0);

// Bytes resident on one device: weights + KV cache + activations (+
// materialized decompressed K/V for non-reordered MLA decode).
double memory_required(const ModelSpec& model, const DeploymentPlan& plan, int64_t b, int64_t l,
                       const EngineParams& params = {});

double weight_bytes_per_device(const ModelSpec& model, const DeploymentPlan& plan);

// Decode-stage time per output token at system batch b, context length l.
StageResult decode_tpot(const ModelSpec& model, const DeploymentPlan& plan, int64_t b, int64_t l,
                        const EngineParams& params = {});

// Prefill-stage latency for b requests of l_in input tokens.
StageResult prefill_time(const ModelSpec& model, const DeploymentPlan& plan, int64_t b,
                         int64_t l_in, const EngineParams& params = {});

// Ordered per-layer time shares for the chosen phase.
std::vector<StageResult::Slice> breakdown(const ModelSpec& model, const DeploymentPlan& plan,
                                          int64_t b, int64_t l, Phase::Kind phase,
                                          const EngineParams& params = {});

// Attention block only (per decoder block, per device): used for the
// reordering speedup and TP-scaling analyses.
double attention_block_time(const ModelSpec& model, const DeploymentPlan& plan, Phase phase,
                            int64_t b, bool reorder, bool fused = false);

// Same, restricted to score/softmax/context/rope-score.
double core_attention_time(const ModelSpec& model, const DeploymentPlan& plan, Phase phase,
                           int64_t b, bool reorder, bool fused = false);

}  // namespace llmroof
