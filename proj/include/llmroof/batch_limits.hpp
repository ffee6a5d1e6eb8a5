#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "llmroof/exec_engine.hpp"

namespace llmroof {

struct BatchLimits {
    int64_t b_attn = 0;  // batch reaching the ridge point in attention FCs
    int64_t b_moe = 0;   // batch reaching the ridge point in expert FCs
    int64_t b_rp = 0;    // max(b_attn, b_moe)
    int64_t b_cap = 0;   // memory-capacity limit at the given L
    std::optional<int64_t> b_slo;         // Eq-style lower-bound limit (T_min)
    std::optional<int64_t> b_slo_engine;  // limit under the full engine model
    std::string binding;                  // "capacity" | "slo" | "ridge"
    std::string note;                     // set when a limit degenerates to 0
};

// Ridge-point batch sizes: b_attn = ceil(RP * deg_dp), b_moe = ceil(RP * n_e/n_k).
void b_rp(const ModelSpec& model, const DeploymentPlan& plan, int64_t& b_attn, int64_t& b_moe,
          int64_t& b_ridge);

// Largest batch whose weights + KV + activations fit per device at length l.
int64_t b_cap(const ModelSpec& model, const DeploymentPlan& plan, int64_t l,
              const EngineParams& params = {}, std::string* note = nullptr);

// Largest batch meeting tpot_slo under the T_min lower bound (weight load +
// KV/activation traffic + communication). Bisection over the monotone bound.
int64_t b_slo(const ModelSpec& model, const DeploymentPlan& plan, int64_t l, double tpot_slo,
              const EngineParams& params = {}, std::string* note = nullptr);

// Same limit under the full decode_tpot model.
int64_t b_slo_engine(const ModelSpec& model, const DeploymentPlan& plan, int64_t l,
                     double tpot_slo, const EngineParams& params = {});

// Per-block T_min lower bound (Eq-style): KV/activation read + comm.
double t_min_block(const ModelSpec& model, const DeploymentPlan& plan, int64_t b, int64_t l,
                   const EngineParams& params = {});

BatchLimits batch_limits(const ModelSpec& model, const DeploymentPlan& plan, int64_t l,
                         std::optional<double> tpot_slo, const EngineParams& params = {});

}  // namespace llmroof
