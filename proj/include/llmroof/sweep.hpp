#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "llmroof/batch_limits.hpp"
#include "llmroof/config.hpp"

namespace llmroof {

// One (plan, B, L) evaluation. Breakdown columns are aggregated by layer
// group; all times in seconds, throughputs in tokens/s.
struct SweepRecord {
    std::string model;
    std::string plan_id;
    std::string phase;
    int64_t b = 0;
    int64_t l = 0;
    double tpot_s = 0.0;
    double throughput_tok_s = 0.0;
    double per_device_tok_s = 0.0;
    bool feasible = true;
    std::string binding_limit;  // capacity | slo | ridge
    double attn_fc_s = 0.0;
    double kv_decompress_s = 0.0;
    double core_attn_s = 0.0;
    double ffn_s = 0.0;
    double moe_s = 0.0;
    double comm_s = 0.0;
};

std::vector<SweepRecord> run_sweep(const SweepConfig& config, int jobs = 1);

std::string records_to_csv(const std::vector<SweepRecord>& records);
std::string records_to_json(const std::vector<SweepRecord>& records);

}  // namespace llmroof
