#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "llmroof/exec_engine.hpp"
#include "llmroof/parallelism.hpp"

namespace llmroof {

// One fully resolved run configuration: model + system + plans + sweep grid.
struct SweepConfig {
    ModelSpec model;
    std::vector<DeploymentPlan> plans;
    std::vector<int64_t> batch_sizes;
    std::vector<int64_t> seq_lengths;
    Phase::Kind phase = Phase::Kind::Decode;
    std::optional<double> slo_s;
    EngineParams engine;
    std::string output_path;     // empty -> stdout
    std::string format = "csv";  // csv | json

    void validate() const;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parses an INI-style file with [hardware]/[interconnect]/[model]/[plan]/
// [sweep]/[engine] sections, or the equivalent JSON object (detected by a
// leading '{'). Unknown keys raise ConfigError with the offending line/field.
SweepConfig load_config_file(const std::string& path);
SweepConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");

}  // namespace llmroof
