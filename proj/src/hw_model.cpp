#include "llmroof/hw_model.hpp"

namespace llmroof {

namespace {

constexpr double kTera = 1e12;
constexpr double kGiga = 1e9;

AcceleratorSpec make_acc(const std::string& name, double tflops, double bw_gbps, double cap_gb) {
    AcceleratorSpec acc;
    acc.name = name;
    acc.peak_flops = tflops * kTera;
    acc.mem_bw = bw_gbps * kGiga;
    acc.mem_cap = cap_gb * kGiga;
    acc.validate();
    return acc;
}

}  // namespace

const std::vector<AcceleratorSpec>& hardware_presets() {
    // Vendor BF16 figures. The tpu-v7 bandwidth is the one its published
    // ridge point (320.42) was computed from.
    static const std::vector<AcceleratorSpec> presets = {
        make_acc("v100", 125.0, 900.0, 32.0),
        make_acc("a100", 312.0, 2039.0, 80.0),
        make_acc("h200", 989.5, 4800.0, 141.0),
        make_acc("b200", 2250.0, 8000.0, 192.0),
        make_acc("tpu-v5p", 459.0, 2765.0, 95.0),
        make_acc("tpu-v7", 2307.0, 7200.0, 192.0),
        make_acc("mi325x", 1307.4, 6000.0, 256.0),
    };
    return presets;
}

const AcceleratorSpec& hardware_preset(const std::string& name) {
    for (const auto& acc : hardware_presets())
        if (acc.name == name) return acc;
    throw std::invalid_argument("unknown hardware preset: " + name);
}

InterconnectSpec nvlink5_interconnect(int64_t group_size) {
    InterconnectSpec ic;
    ic.intra_bw = 900.0 * kGiga;
    ic.inter_bw = 100.0 * kGiga;  // InfiniBand XDR between groups
    ic.group_size = group_size;
    ic.validate();
    return ic;
}

}  // namespace llmroof
