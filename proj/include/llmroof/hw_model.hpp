#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace llmroof {

// One accelerator: peak BF16 compute, HBM bandwidth, HBM capacity.
struct AcceleratorSpec {
    std::string name;
    double peak_flops = 0.0;  // FLOP/s
    double mem_bw = 0.0;      // bytes/s
    double mem_cap = 0.0;     // bytes
    double mfu = 1.0;         // efficiency scalar in (0,1] applied to peak_flops

    void validate() const {
        if (peak_flops <= 0 || mem_bw <= 0 || mem_cap <= 0)
            throw std::invalid_argument("accelerator spec fields must be positive: " + name);
        if (mfu <= 0 || mfu > 1.0)
            throw std::invalid_argument("mfu must lie in (0,1]");
    }

    double effective_flops() const { return peak_flops * mfu; }
};

// Two-tier interconnect: fully connected groups of `group_size` devices at
// `intra_bw`, groups linked at `inter_bw`. Bandwidths are unidirectional
// per device, bytes/s.
struct InterconnectSpec {
    double intra_bw = 0.0;
    double inter_bw = 0.0;
    int64_t group_size = 1;
    double link_latency = 0.0;  // seconds per transfer phase

    void validate() const {
        if (intra_bw < inter_bw)
            throw std::invalid_argument("intra-group bandwidth must be >= inter-group bandwidth");
        if (inter_bw < 0 || group_size < 1 || link_latency < 0)
            throw std::invalid_argument("invalid interconnect spec");
    }
};

struct SystemSpec {
    AcceleratorSpec accelerator;
    int64_t n_acc = 1;
    InterconnectSpec interconnect;

    void validate() const {
        accelerator.validate();
        interconnect.validate();
        if (n_acc < 1) throw std::invalid_argument("n_acc must be >= 1");
        if (n_acc % interconnect.group_size != 0)
            throw std::invalid_argument("n_acc must be a multiple of interconnect group_size");
    }
};

// Op/B at which the device flips from memory-bound to compute-bound.
inline double ridge_point(const AcceleratorSpec& acc) {
    return acc.effective_flops() / acc.mem_bw;
}

// max(compute time, memory time) for a kernel moving `bytes` and doing `flops`.
inline double roofline_time(double flops, double bytes, const AcceleratorSpec& acc) {
    double t_compute = flops / acc.effective_flops();
    double t_memory = bytes / acc.mem_bw;
    return t_compute > t_memory ? t_compute : t_memory;
}

// Built-in device presets (vendor-published BF16 figures).
const std::vector<AcceleratorSpec>& hardware_presets();
const AcceleratorSpec& hardware_preset(const std::string& name);

InterconnectSpec nvlink5_interconnect(int64_t group_size);

}  // namespace llmroof
