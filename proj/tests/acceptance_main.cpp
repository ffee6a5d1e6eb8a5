// Acceptance suite: every headline quantity the model must reproduce, one
// pass/fail line each. Exits nonzero if anything fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "llmroof/batch_limits.hpp"
#include "llmroof/reorder_oracle.hpp"
#include "llmroof/sweep.hpp"

using namespace llmroof;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] %2d. %-34s %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    if (!ok) ++g_failures;
}

bool within(double value, double target, double rel) {
    return std::abs(value - target) <= rel * std::abs(target);
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), pattern, a, b, c);
    return buf;
}

const ModelSpec& r1() { return model_preset("deepseek-r1"); }
const ModelSpec& gpt3() { return model_preset("gpt-3"); }

DeploymentPlan r1_plan32() {
    return make_plan(hardware_preset("b200"), 32, 1, 32, 900e9, 100e9, 32);
}

DeploymentPlan single_device() {
    return make_plan(hardware_preset("b200"), 1, 1, 1, 900e9, 100e9, 1);
}

// 1. Seven published ridge points, exact to two decimals.
void criterion_ridge_points() {
    struct Row {
        const char* name;
        double expected;
    };
    const Row rows[] = {
        {"v100", 138.89}, {"a100", 153.02},   {"h200", 206.15},  {"b200", 281.25},
        {"tpu-v5p", 166.00}, {"tpu-v7", 320.42}, {"mi325x", 217.90},
    };
    bool ok = true;
    std::string detail;
    for (const auto& row : rows) {
        double rp = std::round(ridge_point(hardware_preset(row.name)) * 100.0) / 100.0;
        if (rp != row.expected) {
            ok = false;
            detail += std::string(row.name) + "=" + std::to_string(rp) + " ";
        }
    }
    if (ok) detail = "all 7 devices recompute exactly";
    report(1, "ridge points", ok, detail);
}

// 2. The eight decode/prefill a.i. cells at flagship dims, +/-15%.
void criterion_table_ai() {
    auto cell = [](const std::vector<LayerCost>& layers, LayerKind kind) {
        for (const auto& l : layers)
            if (l.kind == kind) return l.ai();
        return 0.0;
    };
    auto dec_plain = mla_block_cost(r1(), Phase::decode(8192), false, false, 4096, 128);
    auto dec_reord = mla_block_cost(r1(), Phase::decode(8192), true, false, 4096, 128);
    auto pre_plain = mla_block_cost(r1(), Phase::prefill(8192), false, false, 1, 128);
    auto pre_reord = mla_block_cost(r1(), Phase::prefill(8192), true, false, 1, 128);
    struct Cell {
        const char* name;
        double got;
        double want;
    };
    const Cell cells[] = {
        {"pre/kdec/plain", cell(pre_plain, LayerKind::KDecompress), 512.0},
        {"pre/kdec/reord", cell(pre_reord, LayerKind::KDecompress), 100.0},
        {"pre/score/plain", cell(pre_plain, LayerKind::Score), 128.0},
        {"pre/score/reord", cell(pre_reord, LayerKind::Score), 512.0},
        {"dec/kdec/plain", cell(dec_plain, LayerKind::KDecompress), 512.0},
        {"dec/kdec/reord", cell(dec_reord, LayerKind::KDecompress), 128.0},
        {"dec/score/plain", cell(dec_plain, LayerKind::Score), 1.0},
        {"dec/score/reord", cell(dec_reord, LayerKind::Score), 100.0},
    };
    bool ok = true;
    std::string detail;
    for (const auto& c : cells) {
        if (!within(c.got, c.want, 0.15)) {
            ok = false;
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%s=%.1f(want %.0f) ", c.name, c.got, c.want);
            detail += buf;
        }
    }
    if (ok) detail = "all 8 cells within 15%";
    report(2, "core-attention a.i. cells", ok, detail);
}

// 3. KV-cache bytes per token, exact.
void criterion_kv_bytes() {
    int64_t g = kv_bytes_per_token(gpt3());
    int64_t d = kv_bytes_per_token(r1());
    bool ok = g == 4718592 && d == 70272;
    report(3, "kv bytes per token", ok,
           fmt("dense=%.0f (want 4718592), latent=%.0f (want 70272)", static_cast<double>(g),
               static_cast<double>(d)));
}

// 4. Oracle equivalence + instrumented count validation.
void criterion_oracle() {
    auto start = std::chrono::steady_clock::now();
    auto res = oracle::run_verification(100);
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool ok = res.ok() && secs < 10.0;
    report(4, "reordering oracle", ok,
           fmt("100 instances, max rel err %.2e, %.2fs", res.max_rel_err, secs));
    for (const auto& msg : res.messages) std::printf("        %s\n", msg.c_str());
}

// 5. Ridge-point batch sizes, exact.
void criterion_b_rp() {
    int64_t b_attn = 0, b_moe = 0, b_ridge = 0;
    b_rp(r1(), r1_plan32(), b_attn, b_moe, b_ridge);
    bool ok = b_moe == 9000 && b_attn == 9000;
    // exactness across plans: b_attn = ceil(RP * deg_dp)
    for (int64_t dp : {1, 4, 64}) {
        DeploymentPlan plan = make_plan(hardware_preset("b200"), dp, 1, dp, 900e9, 100e9, dp);
        int64_t a, m, r;
        b_rp(r1(), plan, a, m, r);
        ok = ok && a == static_cast<int64_t>(std::ceil(281.25 * dp)) && m == 9000;
    }
    report(5, "ridge-point batch sizes", ok,
           fmt("b_moe=%.0f b_attn=%.0f (32-way)", static_cast<double>(b_moe),
               static_cast<double>(b_attn)));
}

// 6. Capacity limits at L=8192 on 32 devices.
void criterion_b_cap() {
    EngineParams params;
    int64_t cap_r1 = b_cap(r1(), r1_plan32(), 8192, params);
    DeploymentPlan gplan = make_plan(hardware_preset("b200"), 32, 8, 4, 900e9, 100e9, 32);
    int64_t cap_g = b_cap(gpt3(), gplan, 8192, params);
    bool ok = within(static_cast<double>(cap_r1), 7360.0, 0.15) &&
              within(static_cast<double>(cap_g), 124.0, 0.25);
    report(6, "capacity batch limits", ok,
           fmt("latent/MoE=%.0f (want ~7360), dense=%.0f (want ~124)",
               static_cast<double>(cap_r1), static_cast<double>(cap_g)));
}

// 7. Reordering: decode speedup >= 50x on the grid; prefill ratio 2.02 +/- 20%.
void criterion_reordering() {
    auto plan = single_device();
    double best = 0.0;
    for (int64_t b = 1; b <= 256; b *= 4)
        for (int64_t l = 1024; l <= 8192; l *= 2) {
            double plain = attention_block_time(r1(), plan, Phase::decode(l), b, false);
            double reord = attention_block_time(r1(), plan, Phase::decode(l), b, true);
            best = std::max(best, plain / reord);
        }
    double plain = attention_block_time(r1(), plan, Phase::prefill(4096), 1, false);
    double reord = attention_block_time(r1(), plan, Phase::prefill(4096), 1, true);
    double ratio = reord / plain;
    bool ok = best >= 50.0 && within(ratio, 2.02, 0.20);
    report(7, "reordering speedups", ok,
           fmt("decode x%.1f (>=50), prefill x%.2f (want 2.02 +/- 20%%)", best, ratio));
}

// 8. Attention-block time shares at per-device B=128, L=4096, no reordering.
void criterion_breakdown_shares() {
    auto plan = single_device();
    auto layers = attention_block_cost(r1(), Phase::decode(4096), false, false, 128, 1);
    double block = 0.0, kv = 0.0, core = 0.0;
    for (const auto& layer : layers) {
        double t = roofline_time(layer.flops, layer.bytes, plan.system.accelerator);
        block += t;
        if (group_of(layer.kind) == LayerGroup::KvDecompress) kv += t;
        if (group_of(layer.kind) == LayerGroup::CoreAttn) core += t;
    }
    double kv_share = kv / block, core_share = core / block;
    bool ok = kv_share + core_share >= 0.90 && kv_share > core_share &&
              std::abs(kv_share - 0.59) <= 0.10 && std::abs(core_share - 0.40) <= 0.10;
    report(8, "decode breakdown shares", ok,
           fmt("kv-dec %.0f%%, core %.0f%% (want ~59/40)", kv_share * 100, core_share * 100));
}

// 9. Model-invariant property suite (no published numbers involved).
void criterion_properties() {
    auto start = std::chrono::steady_clock::now();
    std::vector<std::string> failures;
    EngineParams params;
    auto plan = r1_plan32();

    // core-attention a.i. ignores the batch size
    for (bool reorder : {false, true}) {
        auto base = mla_block_cost(r1(), Phase::decode(4096), reorder, false, 1, 128);
        double ai1 = 0.0;
        for (const auto& l : base)
            if (l.kind == LayerKind::Score) ai1 = l.ai();
        for (int64_t b : {8, 512}) {
            auto scaled = mla_block_cost(r1(), Phase::decode(4096), reorder, false, b, 128);
            for (const auto& l : scaled)
                if (l.kind == LayerKind::Score && std::abs(l.ai() - ai1) > 1e-9 * ai1)
                    failures.push_back("score a.i. moved with batch size");
        }
    }

    // reordered core attention is TP-invariant at large L
    double tp_base = 0.0;
    for (int64_t tp : {1, 2, 4, 8}) {
        DeploymentPlan tplan = make_plan(hardware_preset("b200"), tp, tp, 1, 900e9, 100e9, tp);
        double t = core_attention_time(r1(), tplan, Phase::decode(16384), 64, true);
        if (tp == 1)
            tp_base = t;
        else if (std::abs(t - tp_base) / tp_base > 0.10)
            failures.push_back("core-attention time moved more than 10% at tp=" +
                               std::to_string(tp));
    }

    // b_moe never changes with the plan
    int64_t a, m_ref, r;
    b_rp(r1(), r1_plan32(), a, m_ref, r);
    for (int64_t n : {8, 64, 256}) {
        DeploymentPlan p = make_plan(hardware_preset("b200"), n, 1, n, 900e9, 100e9, n);
        int64_t m = 0;
        b_rp(r1(), p, a, m, r);
        if (m != m_ref) failures.push_back("b_moe changed with the plan");
    }

    // heavier experts tighten limits, fatter caches tighten them too
    ModelSpec heavier = r1();
    auto moe = heavier.moe();
    moe.d_moe *= 2;
    heavier.ffn = moe;
    if (b_cap(heavier, plan, 8192, params) > b_cap(r1(), plan, 8192, params))
        failures.push_back("heavier MoE raised b_cap");
    if (b_slo(heavier, plan, 8192, 0.05, params) > b_slo(r1(), plan, 8192, 0.05, params))
        failures.push_back("heavier MoE raised b_slo");
    ModelSpec fat = r1();
    auto mla = fat.mla();
    mla.d_kvco *= 4;
    fat.attention = mla;
    if (b_cap(fat, plan, 8192, params) > b_cap(r1(), plan, 8192, params))
        failures.push_back("fatter cache raised b_cap");

    // TPOT monotone in B and L
    double prev = 0.0;
    for (int64_t b : {32, 512, 4096}) {
        double t = decode_tpot(r1(), plan, b, 4096, params).tpot;
        if (t < prev) failures.push_back("tpot decreased in B");
        prev = t;
    }
    prev = 0.0;
    for (int64_t l : {1024, 8192, 32768}) {
        double t = decode_tpot(r1(), plan, 1024, l, params).tpot;
        if (t < prev) failures.push_back("tpot decreased in L");
        prev = t;
    }

    // limits nonincreasing in L
    int64_t prev_cap = int64_t{1} << 40, prev_slo = int64_t{1} << 40;
    for (int64_t l : {2048, 8192, 32768}) {
        int64_t c = b_cap(r1(), plan, l, params);
        int64_t s = b_slo(r1(), plan, l, 0.05, params);
        if (c > prev_cap) failures.push_back("b_cap increased in L");
        if (s > prev_slo) failures.push_back("b_slo increased in L");
        prev_cap = c;
        prev_slo = s;
    }

    // bisection tightness
    int64_t b = b_slo(r1(), plan, 4096, 0.05, params);
    double n_dec = static_cast<double>(r1().n_dec);
    double load_block =
        weight_bytes_per_device(r1(), plan) / plan.system.accelerator.mem_bw / n_dec;
    auto bound = [&](int64_t bb) {
        return n_dec * (load_block + t_min_block(r1(), plan, bb, 4096, params));
    };
    if (!(bound(b) <= 0.05 && bound(b + 1) > 0.05))
        failures.push_back("b_slo bisection is not tight");

    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto& f : failures) std::printf("        %s\n", f.c_str());
    report(9, "invariant property suite", failures.empty() && secs < 30.0,
           fmt("%.0f checks, %.1fs", failures.empty() ? 7.0 : 0.0, secs));
}

// 10. Topology direction checks.
void criterion_topologies() {
    EngineParams params;
    DeploymentPlan islands = make_plan(hardware_preset("b200"), 32, 1, 32, 900e9, 0.0, 32);
    islands.instances = 8;
    auto mono = [&](double bw) {
        return make_plan(hardware_preset("b200"), 256, 1, 256, bw, 0.0, 256);
    };

    auto peak = [&](const DeploymentPlan& plan, int64_t l) {
        // throughput is nondecreasing in B, so the peak sits at the capacity
        // edge; the engine already scales system throughput by `instances`
        int64_t edge = b_cap(r1(), plan, l, params);
        double best = 0.0;
        for (int64_t b : {edge, edge / 2, int64_t{9000}}) {
            if (b < 1 || b > edge) continue;
            best = std::max(best, decode_tpot(r1(), plan, b, l, params).throughput_tok_s);
        }
        return best;
    };

    double short_islands = peak(islands, 2048);
    double short_mono = peak(mono(900e9), 2048);
    double long_islands = peak(islands, 16384);
    double long_mono300 = peak(mono(300e9), 16384);

    bool short_ok = std::abs(short_islands - short_mono) / short_mono <= 0.10;
    bool long_ok = long_mono300 > long_islands;
    report(10, "topology direction checks", short_ok && long_ok,
           fmt("L=2048 islands/mono=%.2f (within 10%%); L=16384 mono300/islands=%.2f (>1)",
               short_islands / short_mono, long_mono300 / long_islands));
}

}  // namespace

int main() {
    std::printf("acceptance: analytical serving model vs published figures\n");
    criterion_ridge_points();
    criterion_table_ai();
    criterion_kv_bytes();
    criterion_oracle();
    criterion_b_rp();
    criterion_b_cap();
    criterion_reordering();
    criterion_breakdown_shares();
    criterion_properties();
    criterion_topologies();
    if (g_failures == 0) {
        std::printf("acceptance: all criteria PASS\n");
        return 0;
    }
    std::printf("acceptance: %d criteria FAILED\n", g_failures);
    return 1;
}
