// llmroof: analytical roofline simulator for LLM inference serving.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "llmroof/batch_limits.hpp"
#include "llmroof/config.hpp"
#include "llmroof/reorder_oracle.hpp"
#include "llmroof/sweep.hpp"

namespace {

using namespace llmroof;

struct CommonArgs {
    std::string config_path;
    std::string model_name;
    std::string hardware_name;
    std::string out_path;
    std::string format;
    double slo_ms = 0.0;
    int jobs = 1;
    int64_t n_acc = 0;
    int64_t deg_tp = 0;
    int64_t b = 0;
    int64_t l = 0;
};

SweepConfig resolve_config(const CommonArgs& args) {
    SweepConfig cfg;
    if (!args.config_path.empty()) {
        cfg = load_config_file(args.config_path);
    } else {
        cfg.model = model_preset(args.model_name.empty() ? "deepseek-r1" : args.model_name);
        const auto& acc =
            hardware_preset(args.hardware_name.empty() ? "b200" : args.hardware_name);
        int64_t n = args.n_acc > 0 ? args.n_acc : 32;
        int64_t tp = args.deg_tp > 0 ? args.deg_tp : 1;
        cfg.plans.push_back(make_plan(acc, n, tp, n / tp, 900e9, 100e9, n));
        cfg.batch_sizes = {1, 16, 128, 1024, 4096};
        cfg.seq_lengths = {1024, 4096, 16384};
    }
    if (!args.model_name.empty() && args.config_path.empty())
        cfg.model = model_preset(args.model_name);
    if (args.slo_ms > 0) cfg.slo_s = args.slo_ms / 1e3;
    if (!args.out_path.empty()) cfg.output_path = args.out_path;
    if (!args.format.empty()) cfg.format = args.format;
    if (args.b > 0) cfg.batch_sizes = {args.b};
    if (args.l > 0) cfg.seq_lengths = {args.l};
    return cfg;
}

void write_output(const SweepConfig& cfg, const std::string& text) {
    if (cfg.output_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(cfg.output_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + cfg.output_path);
    out << text;
}

int cmd_sweep(const CommonArgs& args) {
    SweepConfig cfg = resolve_config(args);
    auto records = run_sweep(cfg, args.jobs);
    write_output(cfg, cfg.format == "json" ? records_to_json(records)
                                           : records_to_csv(records));
    bool any_feasible = false;
    for (const auto& r : records) any_feasible |= r.feasible;
    return any_feasible ? 0 : 2;
}

int cmd_breakdown(const CommonArgs& args) {
    SweepConfig cfg = resolve_config(args);
    const auto& plan = cfg.plans.front();
    int64_t b = cfg.batch_sizes.front();
    int64_t l = cfg.seq_lengths.front();
    StageResult res = cfg.phase == Phase::Kind::Decode
                          ? decode_tpot(cfg.model, plan, b, l, cfg.engine)
                          : prefill_time(cfg.model, plan, b, l, cfg.engine);
    std::cout << "# model=" << cfg.model.name << " plan=" << plan.id << " B=" << b << " L=" << l
              << " tpot_s=" << res.tpot << " feasible=" << (res.feasible ? "true" : "false")
              << "\nlayer,seconds,fraction\n";
    for (const auto& slice : res.breakdown)
        std::cout << to_string(slice.kind) << ',' << slice.seconds << ',' << slice.fraction
                  << '\n';
    return 0;
}

int cmd_limits(const CommonArgs& args) {
    SweepConfig cfg = resolve_config(args);
    const auto& plan = cfg.plans.front();
    int64_t l = cfg.seq_lengths.front();
    BatchLimits lim = batch_limits(cfg.model, plan, l, cfg.slo_s, cfg.engine);
    nlohmann::ordered_json out;
    out["model"] = cfg.model.name;
    out["plan"] = plan.id;
    out["L"] = l;
    out["b_attn"] = lim.b_attn;
    out["b_moe"] = lim.b_moe;
    out["b_rp"] = lim.b_rp;
    out["b_cap"] = lim.b_cap;
    if (lim.b_slo)
        out["b_slo"] = *lim.b_slo;
    else
        out["b_slo"] = nullptr;
    if (lim.b_slo_engine)
        out["b_slo_engine"] = *lim.b_slo_engine;
    else
        out["b_slo_engine"] = nullptr;
    out["binding"] = lim.binding;
    if (!lim.note.empty()) out["note"] = lim.note;
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_verify() {
    auto res = oracle::run_verification();
    for (const auto& msg : res.messages) std::cout << msg << '\n';
    std::cout << "equivalence instances: " << res.instances
              << ", max rel err: " << res.max_rel_err << '\n';
    std::cout << (res.ok() ? "verify: OK" : "verify: FAILED") << '\n';
    return res.ok() ? 0 : 1;
}

int cmd_presets() {
    std::cout << "hardware presets (name, TFLOPS, GB/s, GB, ridge point):\n";
    for (const auto& acc : hardware_presets()) {
        std::cout << "  " << acc.name << ", " << acc.peak_flops / 1e12 << ", "
                  << acc.mem_bw / 1e9 << ", " << acc.mem_cap / 1e9 << ", " << ridge_point(acc)
                  << '\n';
    }
    std::cout << "model presets:\n";
    for (const auto& m : model_presets()) {
        std::cout << "  " << m.name << ": n_dec=" << m.n_dec << " d_emb=" << m.d_emb
                  << " n_hd=" << m.n_hd << " d_hd=" << m.d_hd
                  << " kv_bytes_per_token=" << kv_bytes_per_token(m)
                  << " total_weight_gb=" << static_cast<double>(total_weight_bytes(m)) / 1e9
                  << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"analytical roofline model of LLM inference serving"};
    app.require_subcommand(1);

    CommonArgs args;
    auto add_common = [&](CLI::App* cmd, bool with_grid) {
        cmd->add_option("--config", args.config_path, "config file (INI-style or JSON)");
        cmd->add_option("--model", args.model_name, "model preset name");
        cmd->add_option("--hardware", args.hardware_name, "hardware preset name");
        cmd->add_option("--n-acc", args.n_acc, "device count (preset mode)");
        cmd->add_option("--deg-tp", args.deg_tp, "tensor-parallel degree (preset mode)");
        cmd->add_option("--slo-ms", args.slo_ms, "TPOT SLO in milliseconds");
        if (with_grid) {
            cmd->add_option("-B,--batch", args.b, "single batch size");
            cmd->add_option("-L,--seq-len", args.l, "single sequence length");
        }
    };

    auto* sweep = app.add_subcommand("sweep", "evaluate the (B, L, plan) grid");
    add_common(sweep, true);
    sweep->add_option("--out", args.out_path, "output file (default stdout)");
    sweep->add_option("--format", args.format, "csv | json");
    sweep->add_option("--jobs", args.jobs, "worker threads");

    auto* breakdown_cmd = app.add_subcommand("breakdown", "per-layer time shares at one point");
    add_common(breakdown_cmd, true);

    auto* limits = app.add_subcommand("limits", "batch-size limits (ridge/capacity/SLO)");
    add_common(limits, true);

    app.add_subcommand("verify", "run the dense-tensor reordering oracle suite");
    app.add_subcommand("presets", "list built-in hardware and model presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("sweep")) return cmd_sweep(args);
        if (app.got_subcommand("breakdown")) return cmd_breakdown(args);
        if (app.got_subcommand("limits")) return cmd_limits(args);
        if (app.got_subcommand("verify")) return cmd_verify();
        if (app.got_subcommand("presets")) return cmd_presets();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
