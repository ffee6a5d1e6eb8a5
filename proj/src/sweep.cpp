#include "llmroof/sweep.hpp"

#include <cstdio>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace llmroof {

namespace {

// Shortest decimal form that round-trips a double; '.' decimal point always.
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double parsed = 0.0;
    for (int prec = 9; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        std::sscanf(buf, "%lf", &parsed);
        if (parsed == v) break;
    }
    return buf;
}

SweepRecord evaluate_point(const SweepConfig& cfg, const DeploymentPlan& plan, int64_t b,
                           int64_t l) {
    SweepRecord rec;
    rec.model = cfg.model.name;
    rec.plan_id = plan.id;
    rec.b = b * plan.instances;
    rec.l = l;
    rec.phase = cfg.phase == Phase::Kind::Decode ? "decode" : "prefill";

    StageResult res = cfg.phase == Phase::Kind::Decode
                          ? decode_tpot(cfg.model, plan, b, l, cfg.engine)
                          : prefill_time(cfg.model, plan, b, l, cfg.engine);
    rec.tpot_s = res.tpot;
    rec.throughput_tok_s = res.throughput_tok_s;
    rec.per_device_tok_s = res.per_device_tok_s;
    rec.feasible = res.feasible;
    if (cfg.slo_s && res.tpot > *cfg.slo_s) rec.feasible = false;

    BatchLimits limits = batch_limits(cfg.model, plan, l, cfg.slo_s, cfg.engine);
    rec.binding_limit = limits.binding;

    for (const auto& slice : res.breakdown) {
        switch (group_of(slice.kind)) {
            case LayerGroup::AttnFc: rec.attn_fc_s += slice.seconds; break;
            case LayerGroup::KvDecompress: rec.kv_decompress_s += slice.seconds; break;
            case LayerGroup::CoreAttn: rec.core_attn_s += slice.seconds; break;
            case LayerGroup::Ffn: rec.ffn_s += slice.seconds; break;
            case LayerGroup::Moe: rec.moe_s += slice.seconds; break;
            case LayerGroup::Comm: rec.comm_s += slice.seconds; break;
        }
    }
    return rec;
}

}  // namespace

std::vector<SweepRecord> run_sweep(const SweepConfig& config, int jobs) {
    config.validate();
    struct Point {
        const DeploymentPlan* plan;
        int64_t b, l;
    };
    std::vector<Point> grid;
    for (const auto& plan : config.plans)
        for (int64_t l : config.seq_lengths)
            for (int64_t b : config.batch_sizes) grid.push_back({&plan, b, l});

    std::vector<SweepRecord> records(grid.size());
    auto worker = [&](size_t begin, size_t step) {
        for (size_t i = begin; i < grid.size(); i += step)
            records[i] = evaluate_point(config, *grid[i].plan, grid[i].b, grid[i].l);
    };
    int threads = jobs > 1 ? jobs : 1;
    if (threads == 1) {
        worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back(worker, static_cast<size_t>(t), static_cast<size_t>(threads));
        for (auto& th : pool) th.join();
    }
    return records;  // grid order regardless of evaluation order
}

std::string records_to_csv(const std::vector<SweepRecord>& records) {
    std::ostringstream out;
    out << "model,plan,phase,B,L,tpot_s,throughput_tok_s,per_device_tok_s,feasible,"
           "binding_limit,attn_fc_s,kv_decompress_s,core_attn_s,ffn_s,moe_s,comm_s\n";
    for (const auto& r : records) {
        out << r.model << ',' << r.plan_id << ',' << r.phase << ',' << r.b << ',' << r.l << ','
            << fmt(r.tpot_s) << ',' << fmt(r.throughput_tok_s) << ',' << fmt(r.per_device_tok_s)
            << ',' << (r.feasible ? "true" : "false") << ',' << r.binding_limit << ','
            << fmt(r.attn_fc_s) << ',' << fmt(r.kv_decompress_s) << ',' << fmt(r.core_attn_s)
            << ',' << fmt(r.ffn_s) << ',' << fmt(r.moe_s) << ',' << fmt(r.comm_s) << '\n';
    }
    return out.str();
}

std::string records_to_json(const std::vector<SweepRecord>& records) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : records) {
        nlohmann::ordered_json obj;
        obj["model"] = r.model;
        obj["plan"] = r.plan_id;
        obj["phase"] = r.phase;
        obj["B"] = r.b;
        obj["L"] = r.l;
        obj["tpot_s"] = r.tpot_s;
        obj["throughput_tok_s"] = r.throughput_tok_s;
        obj["per_device_tok_s"] = r.per_device_tok_s;
        obj["feasible"] = r.feasible;
        obj["binding_limit"] = r.binding_limit;
        obj["attn_fc_s"] = r.attn_fc_s;
        obj["kv_decompress_s"] = r.kv_decompress_s;
        obj["core_attn_s"] = r.core_attn_s;
        obj["ffn_s"] = r.ffn_s;
        obj["moe_s"] = r.moe_s;
        obj["comm_s"] = r.comm_s;
        arr.push_back(obj);
    }
    return arr.dump(2) + "\n";
}

}  // namespace llmroof
