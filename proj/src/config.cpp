#include "llmroof/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace llmroof {

namespace {

using Json = nlohmann::json;

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    size_t b = s.find_last_not_of(" \t\r\n");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

// section -> key -> (value, line number)
using Sections = std::map<std::string, std::map<std::string, std::pair<std::string, int>>>;

Sections parse_ini(const std::string& text, const std::string& origin) {
    Sections out;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section");
            section = lower(trim(t.substr(1, t.size() - 2)));
            out[section];
            continue;
        }
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = lower(trim(t.substr(0, eq)));
        std::string value = trim(t.substr(eq + 1));
        if (section.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": key outside a section");
        out[section][key] = {value, lineno};
    }
    return out;
}

struct Section {
    const std::string name;
    const std::string origin;
    std::map<std::string, std::pair<std::string, int>> kv;
    mutable std::set<std::string> consumed;

    bool has(const std::string& key) const { return kv.count(key) > 0; }

    std::string raw(const std::string& key) const {
        consumed.insert(key);
        auto it = kv.find(key);
        if (it == kv.end())
            throw ConfigError(origin + ": [" + name + "] missing required key '" + key + "'");
        return it->second.first;
    }
    std::string str(const std::string& key, const std::string& fallback) const {
        consumed.insert(key);
        auto it = kv.find(key);
        return it == kv.end() ? fallback : it->second.first;
    }
    double num(const std::string& key) const {
        std::string v = raw(key);
        try {
            size_t pos = 0;
            double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw ConfigError(origin + ": [" + name + "] key '" + key + "': not a number: " + v);
        }
    }
    double num(const std::string& key, double fallback) const {
        return has(key) ? num(key) : fallback;
    }
    int64_t integer(const std::string& key) const { return static_cast<int64_t>(num(key)); }
    int64_t integer(const std::string& key, int64_t fallback) const {
        return has(key) ? integer(key) : fallback;
    }
    bool boolean(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        std::string v = lower(raw(key));
        if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
        if (v == "false" || v == "0" || v == "no" || v == "off") return false;
        throw ConfigError(origin + ": [" + name + "] key '" + key + "': not a boolean: " + v);
    }
    std::vector<int64_t> int_list(const std::string& key) const {
        std::vector<int64_t> out;
        std::istringstream in(raw(key));
        std::string item;
        while (std::getline(in, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            try {
                out.push_back(std::stoll(item));
            } catch (const std::exception&) {
                throw ConfigError(origin + ": [" + name + "] key '" + key +
                                  "': bad integer list entry: " + item);
            }
        }
        return out;
    }
    void reject_unknown() const {
        for (const auto& [key, value] : kv) {
            if (!consumed.count(key))
                throw ConfigError(origin + ":" + std::to_string(value.second) + ": unknown key '" +
                                  key + "' in [" + name + "]");
        }
    }
};

AttentionVariant parse_attention(const Section& sec) {
    std::string kind = lower(sec.str("attention", "mha"));
    if (kind == "mha") return MhaAttention{};
    if (kind == "gqa") return GqaAttention{sec.integer("group_size")};
    if (kind == "mla")
        return MlaAttention{sec.integer("d_qco"), sec.integer("d_kvco"), sec.integer("d_rope")};
    throw ConfigError(sec.origin + ": [model] unknown attention variant: " + kind);
}

FfnVariant parse_ffn(const Section& sec) {
    std::string kind = lower(sec.str("ffn", "dense"));
    if (kind == "dense") return DenseFfn{sec.integer("d_ffn"), sec.boolean("gated", true)};
    if (kind == "moe") {
        MoeFfn moe;
        moe.n_e = sec.integer("n_e");
        moe.n_k = sec.integer("n_k");
        moe.n_shared = sec.integer("n_shared", 0);
        moe.d_moe = sec.integer("d_moe");
        moe.n_dense_blocks = sec.integer("n_dense_blocks", 0);
        moe.d_ffn_dense = sec.integer("d_ffn_dense", 0);
        return moe;
    }
    throw ConfigError(sec.origin + ": [model] unknown ffn variant: " + kind);
}

ModelSpec parse_model(const Section& sec) {
    if (sec.has("preset")) {
        ModelSpec m = model_preset(sec.raw("preset"));
        sec.reject_unknown();
        return m;
    }
    ModelSpec m;
    m.name = sec.str("name", "custom");
    m.n_dec = sec.integer("n_dec");
    m.d_emb = sec.integer("d_emb");
    m.n_hd = sec.integer("n_hd");
    m.d_hd = sec.integer("d_hd");
    m.dtype_bytes = sec.integer("dtype_bytes", 2);
    m.attention = parse_attention(sec);
    m.ffn = parse_ffn(sec);
    sec.reject_unknown();
    m.validate();
    return m;
}

constexpr double kGiga = 1e9;

AcceleratorSpec parse_hardware(const Section& sec) {
    if (sec.has("preset")) {
        AcceleratorSpec acc = hardware_preset(sec.raw("preset"));
        acc.mfu = sec.num("mfu", acc.mfu);
        sec.reject_unknown();
        return acc;
    }
    AcceleratorSpec acc;
    acc.name = sec.str("name", "custom");
    acc.peak_flops = sec.num("tflops") * 1e12;
    acc.mem_bw = sec.num("mem_bw_gbps") * kGiga;
    acc.mem_cap = sec.num("mem_cap_gb") * kGiga;
    acc.mfu = sec.num("mfu", 1.0);
    sec.reject_unknown();
    acc.validate();
    return acc;
}

InterconnectSpec parse_interconnect(const Section& sec, int64_t n_acc) {
    InterconnectSpec ic;
    ic.intra_bw = sec.num("intra_gbps", 900.0) * kGiga;
    ic.group_size = sec.integer("group_size", n_acc);
    ic.inter_bw = sec.num("inter_gbps", ic.group_size == n_acc ? 0.0 : 100.0) * kGiga;
    ic.link_latency = sec.num("link_latency_s", 0.0);
    sec.reject_unknown();
    ic.validate();
    return ic;
}

DeploymentPlan parse_plan(const Section& sec, const AcceleratorSpec& acc,
                          const InterconnectSpec& ic) {
    DeploymentPlan plan;
    plan.system.accelerator = acc;
    plan.system.n_acc = sec.integer("n_acc", 1);
    plan.system.interconnect = ic;
    // plan-local interconnect overrides (for topology comparisons)
    plan.system.interconnect.intra_bw = sec.num("intra_gbps", ic.intra_bw / kGiga) * kGiga;
    plan.system.interconnect.group_size = sec.integer("group_size", ic.group_size);
    double inter_fallback = plan.system.interconnect.group_size == plan.system.n_acc
                                ? 0.0
                                : ic.inter_bw / kGiga;
    plan.system.interconnect.inter_bw = sec.num("inter_gbps", inter_fallback) * kGiga;
    if (plan.system.interconnect.inter_bw > plan.system.interconnect.intra_bw &&
        plan.system.interconnect.group_size == plan.system.n_acc)
        plan.system.interconnect.inter_bw = 0.0;  // unused tier on a single group
    plan.system.interconnect.validate();
    plan.deg_tp = sec.integer("deg_tp", 1);
    plan.deg_dp = sec.integer("deg_dp", plan.system.n_acc / plan.deg_tp);
    plan.deg_ep = sec.integer("deg_ep", plan.system.n_acc);
    std::string stage = lower(sec.str("stage", "decode"));
    if (stage == "decode")
        plan.stage = Phase::Kind::Decode;
    else if (stage == "prefill")
        plan.stage = Phase::Kind::Prefill;
    else
        throw ConfigError(sec.origin + ": [plan] unknown stage: " + stage);
    // decode reorders by default; prefill runs the plain dataflow
    plan.reorder = sec.boolean("reorder", plan.stage == Phase::Kind::Decode);
    plan.fused = sec.boolean("fused", false);
    plan.instances = sec.integer("instances", 1);
    plan.id = sec.str("id", "");
    if (plan.id.empty())
        plan.id = acc.name + "x" + std::to_string(plan.system.n_acc) + "-tp" +
                  std::to_string(plan.deg_tp) + "-dp" + std::to_string(plan.deg_dp) +
                  (plan.instances > 1 ? "-x" + std::to_string(plan.instances) : "");
    sec.reject_unknown();
    return plan;
}

Section make_section(const Sections& all, const std::string& name, const std::string& origin) {
    Section sec{name, origin, {}, {}};
    auto it = all.find(name);
    if (it != all.end()) sec.kv = it->second;
    return sec;
}

SweepConfig from_sections(const Sections& sections, const std::string& origin) {
    static const std::set<std::string> known = {"hardware", "interconnect", "model",
                                                "plan",     "sweep",        "engine"};
    for (const auto& [name, kv] : sections) {
        std::string base = name.substr(0, name.find('.'));
        if (!known.count(base))
            throw ConfigError(origin + ": unknown section [" + name + "]");
    }

    SweepConfig cfg;
    Section model_sec = make_section(sections, "model", origin);
    cfg.model = parse_model(model_sec);

    Section hw_sec = make_section(sections, "hardware", origin);
    AcceleratorSpec acc =
        hw_sec.kv.empty() ? hardware_preset("b200") : parse_hardware(hw_sec);

    Section plan_sec = make_section(sections, "plan", origin);
    int64_t n_acc = plan_sec.integer("n_acc", 1);
    plan_sec.consumed.clear();

    Section ic_sec = make_section(sections, "interconnect", origin);
    InterconnectSpec ic = parse_interconnect(ic_sec, n_acc);

    cfg.plans.push_back(parse_plan(plan_sec, acc, ic));
    // Additional plans as [plan.<suffix>] sections.
    for (const auto& [name, kv] : sections) {
        if (name.rfind("plan.", 0) != 0) continue;
        Section extra{name, origin, kv, {}};
        int64_t extra_n = extra.integer("n_acc", 1);
        extra.consumed.clear();
        Section extra_ic = make_section(sections, "interconnect", origin);
        cfg.plans.push_back(parse_plan(extra, acc, parse_interconnect(extra_ic, extra_n)));
    }

    Section sweep = make_section(sections, "sweep", origin);
    if (sweep.has("batch_sizes")) cfg.batch_sizes = sweep.int_list("batch_sizes");
    if (sweep.has("seq_lengths")) cfg.seq_lengths = sweep.int_list("seq_lengths");
    if (sweep.has("slo_ms")) cfg.slo_s = sweep.num("slo_ms") / 1e3;
    cfg.output_path = sweep.str("output", "");
    cfg.format = lower(sweep.str("format", "csv"));
    // the grid phase follows the plan's stage unless overridden
    std::string default_phase =
        cfg.plans.front().stage == Phase::Kind::Prefill ? "prefill" : "decode";
    std::string phase = lower(sweep.str("phase", default_phase));
    if (phase == "decode")
        cfg.phase = Phase::Kind::Decode;
    else if (phase == "prefill")
        cfg.phase = Phase::Kind::Prefill;
    else
        throw ConfigError(origin + ": [sweep] unknown phase: " + phase);
    sweep.reject_unknown();

    Section engine = make_section(sections, "engine", origin);
    cfg.engine.comm_overlap = engine.num("comm_overlap", 0.0);
    cfg.engine.expert_skew = engine.num("expert_skew", 1.0);
    cfg.engine.act_scale = engine.num("act_scale", 1.0);
    engine.reject_unknown();

    if (cfg.batch_sizes.empty()) cfg.batch_sizes = {1, 16, 128, 1024, 4096};
    if (cfg.seq_lengths.empty()) cfg.seq_lengths = {1024, 4096, 16384};
    return cfg;
}

Sections sections_from_json(const Json& root, const std::string& origin) {
    Sections out;
    if (!root.is_object()) throw ConfigError(origin + ": top-level JSON must be an object");
    for (const auto& [section, body] : root.items()) {
        if (section == "plans") continue;  // handled by caller
        if (!body.is_object())
            throw ConfigError(origin + ": section '" + section + "' must be an object");
        for (const auto& [key, value] : body.items()) {
            std::string text = value.is_string() ? value.get<std::string>()
                                                 : Json(value).dump();
            if (value.is_array()) {
                text.clear();
                for (const auto& item : value) {
                    if (!text.empty()) text += ",";
                    text += item.dump();
                }
            }
            out[lower(section)][lower(key)] = {text, 0};
        }
    }
    return out;
}

}  // namespace

void SweepConfig::validate() const {
    if (batch_sizes.empty() || seq_lengths.empty())
        throw ConfigError("sweep grid must be nonempty");
    for (int64_t b : batch_sizes)
        if (b < 1) throw ConfigError("batch sizes must be >= 1");
    for (int64_t l : seq_lengths)
        if (l < 1) throw ConfigError("sequence lengths must be >= 1");
    if (plans.empty()) throw ConfigError("at least one plan is required");
    for (const auto& plan : plans) {
        auto violations = validate_plan(plan, model);
        if (!violations.empty())
            throw ConfigError("invalid plan '" + plan.id + "': " + violations.front());
    }
    if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
}

SweepConfig parse_config_text(const std::string& text, const std::string& origin) {
    std::string t = trim(text);
    if (!t.empty() && t[0] == '{') {
        Json root;
        try {
            root = Json::parse(t);
        } catch (const Json::parse_error& e) {
            throw ConfigError(origin + ": JSON parse error: " + std::string(e.what()));
        }
        Sections sections = sections_from_json(root, origin);
        if (root.contains("plans")) {
            int idx = 0;
            for (const auto& plan_body : root.at("plans")) {
                Json wrapper;
                wrapper["plan." + std::to_string(idx)] = plan_body;
                Sections extra = sections_from_json(wrapper, origin);
                sections.insert(extra.begin(), extra.end());
                if (idx == 0) {
                    // first plan doubles as the base [plan]
                    Sections base = sections_from_json(Json{{"plan", plan_body}}, origin);
                    sections["plan"] = base["plan"];
                    sections.erase("plan.0");
                }
                ++idx;
            }
        }
        return from_sections(sections, origin);
    }
    return from_sections(parse_ini(text, origin), origin);
}

SweepConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

}  // namespace llmroof
