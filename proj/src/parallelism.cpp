#include "llmroof/parallelism.hpp"

namespace llmroof {

int64_t effective_batch(BlockRole role, int64_t b, const DeploymentPlan& plan,
                        const ModelSpec& model) {
    if (b < 0) throw std::invalid_argument("batch size must be nonnegative");
    switch (role) {
        case BlockRole::AttentionFc:
            return ceil_div(b, plan.deg_dp);
        case BlockRole::MoeExpert: {
            const auto& moe = model.moe();
            if (moe.n_e == 0) return 0;
            return ceil_div(b * moe.n_k, moe.n_e);
        }
    }
    throw std::invalid_argument("invalid block role");
}

int64_t heads_per_device(const DeploymentPlan& plan, const ModelSpec& model) {
    return model.n_hd / plan.deg_tp;
}

double ckv_replication_bytes(const DeploymentPlan& plan, const ModelSpec& model, int64_t b,
                             int64_t l) {
    double per_request = static_cast<double>(kv_bytes_per_token(model)) * static_cast<double>(l);
    double requests = static_cast<double>(ceil_div(b, plan.deg_dp));
    if (model.is_mla()) return requests * per_request;  // latent cache shared by all heads
    return requests * per_request / static_cast<double>(plan.deg_tp);
}

std::vector<std::string> validate_plan(const DeploymentPlan& plan, const ModelSpec& model) {
    std::vector<std::string> violations;
    if (plan.deg_tp < 1 || plan.deg_dp < 1 || plan.deg_ep < 1 || plan.instances < 1)
        violations.push_back("parallelism degrees must be >= 1");
    if (plan.deg_tp * plan.deg_dp != plan.n_acc())
        violations.push_back("deg_tp * deg_dp must equal n_acc for the attention block");
    if (plan.deg_tp >= 1 && model.n_hd % plan.deg_tp != 0)
        violations.push_back("deg_tp must divide n_hd");
    if (model.is_moe() && model.moe().n_e > 0) {
        if (plan.deg_ep != plan.n_acc())
            violations.push_back("deg_ep must equal n_acc (experts spread over every device)");
        if (plan.deg_ep > model.moe().n_e)
            violations.push_back("deg_ep exceeds the expert count: a device would hold none");
    }
    try {
        plan.system.validate();
    } catch (const std::exception& e) {
        violations.push_back(e.what());
    }
    return violations;
}

DeploymentPlan make_plan(const AcceleratorSpec& acc, int64_t n_acc, int64_t deg_tp,
                         int64_t deg_dp, double intra_bw, double inter_bw, int64_t group_size,
                         bool reorder, bool fused) {
    DeploymentPlan plan;
    plan.system.accelerator = acc;
    plan.system.n_acc = n_acc;
    plan.system.interconnect.intra_bw = intra_bw;
    plan.system.interconnect.inter_bw = inter_bw;
    plan.system.interconnect.group_size = group_size;
    plan.deg_tp = deg_tp;
    plan.deg_dp = deg_dp;
    plan.deg_ep = n_acc;
    plan.reorder = reorder;
    plan.fused = fused;
    plan.id = acc.name + "x" + std::to_string(n_acc) + "-tp" + std::to_string(deg_tp) + "-dp" +
              std::to_string(deg_dp);
    return plan;
}

}  // namespace llmroof
