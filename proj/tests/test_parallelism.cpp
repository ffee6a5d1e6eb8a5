#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "llmroof/parallelism.hpp"

using namespace llmroof;

namespace {

DeploymentPlan plan_32(int64_t tp = 1) {
    return make_plan(hardware_preset("b200"), 32, tp, 32 / tp, 900e9, 100e9, 32);
}

}  // namespace

TEST_CASE("effective batch per block role") {
    const ModelSpec& r1 = model_preset("deepseek-r1");
    DeploymentPlan plan = plan_32();

    CHECK(effective_batch(BlockRole::AttentionFc, 9000, plan, r1) == 282);  // ceil(281.25)
    plan.deg_dp = 1;
    plan.deg_tp = 32;
    CHECK(effective_batch(BlockRole::AttentionFc, 9000, plan, r1) == 9000);

    CHECK(effective_batch(BlockRole::MoeExpert, 256, plan, r1) == 8);
    CHECK(effective_batch(BlockRole::MoeExpert, 9000, plan, r1) == 282);
}

TEST_CASE("attention effective batch covers the full batch") {
    const ModelSpec& r1 = model_preset("deepseek-r1");
    DeploymentPlan plan = plan_32();
    for (int64_t b : {1, 31, 32, 33, 64, 9000, 9001}) {
        int64_t eff = effective_batch(BlockRole::AttentionFc, b, plan, r1);
        CHECK(eff * plan.deg_dp >= b);
        if (b % plan.deg_dp == 0) CHECK(eff * plan.deg_dp == b);
    }
}

TEST_CASE("heads per device") {
    const ModelSpec& r1 = model_preset("deepseek-r1");
    CHECK(heads_per_device(plan_32(2), r1) == 64);
    CHECK(heads_per_device(plan_32(1), r1) == 128);

    ModelSpec toy = r1;
    toy.n_hd = 4;
    toy.d_hd = 128;
    toy.attention = MlaAttention{256, 64, 16};
    toy.validate();
    CHECK(heads_per_device(plan_32(2), toy) == 2);

    DeploymentPlan full = make_plan(hardware_preset("b200"), 128, 128, 1, 900e9, 100e9, 128);
    CHECK(heads_per_device(full, r1) == 1);
}

TEST_CASE("latent cache replication under TP") {
    const ModelSpec& r1 = model_preset("deepseek-r1");
    int64_t b = 256, l = 4096;
    double tp1 = ckv_replication_bytes(plan_32(1), r1, b, l);
    DeploymentPlan tp4 = make_plan(hardware_preset("b200"), 32, 4, 8, 900e9, 100e9, 32);
    // same per-request bytes per device, but 4x fewer requests per DP group
    CHECK(ckv_replication_bytes(tp4, r1, b, l) == doctest::Approx(tp1 * 4.0));
    DeploymentPlan tp4_same_requests = tp4;
    tp4_same_requests.deg_dp = 32;  // hold requests/device constant
    CHECK(ckv_replication_bytes(tp4_same_requests, r1, b, l) == doctest::Approx(tp1));

    // MHA caches split across TP heads
    const ModelSpec& gpt3 = model_preset("gpt-3");
    DeploymentPlan mha_tp4 = make_plan(hardware_preset("b200"), 32, 4, 8, 900e9, 100e9, 32);
    DeploymentPlan mha_tp1 = plan_32(1);
    double full_cache = ckv_replication_bytes(mha_tp1, gpt3, 32, l);
    CHECK(ckv_replication_bytes(mha_tp4, gpt3, 32 / 4, l) == doctest::Approx(full_cache / 4.0));

    // with one device per group every variant stores the same bytes
    DeploymentPlan single = make_plan(hardware_preset("b200"), 1, 1, 1, 900e9, 100e9, 1);
    ModelSpec twin = gpt3;
    twin.attention = MlaAttention{128, 2 * gpt3.d_dec() - 64, 64};
    CHECK(ckv_replication_bytes(single, twin, 8, l) ==
          doctest::Approx(ckv_replication_bytes(single, gpt3, 8, l)));
}

TEST_CASE("plan validation reports every violation") {
    const ModelSpec& r1 = model_preset("deepseek-r1");

    DeploymentPlan ok = plan_32();
    CHECK(validate_plan(ok, r1).empty());

    DeploymentPlan bad_tp = plan_32();
    bad_tp.deg_tp = 3;  // does not divide 128, and 3*32 != 32
    auto violations = validate_plan(bad_tp, r1);
    CHECK(violations.size() >= 2);

    DeploymentPlan bad_product = plan_32();
    bad_product.deg_dp = 16;
    violations = validate_plan(bad_product, r1);
    REQUIRE(!violations.empty());
    CHECK(violations.front().find("deg_tp * deg_dp") != std::string::npos);

    // more devices than experts
    DeploymentPlan huge = make_plan(hardware_preset("b200"), 512, 1, 512, 900e9, 100e9, 512);
    violations = validate_plan(huge, r1);
    REQUIRE(!violations.empty());
}
