#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "llmroof/layer_cost.hpp"

namespace llmroof::oracle {

// Small row-major dense matrix, double precision. No BLAS needed at these dims.
struct Mat {
    int64_t rows = 0;
    int64_t cols = 0;
    std::vector<double> data;

    Mat() = default;
    Mat(int64_t r, int64_t c) : rows(r), cols(c), data(static_cast<size_t>(r * c), 0.0) {}
    double& at(int64_t r, int64_t c) { return data[static_cast<size_t>(r * cols + c)]; }
    double at(int64_t r, int64_t c) const { return data[static_cast<size_t>(r * cols + c)]; }
};

Mat matmul(const Mat& a, const Mat& b);
Mat matmul_bt(const Mat& a, const Mat& b);  // a * b^T

struct TinyDims {
    int64_t n_hd = 2;
    int64_t d_hd = 3;
    int64_t d_kvco = 4;
    int64_t d_qco = 4;
    int64_t d_emb = 5;
    int64_t d_rope = 2;  // even, may be 0
    int64_t l_total = 6;
    int64_t l_new = 1;
};

struct TinyMlaWeights {
    Mat w_cq;                 // d_emb x d_qco
    Mat w_ckv;                // d_emb x d_kvco
    Mat w_rk;                 // d_emb x d_rope
    std::vector<Mat> w_dq;    // per head: d_qco x d_hd
    std::vector<Mat> w_dk;    // per head: d_kvco x d_hd
    std::vector<Mat> w_dv;    // per head: d_kvco x d_hd
    std::vector<Mat> w_rq;    // per head: d_qco x d_rope
};

struct TinyState {
    Mat h;  // l_total x d_emb hidden states; the last l_new rows are the step input
};

struct MlaOutput {
    std::vector<Mat> scores;   // per head: l_new x l_total (pre-softmax)
    std::vector<Mat> context;  // per head: l_new x d_hd
};

// Deterministic 64-bit LCG (MMIX constants) mapped to [-1, 1). The golden
// generator script uses the identical stream.
struct Lcg {
    uint64_t state;
    explicit Lcg(uint64_t seed) : state(seed) {}
    double next() {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return 2.0 * (static_cast<double>(state >> 11) / 9007199254740992.0) - 1.0;
    }
};

TinyMlaWeights random_weights(const TinyDims& dims, uint64_t seed);
TinyState random_state(const TinyDims& dims, Lcg& rng);

// Traffic/flop counter. Flops accumulate 2 per scalar MAC inside matmuls;
// bytes count each distinct buffer touched by a layer once, under the same
// residency convention as layer_cost (single-row consumer reads are cache
// hits in decode, the score stream is written once).
struct CountBook {
    std::map<LayerKind, double> flops;
    std::map<LayerKind, double> bytes;
    int64_t dtype_bytes = 2;

    void add_flops(LayerKind kind, double f) { flops[kind] += f; }
    void touch(LayerKind kind, const Mat& m) {
        bytes[kind] += static_cast<double>(m.rows * m.cols * dtype_bytes);
    }
};

// Straight-line MLA per the published dataflow: compress, decompress K/V for
// the whole context, score + decoupled-RoPE term, softmax, context.
MlaOutput mla_naive(const TinyState& state, const TinyMlaWeights& weights, const TinyDims& dims,
                    CountBook* counts = nullptr);

// Reordered factorization: decompression weights fold into the query/output
// side and score/context read the latent cache directly.
MlaOutput mla_reordered(const TinyState& state, const TinyMlaWeights& weights,
                        const TinyDims& dims, CountBook* counts = nullptr);

enum class MlaPath { Naive, Reordered };

// Per-layer (flops, bytes) for one instance, for validation against layer_cost.
CountBook instrumented_counts(MlaPath path, const TinyDims& dims, uint64_t seed = 1);

struct VerifyResult {
    int instances = 0;
    int failures = 0;
    double max_rel_err = 0.0;
    std::vector<std::string> messages;
    bool ok() const { return failures == 0; }
};

// Full equivalence + count validation suite (the CLI `verify` subcommand).
VerifyResult run_verification(int equivalence_seeds = 100, bool verbose = false);

}  // namespace llmroof::oracle
