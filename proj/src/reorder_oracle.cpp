#include "llmroof/reorder_oracle.hpp"

#include <cmath>
#include <sstream>

namespace llmroof::oracle {

Mat matmul(const Mat& a, const Mat& b) {
    Mat c(a.rows, b.cols);
    for (int64_t i = 0; i < a.rows; ++i)
        for (int64_t k = 0; k < a.cols; ++k) {
            double aik = a.at(i, k);
            for (int64_t j = 0; j < b.cols; ++j) c.at(i, j) += aik * b.at(k, j);
        }
    return c;
}

Mat matmul_bt(const Mat& a, const Mat& b) {
    Mat c(a.rows, b.rows);
    for (int64_t i = 0; i < a.rows; ++i)
        for (int64_t j = 0; j < b.rows; ++j) {
            double acc = 0.0;
            for (int64_t k = 0; k < a.cols; ++k) acc += a.at(i, k) * b.at(j, k);
            c.at(i, j) = acc;
        }
    return c;
}

namespace {

Mat random_mat(int64_t rows, int64_t cols, Lcg& rng) {
    Mat m(rows, cols);
    for (auto& v : m.data) v = rng.next();
    return m;
}

double gemm_flops(double m, double k, double n) { return 2.0 * m * k * n; }

// Pairwise rotation by position-dependent angles, base 10000.
void rope_rotate(Mat& m, int64_t first_position) {
    if (m.cols == 0) return;
    for (int64_t r = 0; r < m.rows; ++r) {
        double pos = static_cast<double>(first_position + r);
        for (int64_t j = 0; j + 1 < m.cols; j += 2) {
            double theta =
                pos * std::pow(10000.0, -static_cast<double>(j) / static_cast<double>(m.cols));
            double c = std::cos(theta), s = std::sin(theta);
            double x = m.at(r, j), y = m.at(r, j + 1);
            m.at(r, j) = x * c - y * s;
            m.at(r, j + 1) = x * s + y * c;
        }
    }
}

Mat softmax_scaled(const Mat& s, double scale) {
    Mat p(s.rows, s.cols);
    for (int64_t i = 0; i < s.rows; ++i) {
        double mx = -1e300;
        for (int64_t j = 0; j < s.cols; ++j) mx = std::max(mx, s.at(i, j) / scale);
        double sum = 0.0;
        for (int64_t j = 0; j < s.cols; ++j) {
            p.at(i, j) = std::exp(s.at(i, j) / scale - mx);
            sum += p.at(i, j);
        }
        for (int64_t j = 0; j < s.cols; ++j) p.at(i, j) /= sum;
    }
    return p;
}

Mat tail_rows(const Mat& m, int64_t n) {
    Mat out(n, m.cols);
    for (int64_t i = 0; i < n; ++i)
        for (int64_t j = 0; j < m.cols; ++j) out.at(i, j) = m.at(m.rows - n + i, j);
    return out;
}

Mat add(const Mat& a, const Mat& b) {
    Mat c = a;
    for (size_t i = 0; i < c.data.size(); ++i) c.data[i] += b.data[i];
    return c;
}

struct Shared {
    Mat c_q;       // l_new x d_qco
    Mat c_kv;      // l_total x d_kvco
    Mat k_rope;    // l_total x d_rope, rotated
    std::vector<Mat> q_rope;  // per head: l_new x d_rope, rotated
};

// Compression and the decoupled rotary projections, identical on both paths.
// The full latent cache is recomputed for convenience; the counts charge only
// the new rows (the rest is served from the cache at inference time).
Shared compress(const TinyState& state, const TinyMlaWeights& w, const TinyDims& dims,
                CountBook* counts) {
    Shared sh;
    Mat h_new = tail_rows(state.h, dims.l_new);
    sh.c_q = matmul(h_new, w.w_cq);
    sh.c_kv = matmul(state.h, w.w_ckv);
    Mat k_rope_raw = matmul(state.h, w.w_rk);
    rope_rotate(k_rope_raw, 0);
    sh.k_rope = k_rope_raw;
    bool decode = dims.l_new == 1;
    double rows = static_cast<double>(dims.l_new);
    double d_emb = static_cast<double>(dims.d_emb);
    if (counts) {
        counts->add_flops(LayerKind::QkvCompress,
                          gemm_flops(rows, d_emb, static_cast<double>(dims.d_qco)) +
                              gemm_flops(rows, d_emb, static_cast<double>(dims.d_kvco)) +
                              gemm_flops(rows, d_emb, static_cast<double>(dims.d_rope)));
        counts->touch(LayerKind::QkvCompress, w.w_cq);
        counts->touch(LayerKind::QkvCompress, w.w_ckv);
        counts->touch(LayerKind::QkvCompress, w.w_rk);
        if (!decode) counts->touch(LayerKind::QkvCompress, h_new);
        counts->touch(LayerKind::QkvCompress, sh.c_q);
        // Only the new cache rows are written per step.
        Mat new_kv(dims.l_new, dims.d_kvco), new_rope(dims.l_new, dims.d_rope);
        counts->touch(LayerKind::QkvCompress, new_kv);
        counts->touch(LayerKind::QkvCompress, new_rope);
        if (!decode) counts->touch(LayerKind::QRope, sh.c_q);  // read once, all heads
    }
    for (int64_t hd = 0; hd < dims.n_hd; ++hd) {
        Mat qr = matmul(sh.c_q, w.w_rq[static_cast<size_t>(hd)]);
        rope_rotate(qr, dims.l_total - dims.l_new);
        sh.q_rope.push_back(std::move(qr));
        if (counts) {
            counts->add_flops(LayerKind::QRope,
                              gemm_flops(rows, static_cast<double>(dims.d_qco),
                                         static_cast<double>(dims.d_rope)));
            counts->touch(LayerKind::QRope, w.w_rq[static_cast<size_t>(hd)]);
            counts->touch(LayerKind::QRope, sh.q_rope.back());
        }
    }
    return sh;
}

}  // namespace

TinyMlaWeights random_weights(const TinyDims& dims, uint64_t seed) {
    Lcg rng(seed);
    TinyMlaWeights w;
    w.w_cq = random_mat(dims.d_emb, dims.d_qco, rng);
    w.w_ckv = random_mat(dims.d_emb, dims.d_kvco, rng);
    w.w_rk = random_mat(dims.d_emb, dims.d_rope, rng);
    for (int64_t h = 0; h < dims.n_hd; ++h) {
        w.w_dq.push_back(random_mat(dims.d_qco, dims.d_hd, rng));
        w.w_dk.push_back(random_mat(dims.d_kvco, dims.d_hd, rng));
        w.w_dv.push_back(random_mat(dims.d_kvco, dims.d_hd, rng));
        w.w_rq.push_back(random_mat(dims.d_qco, dims.d_rope, rng));
    }
    return w;
}

TinyState random_state(const TinyDims& dims, Lcg& rng) {
    TinyState s;
    s.h = random_mat(dims.l_total, dims.d_emb, rng);
    return s;
}

MlaOutput mla_naive(const TinyState& state, const TinyMlaWeights& w, const TinyDims& dims,
                    CountBook* counts) {
    Shared sh = compress(state, w, dims, counts);
    bool decode = dims.l_new == 1;
    double scale = std::sqrt(static_cast<double>(dims.d_hd));
    if (counts) {
        // Buffers shared by every head are read once per layer.
        counts->touch(LayerKind::KDecompress, sh.c_kv);
        counts->touch(LayerKind::VDecompress, sh.c_kv);
        counts->touch(LayerKind::ScoreRope, sh.k_rope);
        if (!decode) counts->touch(LayerKind::QDecompress, sh.c_q);
    }
    MlaOutput out;
    for (int64_t hd = 0; hd < dims.n_hd; ++hd) {
        size_t h = static_cast<size_t>(hd);
        Mat q = matmul(sh.c_q, w.w_dq[h]);
        Mat k = matmul(sh.c_kv, w.w_dk[h]);  // decompress the whole context
        Mat v = matmul(sh.c_kv, w.w_dv[h]);
        Mat s_nope = matmul_bt(q, k);
        Mat s_rope = matmul_bt(sh.q_rope[h], sh.k_rope);
        Mat s = add(s_nope, s_rope);
        Mat p = softmax_scaled(s, scale);
        Mat o = matmul(p, v);
        if (counts) {
            double rows = static_cast<double>(dims.l_new);
            double l = static_cast<double>(dims.l_total);
            double dh = static_cast<double>(dims.d_hd);
            counts->add_flops(LayerKind::QDecompress,
                              gemm_flops(rows, static_cast<double>(dims.d_qco), dh));
            counts->touch(LayerKind::QDecompress, w.w_dq[h]);
            counts->touch(LayerKind::QDecompress, q);
            counts->add_flops(LayerKind::KDecompress,
                              gemm_flops(l, static_cast<double>(dims.d_kvco), dh));
            counts->touch(LayerKind::KDecompress, w.w_dk[h]);
            counts->touch(LayerKind::KDecompress, k);
            counts->add_flops(LayerKind::VDecompress,
                              gemm_flops(l, static_cast<double>(dims.d_kvco), dh));
            counts->touch(LayerKind::VDecompress, w.w_dv[h]);
            counts->touch(LayerKind::VDecompress, v);
            counts->add_flops(LayerKind::Score, gemm_flops(rows, dh, l));
            counts->touch(LayerKind::Score, k);
            counts->touch(LayerKind::Score, s);  // written once, streamed onward
            if (!decode) counts->touch(LayerKind::Score, q);
            counts->add_flops(LayerKind::ScoreRope,
                              gemm_flops(rows, static_cast<double>(dims.d_rope), l));
            if (!decode) counts->touch(LayerKind::ScoreRope, sh.q_rope[h]);
            counts->add_flops(LayerKind::Context, gemm_flops(rows, l, dh));
            counts->touch(LayerKind::Context, v);
            counts->touch(LayerKind::Context, o);
        }
        out.scores.push_back(std::move(s));
        out.context.push_back(std::move(o));
    }
    return out;
}

MlaOutput mla_reordered(const TinyState& state, const TinyMlaWeights& w, const TinyDims& dims,
                        CountBook* counts) {
    Shared sh = compress(state, w, dims, counts);
    bool decode = dims.l_new == 1;
    double scale = std::sqrt(static_cast<double>(dims.d_hd));
    if (counts) {
        counts->touch(LayerKind::Score, sh.c_kv);
        counts->touch(LayerKind::Context, sh.c_kv);
        counts->touch(LayerKind::ScoreRope, sh.k_rope);
        if (!decode) counts->touch(LayerKind::QDecompress, sh.c_q);
    }
    MlaOutput out;
    for (int64_t hd = 0; hd < dims.n_hd; ++hd) {
        size_t h = static_cast<size_t>(hd);
        Mat q = matmul(sh.c_q, w.w_dq[h]);
        Mat q_folded = matmul_bt(q, w.w_dk[h]);  // q x W_DK^T, rows independent of L
        Mat s_nope = matmul_bt(q_folded, sh.c_kv);
        Mat s_rope = matmul_bt(sh.q_rope[h], sh.k_rope);
        Mat s = add(s_nope, s_rope);
        Mat p = softmax_scaled(s, scale);
        Mat o_latent = matmul(p, sh.c_kv);
        Mat o = matmul(o_latent, w.w_dv[h]);
        if (counts) {
            double rows = static_cast<double>(dims.l_new);
            double l = static_cast<double>(dims.l_total);
            double dh = static_cast<double>(dims.d_hd);
            double dkv = static_cast<double>(dims.d_kvco);
            counts->add_flops(LayerKind::QDecompress,
                              gemm_flops(rows, static_cast<double>(dims.d_qco), dh));
            counts->touch(LayerKind::QDecompress, w.w_dq[h]);
            counts->touch(LayerKind::QDecompress, q);
            counts->add_flops(LayerKind::KDecompress, gemm_flops(rows, dh, dkv));
            counts->touch(LayerKind::KDecompress, w.w_dk[h]);
            counts->touch(LayerKind::KDecompress, q_folded);
            if (!decode) counts->touch(LayerKind::KDecompress, q);
            counts->add_flops(LayerKind::Score, gemm_flops(rows, dkv, l));
            counts->touch(LayerKind::Score, s);
            if (!decode) counts->touch(LayerKind::Score, q_folded);
            counts->add_flops(LayerKind::ScoreRope,
                              gemm_flops(rows, static_cast<double>(dims.d_rope), l));
            if (!decode) counts->touch(LayerKind::ScoreRope, sh.q_rope[h]);
            counts->add_flops(LayerKind::Context, gemm_flops(rows, l, dkv));
            counts->touch(LayerKind::Context, o_latent);
            counts->add_flops(LayerKind::VDecompress, gemm_flops(rows, dkv, dh));
            counts->touch(LayerKind::VDecompress, w.w_dv[h]);
            counts->touch(LayerKind::VDecompress, o);
            if (!decode) counts->touch(LayerKind::VDecompress, o_latent);
        }
        out.scores.push_back(std::move(s));
        out.context.push_back(std::move(o));
    }
    return out;
}

CountBook instrumented_counts(MlaPath path, const TinyDims& dims, uint64_t seed) {
    TinyMlaWeights w = random_weights(dims, seed);
    Lcg rng(seed ^ 0x9e3779b97f4a7c15ULL);
    TinyState state = random_state(dims, rng);
    CountBook counts;
    if (path == MlaPath::Naive)
        mla_naive(state, w, dims, &counts);
    else
        mla_reordered(state, w, dims, &counts);
    return counts;
}

VerifyResult run_verification(int equivalence_seeds, bool verbose) {
    VerifyResult res;

    // Equivalence over random tiny instances.
    for (int seed = 1; seed <= equivalence_seeds; ++seed) {
        Lcg dim_rng(static_cast<uint64_t>(seed) * 7919ULL + 17ULL);
        auto pick = [&](int64_t lo, int64_t hi) {
            double u = (dim_rng.next() + 1.0) / 2.0;
            return lo + static_cast<int64_t>(u * static_cast<double>(hi - lo + 1)) % (hi - lo + 1);
        };
        TinyDims dims;
        dims.n_hd = pick(1, 4);
        dims.d_hd = pick(1, 8);
        dims.d_kvco = pick(1, 16);
        dims.d_qco = pick(1, 16);
        dims.d_emb = pick(1, 16);
        dims.d_rope = 2 * pick(0, 2);
        dims.l_total = pick(1, 16);
        dims.l_new = pick(1, dims.l_total);

        TinyMlaWeights w = random_weights(dims, static_cast<uint64_t>(seed));
        Lcg rng(static_cast<uint64_t>(seed) * 104729ULL + 3ULL);
        TinyState state = random_state(dims, rng);
        MlaOutput naive = mla_naive(state, w, dims);
        MlaOutput reordered = mla_reordered(state, w, dims);

        double max_abs = 0.0, max_val = 0.0;
        for (int64_t h = 0; h < dims.n_hd; ++h) {
            size_t hh = static_cast<size_t>(h);
            for (size_t i = 0; i < naive.scores[hh].data.size(); ++i) {
                max_abs = std::max(max_abs, std::abs(naive.scores[hh].data[i] -
                                                     reordered.scores[hh].data[i]));
                max_val = std::max(max_val, std::abs(naive.scores[hh].data[i]));
            }
            for (size_t i = 0; i < naive.context[hh].data.size(); ++i) {
                max_abs = std::max(max_abs, std::abs(naive.context[hh].data[i] -
                                                     reordered.context[hh].data[i]));
                max_val = std::max(max_val, std::abs(naive.context[hh].data[i]));
            }
        }
        double rel = max_abs / (1.0 + max_val);
        res.max_rel_err = std::max(res.max_rel_err, rel);
        ++res.instances;
        if (rel > 1e-9) {
            ++res.failures;
            std::ostringstream msg;
            msg << "seed " << seed << ": naive vs reordered rel err " << rel;
            res.messages.push_back(msg.str());
        }
    }

    // Count validation against the closed-form layer costs at dims >= 64.
    TinyDims big;
    big.n_hd = 4;
    big.d_hd = 64;
    big.d_kvco = 64;
    big.d_qco = 64;
    big.d_emb = 128;
    big.d_rope = 64;
    big.l_total = 128;

    ModelSpec tiny;
    tiny.name = "oracle-dims";
    tiny.n_dec = 1;
    tiny.d_emb = big.d_emb;
    tiny.n_hd = big.n_hd;
    tiny.d_hd = big.d_hd;
    tiny.attention = MlaAttention{big.d_qco, big.d_kvco, big.d_rope};
    tiny.ffn = DenseFfn{64, true};
    tiny.validate();

    struct Case {
        MlaPath path;
        bool reorder;
        int64_t l_new;
    };
    for (Case c : {Case{MlaPath::Naive, false, 1}, Case{MlaPath::Reordered, true, 1},
                   Case{MlaPath::Naive, false, big.l_total},
                   Case{MlaPath::Reordered, true, big.l_total}}) {
        TinyDims dims = big;
        dims.l_new = c.l_new;
        CountBook counted = instrumented_counts(c.path, dims);
        Phase phase = c.l_new == 1 ? Phase::decode(dims.l_total) : Phase::prefill(dims.l_total);
        auto formulas = mla_block_cost(tiny, phase, c.reorder, false, 1, tiny.n_hd);
        for (const auto& layer : formulas) {
            if (layer.kind == LayerKind::OutProj || layer.kind == LayerKind::Softmax) continue;
            double cf = counted.flops.count(layer.kind) ? counted.flops[layer.kind] : 0.0;
            double cb = counted.bytes.count(layer.kind) ? counted.bytes[layer.kind] : 0.0;
            double ef = layer.flops, eb = layer.bytes;
            double ferr = ef > 0 ? std::abs(cf - ef) / ef : std::abs(cf);
            double berr = eb > 0 ? std::abs(cb - eb) / eb : std::abs(cb);
            if (ferr > 0.1 || berr > 0.1) {
                ++res.failures;
                std::ostringstream msg;
                msg << (c.path == MlaPath::Naive ? "naive " : "reordered ")
                    << (c.l_new == 1 ? "decode " : "prefill ") << to_string(layer.kind)
                    << ": flops " << cf << " vs " << ef << ", bytes " << cb << " vs " << eb;
                res.messages.push_back(msg.str());
            } else if (verbose) {
                std::ostringstream msg;
                msg << "ok " << (c.l_new == 1 ? "decode " : "prefill ") << to_string(layer.kind)
                    << " flops_err " << ferr << " bytes_err " << berr;
                res.messages.push_back(msg.str());
            }
        }
    }

    // Reordered decode folding is L-independent; the naive path scales with L.
    {
        TinyDims d1 = big, d2 = big;
        d1.l_new = d2.l_new = 1;
        d2.l_total = 2 * big.l_total;
        double r1 = instrumented_counts(MlaPath::Reordered, d1).flops[LayerKind::KDecompress];
        double r2 = instrumented_counts(MlaPath::Reordered, d2).flops[LayerKind::KDecompress];
        double n1 = instrumented_counts(MlaPath::Naive, d1).flops[LayerKind::KDecompress];
        if (r1 != r2) {
            ++res.failures;
            res.messages.push_back("reordered decode K-side flops depend on L");
        }
        double expected_ratio = static_cast<double>(d1.l_total);
        if (std::abs(n1 / r1 - expected_ratio) > 1e-9 * expected_ratio) {
            ++res.failures;
            res.messages.push_back("naive/reordered K-decompress flop ratio is not exactly L");
        }
    }

    return res;
}

}  // namespace llmroof::oracle
