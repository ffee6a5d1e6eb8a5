#!/usr/bin/env python3
"""Standalone generator for the frozen MLA golden values in test_reorder_oracle.cpp.

Straight-line numpy implementation, written independently of the C++ library.
Shares only the input convention: a 64-bit LCG (MMIX constants) mapped to
[-1, 1), filling matrices row-major in the documented order.

Run:  python3 tests/make_mla_golden.py
"""

import numpy as np

MASK = (1 << 64) - 1


class Lcg:
    def __init__(self, seed):
        self.state = seed

    def next(self):
        self.state = (self.state * 6364136223846793005 + 1442695040888963407) & MASK
        return 2.0 * ((self.state >> 11) / 9007199254740992.0) - 1.0

    def mat(self, rows, cols):
        return np.array([[self.next() for _ in range(cols)] for _ in range(rows)])


def rope_rotate(m, first_position):
    m = m.copy()
    rows, cols = m.shape
    if cols == 0:
        return m
    for r in range(rows):
        pos = first_position + r
        for j in range(0, cols - 1, 2):
            theta = pos * 10000.0 ** (-j / cols)
            c, s = np.cos(theta), np.sin(theta)
            x, y = m[r, j], m[r, j + 1]
            m[r, j] = x * c - y * s
            m[r, j + 1] = x * s + y * c
    return m


def softmax(s, scale):
    z = s / scale
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def main():
    n_hd, d_hd, d_kvco, d_qco, d_emb, d_rope = 2, 3, 4, 4, 5, 2
    l_total, l_new, seed = 6, 1, 42

    rng = Lcg(seed)
    w_cq = rng.mat(d_emb, d_qco)
    w_ckv = rng.mat(d_emb, d_kvco)
    w_rk = rng.mat(d_emb, d_rope)
    w_dq, w_dk, w_dv, w_rq = [], [], [], []
    for _ in range(n_hd):
        w_dq.append(rng.mat(d_qco, d_hd))
        w_dk.append(rng.mat(d_kvco, d_hd))
        w_dv.append(rng.mat(d_kvco, d_hd))
        w_rq.append(rng.mat(d_qco, d_rope))

    state_rng = Lcg((seed * 104729 + 3) & MASK)
    h = state_rng.mat(l_total, d_emb)

    h_new = h[-l_new:]
    c_q = h_new @ w_cq
    c_kv = h @ w_ckv
    k_rope = rope_rotate(h @ w_rk, 0)

    scores, contexts = [], []
    for i in range(n_hd):
        q = c_q @ w_dq[i]
        k = c_kv @ w_dk[i]
        v = c_kv @ w_dv[i]
        q_rope = rope_rotate(c_q @ w_rq[i], l_total - l_new)
        s = q @ k.T + q_rope @ k_rope.T
        p = softmax(s, np.sqrt(d_hd))
        scores.append(s)
        contexts.append(p @ v)

    def dump(name, mats):
        flat = np.concatenate([m.ravel() for m in mats])
        body = ",\n    ".join(f"{v:.17g}" for v in flat)
        print(f"const double {name}[] = {{\n    {body}}};")

    dump("kGoldenScores", scores)
    dump("kGoldenContext", contexts)


if __name__ == "__main__":
    main()
