"""Pure-numpy trial kernels (vectorized over a chunk of trials).

Must stay bit-for-bit equivalent to :mod:`.kernels_numba`: same draw layout,
same inversion comparisons, same left-to-right accumulation order over tasks
(column-wise loops; ``np.cumsum``-style sequential adds, never pairwise).
"""

from __future__ import annotations

import numpy as np

from . import rng
from .tables import MODE_BERNOULLI, MODE_FIXED, MODE_SINGLE_SPECIAL

BACKEND_NAME = "numpy"

LEARNER_ERM = 0
LEARNER_POOL = 1
LEARNER_ORACLE = 2
LEARNER_IBB = 3
LEARNER_CONST_HSTAR = 4


def _bases(seed, salt, lo, hi):
    trials = np.arange(lo, hi, dtype=np.uint64)
    return rng.stream_base(seed, salt, trials)[:, None]


def _task_uniform(base, offset, step, N):
    draws = offset + step * np.arange(N, dtype=np.uint64)
    return rng.uniforms_from_base(base, draws)


def _components_for(mode, alpha_f, comp_fixed, ua, base, N):
    if mode == MODE_FIXED:
        return np.broadcast_to(comp_fixed.astype(np.int64), ua.shape)
    if mode == MODE_BERNOULLI:
        return np.where(ua < alpha_f, 0, 1)
    if mode == MODE_SINGLE_SPECIAL:
        u_t = rng.uniforms_from_base(base, np.array([1], dtype=np.uint64))[:, 0]
        tstar = (u_t * N).astype(np.int64)
        return np.where(np.arange(N)[None, :] == tstar[:, None], 0, 1)
    raise ValueError(f"unknown mode {mode}")


def _sample_kj(base, N, mode, alpha_f, comp_fixed, cdf_k, cdf_j):
    """Sample (comp, k, j) matrices for a chunk using the standard layout:
    per task t the draws are slots (2+3t, 3+3t, 4+3t) = (assign, k, j)."""
    ua = _task_uniform(base, np.uint64(2), np.uint64(3), N)
    uk = _task_uniform(base, np.uint64(3), np.uint64(3), N)
    uj = _task_uniform(base, np.uint64(4), np.uint64(3), N)
    comp = _components_for(mode, alpha_f, comp_fixed, ua, base, N)
    k0 = np.searchsorted(cdf_k[0], uk, side="right").astype(np.int64)
    k1 = np.searchsorted(cdf_k[1], uk, side="right").astype(np.int64)
    k = np.where(comp == 0, k0, k1)
    if cdf_j.ndim == 3:
        rows = cdf_j[comp, k]            # (T, N, n+1)
    else:
        sigma = ((rng.uniforms_from_base(base, np.array([0], dtype=np.uint64))[:, 0])
                 * 2.0).astype(np.int64)
        rows = cdf_j[sigma[:, None], comp, k]
    j = (rows <= uj[..., None]).sum(axis=2).astype(np.int64)
    return comp, k, j


def risk_chunk(seed, salt, lo, hi, N, n, mode, alpha_f, comp_fixed, cdf_k, cdf_j,
               learner, task, c0, eps_t, inv_n, excess, ystar_sign,
               out_val, out_cov, out_empty):
    base = _bases(seed, salt, lo, hi)
    comp, k, j = _sample_kj(base, N, mode, alpha_f, comp_fixed, cdf_k, cdf_j)
    v = ystar_sign * (2 * j - k)
    if learner == LEARNER_ERM:
        err = v[:, task] <= 0
    elif learner == LEARNER_POOL:
        err = v.sum(axis=1) <= 0
    elif learner == LEARNER_ORACLE:
        good = comp == 0
        n_good = good.sum(axis=1)
        s_good = np.where(good, v, 0).sum(axis=1)
        err = np.where(n_good > 0, s_good <= 0, v.sum(axis=1) <= 0)
    elif learner == LEARNER_CONST_HSTAR:
        err = np.zeros(v.shape[0], dtype=bool)
    elif learner == LEARNER_IBB:
        keep0 = np.ones(v.shape[0], dtype=bool)
        keep1 = np.ones(v.shape[0], dtype=bool)
        for t in range(N):
            vt = v[:, t]
            hh1 = vt > 0
            eo = np.abs(vt) * inv_n
            radius = c0 * np.sqrt((k[:, t] * inv_n) * eps_t[t]) + c0 * eps_t[t]
            both = eo <= radius
            keep0 &= ~hh1 | both
            keep1 &= hh1 | both
        err = ~keep1
        out_cov[:] = keep1.astype(np.uint8)
        out_empty[:] = (~keep0 & ~keep1).astype(np.uint8)
    else:
        raise ValueError(f"unknown learner code {learner}")
    if learner != LEARNER_IBB:
        out_cov[:] = 1
        out_empty[:] = 0
    out_val[:] = excess * err.astype(np.float64)


def bayes_fn_chunk(seed, salt, lo, hi, N, n, mode, alpha_f, comp_fixed,
                   cdf_k, cdf_j_both, score, out_err, out_nfav):
    base = _bases(seed, salt, lo, hi)
    sigma = ((rng.uniforms_from_base(base, np.array([0], dtype=np.uint64))[:, 0])
             * 2.0).astype(np.int64)
    comp, k, j = _sample_kj(base, N, mode, alpha_f, comp_fixed, cdf_k, cdf_j_both)
    acc = np.zeros(k.shape[0])
    for t in range(N):
        acc = acc + score[k[:, t], j[:, t]]
    sig_hat = (acc > 0).astype(np.int64)
    out_err[:] = (sig_hat != sigma).astype(np.float64)
    out_nfav[:] = (comp == 0).sum(axis=1).astype(np.int64)


def kl_fn_chunk(seed, salt, lo, hi, N, n, mode, alpha_f, comp_fixed,
                cdf_k, cdf_j, score_truth, out_llr):
    base = _bases(seed, salt, lo, hi)
    comp, k, j = _sample_kj(base, N, mode, alpha_f, comp_fixed, cdf_k, cdf_j)
    acc = np.zeros(k.shape[0])
    for t in range(N):
        acc = acc + score_truth[k[:, t], j[:, t]]
    out_llr[:] = acc


def bayes_agn_chunk(seed, salt, lo, hi, N, n, cdf_c_sig, cdf_q, r1, r0, out_err):
    base = _bases(seed, salt, lo, hi)
    sigma = ((rng.uniforms_from_base(base, np.array([0], dtype=np.uint64))[:, 0])
             * 2.0).astype(np.int64)
    u_t = rng.uniforms_from_base(base, np.array([1], dtype=np.uint64))[:, 0]
    tstar = (u_t * N).astype(np.int64)
    uc = _task_uniform(base, np.uint64(2), np.uint64(1), N)
    cq = np.searchsorted(cdf_q, uc, side="right").astype(np.int64)
    cp0 = np.searchsorted(cdf_c_sig[0], uc, side="right").astype(np.int64)
    cp1 = np.searchsorted(cdf_c_sig[1], uc, side="right").astype(np.int64)
    cp = np.where(sigma[:, None] == 1, cp1, cp0)
    is_star = np.arange(N)[None, :] == tstar[:, None]
    c = np.where(is_star, cp, cq)
    s1 = np.zeros(c.shape[0])
    s0 = np.zeros(c.shape[0])
    for t in range(N):
        s1 = s1 + r1[c[:, t]]
        s0 = s0 + r0[c[:, t]]
    sig_hat = (s1 > s0).astype(np.int64)
    out_err[:] = (sig_hat != sigma).astype(np.float64)


def construction_chunk(seed, salt, lo, hi, n_plus_1, m, out):
    base = _bases(seed, salt, lo, hi)
    u = rng.uniforms_from_base(base, np.arange(n_plus_1, dtype=np.uint64))
    idx = (u * m).astype(np.int64) + 1
    T = idx.shape[0]
    counts = np.zeros((T, m + 1), dtype=np.int64)
    np.add.at(counts, (np.repeat(np.arange(T), n_plus_1), idx.ravel()), 1)
    s = np.cumsum(counts[:, 1:], axis=1)
    feasible = np.all(s >= np.arange(1, m + 1)[None, :], axis=1)
    out[:] = feasible.astype(np.float64)
