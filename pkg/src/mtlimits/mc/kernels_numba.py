"""Compiled per-trial kernels (numba, nopython, nogil).

Mirror of :mod:`.kernels_numpy`, draw for draw and operation for operation.
All RNG arithmetic stays in uint64; no transcendental calls happen inside
kernels (sqrt only, which IEEE 754 rounds exactly), so outputs match the
numpy backend bit for bit.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from . import rng
from .tables import MODE_BERNOULLI, MODE_FIXED, MODE_SINGLE_SPECIAL

BACKEND_NAME = "numba"

LEARNER_ERM = 0
LEARNER_POOL = 1
LEARNER_ORACLE = 2
LEARNER_IBB = 3
LEARNER_CONST_HSTAR = 4

_GOLD = rng.GOLDEN
_MA = rng.MIX_A
_MB = rng.MIX_B
_SALTM = rng.SALT_MUL
_TRIALM = rng.TRIAL_MUL
_S30 = rng.SHIFT_30
_S27 = rng.SHIFT_27
_S31 = rng.SHIFT_31
_S11 = rng.SHIFT_11
_INV53 = rng.INV_2_53
_ONE = np.uint64(1)

_JIT = dict(cache=True, nogil=True)


@njit(**_JIT)
def _mix64(z):
    z = (z ^ (z >> _S30)) * _MA
    z = (z ^ (z >> _S27)) * _MB
    return z ^ (z >> _S31)


@njit(**_JIT)
def _base(seed, salt, trial):
    s1 = _mix64(seed + _GOLD)
    s2 = _mix64(s1 ^ (salt * _SALTM))
    return _mix64(s2 ^ (trial * _TRIALM))


@njit(**_JIT)
def _unif(base, d):
    bits = _mix64(base + (d + _ONE) * _GOLD)
    return np.float64(bits >> _S11) * _INV53


@njit(**_JIT)
def _invert(cdf, u):
    k = 0
    size = cdf.shape[0]
    while k < size and cdf[k] <= u:
        k += 1
    return k


@njit(**_JIT)
def _invert_row(cdf2, row, u):
    j = 0
    size = cdf2.shape[1]
    while j < size and cdf2[row, j] <= u:
        j += 1
    return j


@njit(**_JIT)
def _task_comp(mode, alpha_f, comp_fixed, t, tstar, ua):
    if mode == MODE_FIXED:
        return int(comp_fixed[t])
    if mode == MODE_BERNOULLI:
        return 0 if ua < alpha_f else 1
    return 0 if t == tstar else 1  # MODE_SINGLE_SPECIAL


@njit(**_JIT)
def risk_chunk(seed, salt, lo, hi, N, n, mode, alpha_f, comp_fixed, cdf_k, cdf_j,
               learner, task, c0, eps_t, inv_n, excess, ystar_sign,
               out_val, out_cov, out_empty):
    for i in range(lo, hi):
        b = _base(seed, salt, np.uint64(i))
        tstar = -1
        if mode == MODE_SINGLE_SPECIAL:
            tstar = int(_unif(b, _ONE) * N)
        v_task = 0
        v_all = 0
        v_good = 0
        n_good = 0
        keep0 = True
        keep1 = True
        for t in range(N):
            d = np.uint64(2 + 3 * t)
            ua = _unif(b, d)
            uk = _unif(b, d + _ONE)
            uj = _unif(b, d + _ONE + _ONE)
            comp = _task_comp(mode, alpha_f, comp_fixed, t, tstar, ua)
            k = _invert(cdf_k[comp], uk)
            j = _invert_row(cdf_j[comp], k, uj)
            v = ystar_sign * (2 * j - k)
            v_all += v
            if comp == 0:
                v_good += v
                n_good += 1
            if t == task:
                v_task = v
            if learner == LEARNER_IBB:
                hh1 = v > 0
                eo = np.float64(abs(v)) * inv_n
                radius = c0 * np.sqrt((k * inv_n) * eps_t[t]) + c0 * eps_t[t]
                both = eo <= radius
                keep0 = keep0 and ((not hh1) or both)
                keep1 = keep1 and (hh1 or both)
        if learner == LEARNER_ERM:
            err = v_task <= 0
        elif learner == LEARNER_POOL:
            err = v_all <= 0
        elif learner == LEARNER_ORACLE:
            err = (v_good <= 0) if n_good > 0 else (v_all <= 0)
        elif learner == LEARNER_CONST_HSTAR:
            err = False
        else:
            err = not keep1
        idx = i - lo
        out_val[idx] = excess if err else 0.0
        if learner == LEARNER_IBB:
            out_cov[idx] = 1 if keep1 else 0
            out_empty[idx] = 1 if (not keep0 and not keep1) else 0
        else:
            out_cov[idx] = 1
            out_empty[idx] = 0


@njit(**_JIT)
def bayes_fn_chunk(seed, salt, lo, hi, N, n, mode, alpha_f, comp_fixed,
                   cdf_k, cdf_j_both, score, out_err, out_nfav):
    for i in range(lo, hi):
        b = _base(seed, salt, np.uint64(i))
        sigma = int(_unif(b, np.uint64(0)) * 2.0)
        tstar = -1
        if mode == MODE_SINGLE_SPECIAL:
            tstar = int(_unif(b, _ONE) * N)
        acc = 0.0
        n_fav = 0
        for t in range(N):
            d = np.uint64(2 + 3 * t)
            ua = _unif(b, d)
            uk = _unif(b, d + _ONE)
            uj = _unif(b, d + _ONE + _ONE)
            comp = _task_comp(mode, alpha_f, comp_fixed, t, tstar, ua)
            if comp == 0:
                n_fav += 1
            k = _invert(cdf_k[comp], uk)
            j = _invert_row(cdf_j_both[sigma, comp], k, uj)
            acc = acc + score[k, j]
        sig_hat = 1 if acc > 0 else 0
        out_err[i - lo] = 1.0 if sig_hat != sigma else 0.0
        out_nfav[i - lo] = n_fav


@njit(**_JIT)
def kl_fn_chunk(seed, salt, lo, hi, N, n, mode, alpha_f, comp_fixed,
                cdf_k, cdf_j, score_truth, out_llr):
    for i in range(lo, hi):
        b = _base(seed, salt, np.uint64(i))
        tstar = -1
        if mode == MODE_SINGLE_SPECIAL:
            tstar = int(_unif(b, _ONE) * N)
        acc = 0.0
        for t in range(N):
            d = np.uint64(2 + 3 * t)
            ua = _unif(b, d)
            uk = _unif(b, d + _ONE)
            uj = _unif(b, d + _ONE + _ONE)
            comp = _task_comp(mode, alpha_f, comp_fixed, t, tstar, ua)
            k = _invert(cdf_k[comp], uk)
            j = _invert_row(cdf_j[comp], k, uj)
            acc = acc + score_truth[k, j]
        out_llr[i - lo] = acc


@njit(**_JIT)
def bayes_agn_chunk(seed, salt, lo, hi, N, n, cdf_c_sig, cdf_q, r1, r0, out_err):
    for i in range(lo, hi):
        b = _base(seed, salt, np.uint64(i))
        sigma = int(_unif(b, np.uint64(0)) * 2.0)
        tstar = int(_unif(b, _ONE) * N)
        s1 = 0.0
        s0 = 0.0
        for t in range(N):
            uc = _unif(b, np.uint64(2 + t))
            if t == tstar:
                c = _invert(cdf_c_sig[sigma], uc)
            else:
                c = _invert(cdf_q, uc)
            s1 = s1 + r1[c]
            s0 = s0 + r0[c]
        sig_hat = 1 if s1 > s0 else 0
        out_err[i - lo] = 1.0 if sig_hat != sigma else 0.0


@njit(**_JIT)
def construction_chunk(seed, salt, lo, hi, n_plus_1, m, out):
    counts = np.zeros(m + 1, dtype=np.int64)
    for i in range(lo, hi):
        b = _base(seed, salt, np.uint64(i))
        counts[:] = 0
        for t in range(n_plus_1):
            u = _unif(b, np.uint64(t))
            counts[int(u * m) + 1] += 1
        feasible = True
        running = 0
        for idx in range(1, m + 1):
            running += counts[idx]
            if running < idx:
                feasible = False
                break
        out[i - lo] = 1.0 if feasible else 0.0
