"""Counter-based random number generation.

Every uniform draw is a pure function of (seed, stream salt, trial index,
draw index): a chain of 64-bit finalizer hashes followed by a golden-ratio
Weyl step.  Trials therefore own disjoint substreams with no shared state,
which makes Monte Carlo runs independent of worker count and lets the
numpy-vectorized and the per-trial compiled kernels reproduce each other
bit for bit.

Layout of one draw:

    s1   = mix64(seed + GOLDEN)
    s2   = mix64(s1 ^ salt * SALT_MUL)
    base = mix64(s2 ^ trial * TRIAL_MUL)          # per-trial stream state
    u_d  = (mix64(base + (d + 1) * GOLDEN) >> 11) * 2^-53

``mix64`` is the avalanche finalizer from the splitmix64 generator.
"""

from __future__ import annotations

import numpy as np

U64 = np.uint64
MASK64 = (1 << 64) - 1

GOLDEN = U64(0x9E3779B97F4A7C15)
MIX_A = U64(0xBF58476D1CE4E5B9)
MIX_B = U64(0x94D049BB133111EB)
SALT_MUL = U64(0xD1342543DE82EF95)
TRIAL_MUL = U64(0xC2B2AE3D27D4EB4F)
SHIFT_30 = U64(30)
SHIFT_27 = U64(27)
SHIFT_31 = U64(31)
SHIFT_11 = U64(11)
INV_2_53 = 1.0 / 9007199254740992.0  # 2^-53

# stream salts, one per Monte Carlo quantity (keeps draw layouts independent);
# every learner-risk simulation shares SALT_RISK, so runs at the same seed see
# the same multisamples and learner comparisons are paired
SALT_DATASET = 1
SALT_RISK = 2
SALT_BAYES_TEST = 6
SALT_MIXTURE_KL = 7
SALT_CONSTRUCTION = 8

__all__ = [
    "mix64", "mix64_int", "stream_base", "stream_base_int", "stream_uniforms",
    "uniforms_from_base", "uniform_int", "TrialStream",
    "GOLDEN", "MIX_A", "MIX_B", "SALT_MUL", "TRIAL_MUL",
    "SHIFT_30", "SHIFT_27", "SHIFT_31", "SHIFT_11", "INV_2_53",
    "SALT_DATASET", "SALT_RISK", "SALT_BAYES_TEST", "SALT_MIXTURE_KL",
    "SALT_CONSTRUCTION",
]


def mix64(z: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer, vectorized over uint64 arrays."""
    with np.errstate(over="ignore"):
        z = (z ^ (z >> SHIFT_30)) * MIX_A
        z = (z ^ (z >> SHIFT_27)) * MIX_B
        return z ^ (z >> SHIFT_31)


def mix64_int(z: int) -> int:
    """splitmix64 finalizer on Python ints (reference/scalar path)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stream_base(seed: int, salt: int, trials: np.ndarray) -> np.ndarray:
    """Per-trial stream states for a uint64 array of trial indices."""
    trials = np.asarray(trials, dtype=np.uint64)
    with np.errstate(over="ignore"):
        s1 = mix64(np.array(seed & MASK64, dtype=np.uint64) + GOLDEN)
        s2 = mix64(s1 ^ (U64(salt & MASK64) * SALT_MUL))
        return mix64(s2 ^ (trials * TRIAL_MUL))


def stream_base_int(seed: int, salt: int, trial: int) -> int:
    s1 = mix64_int((seed + 0x9E3779B97F4A7C15) & MASK64)
    s2 = mix64_int(s1 ^ ((salt * 0xD1342543DE82EF95) & MASK64))
    return mix64_int(s2 ^ ((trial * 0xC2B2AE3D27D4EB4F) & MASK64))


def uniforms_from_base(base: np.ndarray, draws: np.ndarray) -> np.ndarray:
    """Uniforms in [0, 1) for stream bases crossed with draw indices.

    ``base`` and ``draws`` broadcast against each other, so a column of
    trial bases against a row of draw indices yields a (trials, draws)
    matrix in one call.
    """
    base = np.asarray(base, dtype=np.uint64)
    draws = np.asarray(draws, dtype=np.uint64)
    with np.errstate(over="ignore"):
        bits = mix64(base + (draws + U64(1)) * GOLDEN)
    return (bits >> SHIFT_11) * INV_2_53


def uniform_int(base: int, draw: int) -> float:
    bits = mix64_int((base + ((draw + 1) * 0x9E3779B97F4A7C15)) & MASK64)
    return (bits >> 11) * INV_2_53


def stream_uniforms(seed: int, salt: int, trial: int, count: int) -> np.ndarray:
    """The first ``count`` uniforms of one trial's stream."""
    base = stream_base(seed, salt, np.array([trial], dtype=np.uint64))
    return uniforms_from_base(base[:, None], np.arange(count))[0]


class TrialStream:
    """Sequential view of one (seed, salt, trial) substream.

    Mirrors what the batch kernels consume draw-for-draw, so a scalar code
    path (for example sampling a single dataset) sees the same numbers as
    the vectorized one.
    """

    def __init__(self, seed: int, salt: int = SALT_DATASET, trial: int = 0):
        self.seed = int(seed)
        self.salt = int(salt)
        self.trial = int(trial)
        self._base = stream_base_int(self.seed, self.salt, self.trial)
        self._cursor = 0

    def uniform(self) -> float:
        u = uniform_int(self._base, self._cursor)
        self._cursor += 1
        return u

    def uniforms(self, count: int) -> np.ndarray:
        out = uniforms_from_base(
            np.array([self._base], dtype=np.uint64)[:, None],
            np.arange(self._cursor, self._cursor + count))[0]
        self._cursor += count
        return out

    def skip(self, count: int) -> None:
        self._cursor += count
