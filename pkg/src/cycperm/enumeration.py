"""Exact and Monte-Carlo evaluation of weighted permutation sums.

alpha_bruteforce and beta_bruteforce sum linear and cyclic window-weight
products over the whole symmetric group.  The enumeration is sharded by
the first entry of the permutation; within a shard, windows that do not
involve position 0 have the same standardization for every shard (the
remaining entries differ only by an order-preserving relabeling), so
their weight product is computed once and reused n times.

Integer weight schemes are accumulated exactly: the vectorized path is
used only while every partial sum provably fits in the 53-bit float
mantissa, otherwise a plain Python loop with arbitrary-precision
integers takes over.  Real weights use pairwise summation within shards
and compensated summation across shards.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import OutOfDomain, TooLarge, TooShort
from .perms import (
    WeightScheme,
    double_descent_scheme,
    lehmer_index,
    pattern_indices,
)

# Enumerating S_12 would touch half a billion permutations; past this
# point the Monte-Carlo and spectral routes are the intended tools.
N_MAX_DEFAULT = 11

# Callers may raise n_max, but the cached permutation tables stop here:
# the table for first-entry sharding at n = 13 alone would need 5.7 GB.
N_HARD_CAP = 12

_MANTISSA = 2.0 ** 53


@dataclass(frozen=True)
class EnumerationResult:
    """Weighted sum over S_n, exact when the scheme is integer-valued."""

    n: int
    value: int | float
    scheme_digest: str
    mode: str

    @property
    def exact(self) -> bool:
        return isinstance(self.value, int)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "mode": self.mode,
            "scheme": self.scheme_digest,
            "value": self.value,
            "exact": self.exact,
        }


@dataclass(frozen=True)
class MCEstimate:
    """Monte-Carlo estimate of a cyclic weight average."""

    mean: float
    std_error: float
    samples: int
    seed: int

    def to_json_dict(self) -> dict:
        return {
            "mean": self.mean,
            "std_error": self.std_error,
            "samples": self.samples,
            "seed": self.seed,
        }


@lru_cache(maxsize=None)
def _lex_perms(k: int) -> np.ndarray:
    """All permutations of 1..k as a (k!, k) int8 array, lexicographic.

    Built recursively: the block with first entry v is v followed by the
    permutations of the remaining values, which are the permutations of
    1..k-1 pushed up by one above v.  Monotone relabeling preserves
    lexicographic order, so each block (hence the whole array) is sorted.
    """
    if k < 1 or k > N_HARD_CAP - 1:
        raise OutOfDomain(f"permutation table for k={k} not supported")
    if k == 1:
        out = np.ones((1, 1), dtype=np.int8)
    else:
        sub = _lex_perms(k - 1)
        block = sub.shape[0]
        out = np.empty((block * k, k), dtype=np.int8)
        for v in range(1, k + 1):
            rows = out[(v - 1) * block : v * block]
            rows[:, 0] = v
            rows[:, 1:] = sub + (sub >= v)
    out.flags.writeable = False
    return out


def _float_sums_exact(n: int, scheme: WeightScheme, mode: str) -> bool:
    """True if every vectorized partial sum stays below 2^53 in magnitude.

    Window products of integer weights are integers; as long as both the
    products and the per-shard partial sums fit in the float64 mantissa
    the vectorized route is exact.
    """
    m = scheme.m
    wt_max = float(np.max(np.abs(scheme.wt_table())))
    if mode == "cyclic":
        bound = wt_max ** n
    else:
        bound = (
            float(np.max(np.abs(scheme.wt1_table())))
            * float(np.max(np.abs(scheme.wt2_table())))
            * wt_max ** max(0, n - m)
        )
    return bound * math.factorial(max(1, n - 1)) <= _MANTISSA


def _slow_sum(n: int, scheme: WeightScheme, mode: str) -> int:
    """Exact integer fallback: plain loop, arbitrary-precision products."""
    m = scheme.m
    wt = [int(v) for v in scheme.wt_table()]
    wt1 = [int(v) for v in scheme.wt1_table()]
    wt2 = [int(v) for v in scheme.wt2_table()]
    total = 0
    for pi in itertools.permutations(range(1, n + 1)):
        if mode == "cyclic":
            prod = 1
            for s in range(n):
                window = tuple(pi[(s + j) % n] for j in range(m + 1))
                prod *= wt[lehmer_index(window)]
                if prod == 0:
                    break
        else:
            prod = wt1[lehmer_index(pi[:m])] * wt2[lehmer_index(pi[n - m:])]
            for s in range(n - m):
                if prod == 0:
                    break
                prod *= wt[lehmer_index(pi[s : s + m + 1])]
        total += prod
    return total


def _shard_sums(
    n: int, scheme: WeightScheme, mode: str, threads: int = 1
) -> list[float]:
    """Per-shard weight sums, one shard per first entry, in shard order."""
    m = scheme.m
    wt = scheme.wt_table()

    if mode == "linear" and n == m:
        # no full window exists; the sum is over boundary weights only
        perms = _lex_perms(n)
        idx = pattern_indices([perms[:, j] for j in range(n)])
        vals = scheme.wt1_table()[idx] * scheme.wt2_table()[idx]
        return [float(vals.sum())]

    base = _lex_perms(n - 1)
    if mode == "cyclic":
        starts = range(n)
        touching = [s for s in starts if s == 0 or s + m > n - 1]
    else:
        starts = range(n - m)
        touching = [0]

    shared = np.ones(base.shape[0], dtype=np.float64)
    for s in starts:
        if s in touching:
            continue
        idx = pattern_indices([base[:, s - 1 + j] for j in range(m + 1)])
        shared *= wt[idx]
    if mode == "linear":
        idx = pattern_indices([base[:, n - m - 1 + j] for j in range(m)])
        shared *= scheme.wt2_table()[idx]

    def shard(v: int) -> float:
        relabeled: dict[int, np.ndarray] = {}

        def col(p: int):
            if p == 0:
                return v
            if p not in relabeled:
                c = base[:, p - 1]
                relabeled[p] = c + (c >= v)
            return relabeled[p]

        prod = shared.copy()
        for s in touching:
            cols = [col((s + j) % n) for j in range(m + 1)]
            prod *= wt[pattern_indices(cols)]
        if mode == "linear":
            idx1 = pattern_indices([col(p) for p in range(m)])
            prod *= scheme.wt1_table()[idx1]
        return float(prod.sum())

    values = range(1, n + 1)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(shard, values))
    return [shard(v) for v in values]


def _bruteforce_value(
    n: int, scheme: WeightScheme, mode: str, threads: int
) -> int | float:
    if scheme.is_integer and not _float_sums_exact(n, scheme, mode):
        return _slow_sum(n, scheme, mode)
    sums = _shard_sums(n, scheme, mode, threads)
    if scheme.is_integer:
        return sum(int(round(s)) for s in sums)
    return math.fsum(sums)


def alpha_bruteforce(
    n: int,
    w: WeightScheme,
    n_max: int = N_MAX_DEFAULT,
    threads: int = 1,
) -> EnumerationResult:
    """Sum of linear weights over all of S_n.

    For 0/1 schemes built from a forbidden pattern set this counts the
    permutations none of whose consecutive windows standardize to a
    forbidden pattern.
    """
    if n < w.m:
        raise TooShort(f"linear weights need n >= {w.m}, got {n}")
    if n > min(n_max, N_HARD_CAP):
        raise TooLarge(
            f"n={n} exceeds the enumeration bound {min(n_max, N_HARD_CAP)}; "
            "use beta_montecarlo or the spectral route for larger n"
        )
    value = _bruteforce_value(n, w, "linear", threads)
    return EnumerationResult(n, value, w.digest, "linear")


def beta_bruteforce(
    n: int,
    w: WeightScheme,
    n_max: int = N_MAX_DEFAULT,
    threads: int = 1,
) -> EnumerationResult:
    """Sum of cyclic weights over all of S_n (all windows read mod n)."""
    if n < w.m + 1:
        raise TooShort(f"cyclic weights need n >= {w.m + 1}, got {n}")
    if n > min(n_max, N_HARD_CAP):
        raise TooLarge(
            f"n={n} exceeds the enumeration bound {min(n_max, N_HARD_CAP)}; "
            "use beta_montecarlo or the spectral route for larger n"
        )
    value = _bruteforce_value(n, w, "cyclic", threads)
    return EnumerationResult(n, value, w.digest, "cyclic")


def weighted_cyclic_123_sum(n: int, n_max: int = N_MAX_DEFAULT) -> int:
    """Sum of 2^(cyclic double descents) over cyclic 123-avoiders of S_n.

    Every permutation with a cyclic ascending triple contributes 0, the
    rest contribute 2 per cyclic descending triple.  The sum works out to
    exactly n! for every n >= 3.
    """
    if n < 3:
        raise TooShort(f"need n >= 3, got {n}")
    result = beta_bruteforce(n, double_descent_scheme(), n_max=n_max)
    return int(result.value)


def _anchored_tail_stats(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Qualifying mask and double-descent count over tails with first entry n.

    Rows are the permutations of 1..n-1 filling positions 2..n after a
    fixed first entry n.  Qualifying means: no ascending triple anywhere
    (the first entry being maximal rules out triples through it) and a
    descent at the very end.
    """
    tail = _lex_perms(n - 1)
    count = tail.shape[0]
    ok = tail[:, -2] > tail[:, -1]
    bb = np.zeros(count, dtype=np.int64)
    bb += tail[:, 0] > tail[:, 1]  # triple (n, t1, t2): n > t1 always
    for s in range(n - 3):
        a, b, c = tail[:, s], tail[:, s + 1], tail[:, s + 2]
        ok &= ~((a < b) & (b < c))
        bb += (a > b) & (b > c)
    return tail, ok, bb


def anchored_double_descent_sum(n: int, n_max: int = N_MAX_DEFAULT) -> int:
    """Sum of 2^(double descents) over descent-heavy permutations led by n.

    The sum runs over permutations of S_n with first entry n, no
    ascending triple pi_i < pi_{i+1} < pi_{i+2}, and a final descent
    pi_{n-1} > pi_n; it equals (n-1)! for every n >= 3.
    """
    if n < 3:
        raise TooShort(f"need n >= 3, got {n}")
    if n > min(n_max, N_HARD_CAP):
        raise TooLarge(f"n={n} exceeds the enumeration bound {min(n_max, N_HARD_CAP)}")
    tail, ok, bb = _anchored_tail_stats(n)
    weights = np.where(ok, np.int64(1) << bb, 0)
    return int(weights.sum())


def anchored_double_descent_permutations(
    n: int, n_max: int = N_MAX_DEFAULT
) -> list[tuple[int, ...]]:
    """The qualifying permutations behind anchored_double_descent_sum."""
    if n < 3:
        raise TooShort(f"need n >= 3, got {n}")
    if n > min(n_max, N_HARD_CAP):
        raise TooLarge(f"n={n} exceeds the enumeration bound {min(n_max, N_HARD_CAP)}")
    tail, ok, _ = _anchored_tail_stats(n)
    return [(n, *map(int, row)) for row in tail[ok]]


def alternating_count(n: int, direction: str = "updown") -> int:
    """Number of alternating permutations of S_n.

    "updown" counts pi_1 < pi_2 > pi_3 < ...; "downup" the reverse.  The
    two counts agree for every n by the complement bijection.
    """
    if direction not in ("updown", "downup"):
        raise OutOfDomain(f"direction must be updown or downup, got {direction!r}")
    if n < 1:
        raise TooShort(f"need n >= 1, got {n}")
    if n > N_MAX_DEFAULT:
        raise TooLarge(f"n={n} exceeds the enumeration bound {N_MAX_DEFAULT}")
    perms = _lex_perms(n)
    ok = np.ones(perms.shape[0], dtype=bool)
    for i in range(n - 1):
        rises = (i % 2 == 0) == (direction == "updown")
        if rises:
            ok &= perms[:, i] < perms[:, i + 1]
        else:
            ok &= perms[:, i] > perms[:, i + 1]
    return int(ok.sum())


def beta_montecarlo(
    n: int,
    w: WeightScheme,
    samples: int,
    seed: int,
    chunk: int = 1 << 18,
) -> MCEstimate:
    """Monte-Carlo estimate of (cyclic weight sum over S_n) / n!.

    Draws uniform points in the n-cube; the product of window weights
    over the n cyclic windows of each point is an unbiased estimator of
    the average cyclic weight because standardization maps the uniform
    measure to the uniform distribution on S_n.
    """
    m = w.m
    if n < m + 1:
        raise TooShort(f"cyclic weights need n >= {m + 1}, got {n}")
    if samples < 1:
        raise OutOfDomain(f"need samples >= 1, got {samples}")
    rng = np.random.default_rng(seed)
    wt = w.wt_table()
    sums: list[float] = []
    sq_sums: list[float] = []
    remaining = samples
    while remaining > 0:
        block = min(chunk, remaining)
        remaining -= block
        x = rng.random((block, n))
        vals = np.ones(block, dtype=np.float64)
        for s in range(n):
            cols = [x[:, (s + j) % n] for j in range(m + 1)]
            vals *= wt[pattern_indices(cols)]
        sums.append(float(vals.sum()))
        sq_sums.append(float(np.square(vals).sum()))
    total = math.fsum(sums)
    total_sq = math.fsum(sq_sums)
    mean = total / samples
    if samples > 1:
        var = max(0.0, (total_sq - samples * mean * mean) / (samples - 1))
        std_error = math.sqrt(var / samples)
    else:
        std_error = 0.0
    return MCEstimate(mean, std_error, samples, seed)
