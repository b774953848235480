"""Analytic eigenvalue series with proven truncation tails.

Two series are evaluated: the cyclic count of 123-avoiders as n! times
the n-th power sum of the explicit eigenvalue family sqrt(3)/(2*pi*(k +
1/3)), and the alternating-permutation count as the classical odd-
reciprocal series.  Truncation points come from integral-comparison
tail bounds, so a result whose tail_bound is below 1/2 rounds to the
exact integer it approximates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import OutOfDomain

# Symmetric truncation never goes past this many index pairs; the n = 2
# cyclic series has a quadratic tail and is the only consumer that hits
# the cap (tail near 1.5e-7 there, still far below rounding relevance).
K_MAX = 10 ** 6

_C123 = math.sqrt(3.0) / (2.0 * math.pi)


@dataclass(frozen=True)
class SeriesValue:
    """Partial series sum plus an upper bound on the discarded tail."""

    n: int
    value: float
    terms_used: int
    tail_bound: float

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "value": self.value,
            "terms_used": self.terms_used,
            "tail_bound": self.tail_bound,
        }


def eigenvalue_123(k: int) -> float:
    """The k-th eigenvalue sqrt(3)/(2*pi*(k + 1/3)) of the 123 operator.

    k ranges over all integers; k = 0 gives the leading eigenvalue
    3*sqrt(3)/(2*pi) ~ 0.826993 and the moduli decay like 1/|k|.
    """
    return _C123 / (k + 1.0 / 3.0)


def eigenvalues_123(k_min: int, k_max: int) -> list[float]:
    """eigenvalue_123 over the inclusive integer interval [k_min, k_max]."""
    if k_min > k_max:
        raise OutOfDomain(f"empty interval [{k_min}, {k_max}]")
    return [eigenvalue_123(k) for k in range(k_min, k_max + 1)]


def eigenvalues_123_by_modulus(count: int) -> list[float]:
    """The eigenvalues of the 123 operator in decreasing modulus.

    Interleaves k = 0, -1, 1, -2, 2, ... which is the strict modulus
    order of the family.
    """
    ks = []
    k = 0
    while len(ks) < count:
        ks.append(k)
        k = -k - 1 if k >= 0 else -k
    return [eigenvalue_123(k) for k in ks[:count]]


def _pair_count_123(n: int, tol: float) -> int:
    """Smallest K with the 123 tail bound below tol, capped at K_MAX.

    Tail of the n-th power sum beyond the pairs (0,-1), ..., (K-1,-K):
    n! * 2 * c^n * (K - 2/3)^(1-n) / (n-1) by integral comparison.
    """
    need = 2.0 * math.factorial(n) * _C123 ** n / (tol * (n - 1))
    k = math.ceil(2.0 / 3.0 + need ** (1.0 / (n - 1)))
    return min(max(k, 1), K_MAX)


def _tail_123(n: int, k: int) -> float:
    return (
        2.0 * math.factorial(n) * _C123 ** n
        * (k - 2.0 / 3.0) ** (1 - n) / (n - 1)
    )


def series_beta_123(n: int, tol: float) -> SeriesValue:
    """Cyclic 123-avoider count of S_n as an eigenvalue power series.

    Evaluates n! * sum over all integers k of eigenvalue_123(k)**n,
    truncated symmetrically in pairs (k, -k-1) of decreasing modulus.
    For n >= 3 and tol below 1/2 the result rounds to the exact count;
    n = 2 converges quadratically and is the reason for the K_MAX cap.
    """
    if n < 2:
        raise OutOfDomain(f"series needs n >= 2, got {n}")
    if tol <= 0:
        raise OutOfDomain(f"tolerance must be positive, got {tol}")
    k_pairs = _pair_count_123(n, tol)
    terms = (
        eigenvalue_123(k if half == 0 else -k - 1) ** n
        for k in range(k_pairs)
        for half in (0, 1)
    )
    value = math.factorial(n) * math.fsum(terms)
    return SeriesValue(n, value, 2 * k_pairs, _tail_123(n, k_pairs))


def euler_series(n: int, tol: float) -> SeriesValue:
    """Alternating-permutation count of S_n by the odd-reciprocal series.

    Evaluates n! * 2 * (2/pi)^(n+1) * sum over all integers k of
    (4k+1)^-(n+1), truncated in pairs (k, -k-1) with an integral tail
    bound scaled by the same prefactor.
    """
    if n < 1:
        raise OutOfDomain(f"series needs n >= 1, got {n}")
    if tol <= 0:
        raise OutOfDomain(f"tolerance must be positive, got {tol}")
    prefactor = math.factorial(n) * 2.0 * (2.0 / math.pi) ** (n + 1)
    # tail beyond K pairs: prefactor * (4K-3)^(-n) / (2n)
    need = prefactor / (2.0 * n * tol)
    k_pairs = min(max(math.ceil((need ** (1.0 / n) + 3.0) / 4.0), 1), K_MAX)
    terms = (
        (4.0 * (k if half == 0 else -k - 1) + 1.0) ** (-(n + 1))
        for k in range(k_pairs)
        for half in (0, 1)
    )
    value = prefactor * math.fsum(terms)
    tail = prefactor * (4.0 * k_pairs - 3.0) ** (-n) / (2.0 * n)
    return SeriesValue(n, value, 2 * k_pairs, tail)
