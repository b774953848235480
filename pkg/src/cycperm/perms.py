"""Permutations, standardization, window statistics, and weight schemes.

Conventions used throughout the package:

- A permutation is a tuple of ints in one-line notation whose entries are
  exactly {1, ..., n}.
- A *pattern* is a short permutation describing the relative order of the
  entries inside a window.  Patterns serialize as words over the alphabet
  ``1``-``9`` followed by ``a``-``k`` (``"132"`` is (1, 3, 2), ``"a"`` is
  the value 10), which keeps windows up to length 20 addressable.
- Standardization maps a real vector to the permutation with the same
  pairwise order; ties are broken by position, the earlier index taking
  the smaller rank.
- Weight tables are indexed by the Lehmer code of the pattern, i.e. the
  rank of the pattern in the lexicographic order of its symmetric group.
"""

from __future__ import annotations

import itertools
import json
import math
from hashlib import sha256
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import EmptyPoint, InvalidPattern, TooShort

Permutation = tuple[int, ...]

_WORD_ALPHABET = "123456789abcdefghijk"
_WORD_VALUE = {c: i + 1 for i, c in enumerate(_WORD_ALPHABET)}

_FACTORIALS = [math.factorial(k) for k in range(21)]

# Dense weight tables are materialized up to this window length; longer
# windows keep dict lookups only and lose the vectorized enumeration path.
DENSE_WINDOW_MAX = 9


def is_permutation(entries: Sequence[int]) -> bool:
    """True if entries is a permutation of {1, .., n} in one-line notation.

    >>> is_permutation((2, 3, 1)), is_permutation((1, 1, 2)), is_permutation(())
    (True, False, False)
    """
    n = len(entries)
    if n == 0:
        return False
    mask = 0
    for x in entries:
        if not isinstance(x, (int, np.integer)) or not 1 <= x <= n:
            return False
        mask |= 1 << (x - 1)
    return mask == (1 << n) - 1


def as_permutation(entries: Iterable[int]) -> Permutation:
    """Validate and return entries as a permutation tuple."""
    pi = tuple(int(x) for x in entries)
    if not is_permutation(pi):
        raise InvalidPattern(f"not a permutation of 1..n: {entries!r}")
    return pi


def pattern_to_word(pattern: Sequence[int]) -> str:
    """Serialize a pattern as a word, e.g. (1, 3, 2) -> "132"."""
    if len(pattern) > len(_WORD_ALPHABET):
        raise InvalidPattern(f"patterns longer than 20 are not addressable: {pattern!r}")
    return "".join(_WORD_ALPHABET[x - 1] for x in pattern)


def word_to_pattern(word: str) -> Permutation:
    """Parse a pattern word, e.g. "132" -> (1, 3, 2).

    >>> word_to_pattern("321")
    (3, 2, 1)
    """
    try:
        entries = tuple(_WORD_VALUE[c] for c in word.strip().lower())
    except KeyError as exc:
        raise InvalidPattern(f"bad character in pattern word {word!r}") from exc
    if not is_permutation(entries):
        raise InvalidPattern(f"pattern word is not a permutation: {word!r}")
    return entries


def standardize(point: Sequence[float]) -> Permutation:
    """The permutation with the same pairwise order as the given vector.

    Ties are broken by position: the earlier index receives the smaller
    rank.

    >>> standardize((0.3, 0.9, 0.2))
    (2, 3, 1)
    >>> standardize((0.5, 0.2, 0.5))
    (2, 1, 3)
    """
    k = len(point)
    if k == 0:
        raise EmptyPoint("cannot standardize an empty point")
    for x in point:
        if not math.isfinite(x):
            raise InvalidPattern(f"non-finite coordinate in point: {point!r}")
    order = sorted(range(k), key=lambda i: (point[i], i))
    ranks = [0] * k
    for r, i in enumerate(order):
        ranks[i] = r + 1
    return tuple(ranks)


def lehmer_index(window: Sequence[float]) -> int:
    """Rank of standardize(window) in the lexicographic order of S_k.

    Only strict pairwise comparisons enter, so ties fall out exactly as in
    :func:`standardize` (earlier index smaller).

    >>> [lehmer_index(p) for p in itertools.permutations((1, 2, 3))]
    [0, 1, 2, 3, 4, 5]
    """
    k = len(window)
    idx = 0
    for i in range(k - 1):
        less = 0
        for j in range(i + 1, k):
            if window[j] < window[i]:
                less += 1
        idx += less * _FACTORIALS[k - 1 - i]
    return idx


def pattern_from_index(index: int, length: int) -> Permutation:
    """Inverse of :func:`lehmer_index` on patterns of the given length."""
    if not 0 <= index < _FACTORIALS[length]:
        raise InvalidPattern(f"index {index} out of range for length {length}")
    available = list(range(1, length + 1))
    out = []
    for i in range(length):
        f = _FACTORIALS[length - 1 - i]
        q, index = divmod(index, f)
        out.append(available.pop(q))
    return tuple(out)


def pattern_indices(cols: Sequence[np.ndarray]) -> np.ndarray:
    """Vectorized :func:`lehmer_index` over parallel window columns.

    cols[j] holds the j-th window coordinate for every sample; arrays
    broadcast against each other.  Ties resolve to the earlier column, as
    in scalar standardization.
    """
    w = len(cols)
    shape = np.broadcast_shapes(*(np.shape(c) for c in cols))
    idx = np.zeros(shape, dtype=np.int64)
    less = np.empty(shape, dtype=np.int64)
    for i in range(w - 1):
        less[...] = 0
        for j in range(i + 1, w):
            less += cols[j] < cols[i]
        idx += less * _FACTORIALS[w - 1 - i]
    return idx


def rotate(pi: Sequence[int], r: int) -> Permutation:
    """Cyclic left rotation by r positions: (pi_{r+1}, .., pi_n, pi_1, .., pi_r)."""
    pi = as_permutation(pi)
    n = len(pi)
    r %= n
    return pi[r:] + pi[:r]


def complement(pi: Sequence[int]) -> Permutation:
    """Replace every entry x by n + 1 - x, flipping all pairwise orders."""
    pi = as_permutation(pi)
    n = len(pi)
    return tuple(n + 1 - x for x in pi)


def cyclic_windows(pi: Sequence[int], window: int) -> list[Permutation]:
    """Standardized windows of the given length read cyclically.

    Returns the n windows starting at every position, indices wrapping
    modulo n.  Permutations shorter than the window raise TooShort; a
    window that wraps far enough to repeat an entry would need the
    tie-break rule to mean anything, and no counting identity here is
    stated for that regime.

    >>> cyclic_windows((3, 2, 1), 3)
    [(3, 2, 1), (2, 1, 3), (1, 3, 2)]
    >>> cyclic_windows((1, 2, 3, 4), 3)
    [(1, 2, 3), (1, 2, 3), (2, 3, 1), (3, 1, 2)]
    """
    pi = as_permutation(pi)
    n = len(pi)
    if window < 2:
        raise InvalidPattern(f"window must be at least 2, got {window}")
    if n < window:
        raise TooShort(f"need length >= {window}, got {n}")
    return [
        standardize(tuple(pi[(s + j) % n] for j in range(window)))
        for s in range(n)
    ]


def double_descents(pi: Sequence[int], cyclic: bool = False) -> int:
    """Number of indices i with pi_i > pi_{i+1} > pi_{i+2}.

    Linear mode scans i = 1 .. n-2; cyclic mode scans all n starting
    positions with indices modulo n.

    >>> double_descents((5, 4, 3, 2, 1)), double_descents((5, 1, 4, 3, 2))
    (3, 1)
    """
    pi = as_permutation(pi)
    n = len(pi)
    if n < 3:
        raise TooShort(f"need length >= 3, got {n}")
    starts = range(n) if cyclic else range(n - 2)
    return sum(
        1
        for s in starts
        if pi[s % n] > pi[(s + 1) % n] > pi[(s + 2) % n]
    )


def _weights_as_index_map(
    window: int, weights: Mapping | None, kind: str
) -> dict[int, float]:
    """Normalize a {pattern: weight} mapping to {lehmer index: float}."""
    out: dict[int, float] = {}
    if weights is None:
        return out
    for key, value in weights.items():
        pattern = word_to_pattern(key) if isinstance(key, str) else as_permutation(key)
        if len(pattern) != window:
            raise InvalidPattern(
                f"{kind} pattern {pattern_to_word(pattern)!r} has length "
                f"{len(pattern)}, expected {window}"
            )
        value = float(value)
        if not math.isfinite(value):
            raise InvalidPattern(f"non-finite weight for {key!r}")
        out[lehmer_index(pattern)] = value
    return out


class WeightScheme:
    """Window weights for consecutive-pattern counting.

    ``window`` is the window length m+1.  ``wt`` assigns a real weight to
    every pattern of that length; the boundary weights ``wt1`` and ``wt2``
    (used only by linear products) cover patterns of length m and default
    to the constant 1.  Patterns not listed explicitly take the
    corresponding ``default``.  Forbidden pattern sets are the special
    case of 0/1 weights, see :meth:`from_forbidden_set`.
    """

    def __init__(
        self,
        window: int,
        wt: Mapping | None = None,
        default: float = 1.0,
        wt1: Mapping | None = None,
        default1: float = 1.0,
        wt2: Mapping | None = None,
        default2: float = 1.0,
    ):
        if window < 2:
            raise InvalidPattern(f"window must be at least 2, got {window}")
        if window > len(_WORD_ALPHABET):
            raise InvalidPattern(f"window {window} exceeds the addressable maximum 20")
        self.window = int(window)
        self._default = float(default)
        self._default1 = float(default1)
        self._default2 = float(default2)
        for d in (self._default, self._default1, self._default2):
            if not math.isfinite(d):
                raise InvalidPattern("non-finite default weight")
        self._wt = _weights_as_index_map(window, wt, "wt")
        self._wt1 = _weights_as_index_map(window - 1, wt1, "wt1")
        self._wt2 = _weights_as_index_map(window - 1, wt2, "wt2")
        # drop overrides equal to the default so equal schemes digest equally
        self._wt = {i: v for i, v in self._wt.items() if v != self._default}
        self._wt1 = {i: v for i, v in self._wt1.items() if v != self._default1}
        self._wt2 = {i: v for i, v in self._wt2.items() if v != self._default2}
        self._tables: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None
        self._digest: str | None = None

    @classmethod
    def from_forbidden_set(
        cls, patterns: Iterable, window: int | None = None
    ) -> "WeightScheme":
        """0/1 scheme: weight 0 on the given patterns, 1 elsewhere.

        All patterns must share one length, which becomes the window; pass
        ``window`` explicitly when the set is empty.
        """
        parsed = [
            word_to_pattern(p) if isinstance(p, str) else as_permutation(p)
            for p in patterns
        ]
        lengths = {len(p) for p in parsed}
        if len(lengths) > 1:
            raise InvalidPattern(f"forbidden patterns have mixed lengths {sorted(lengths)}")
        if lengths:
            inferred = lengths.pop()
            if window is not None and window != inferred:
                raise InvalidPattern(
                    f"window {window} does not match pattern length {inferred}"
                )
            window = inferred
        elif window is None:
            raise InvalidPattern("empty forbidden set needs an explicit window")
        return cls(window, wt={p: 0.0 for p in parsed})

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "WeightScheme":
        """Build a scheme from the JSON file format used by the CLI.

        Expected keys: "window" (int, required), "wt" ({word: weight}),
        "default", "wt1", "default1", "wt2", "default2".
        """
        if "window" not in data:
            raise InvalidPattern('weight file must carry a "window" key')
        known = {"window", "wt", "default", "wt1", "default1", "wt2", "default2"}
        extra = set(data) - known
        if extra:
            raise InvalidPattern(f"unknown weight file keys: {sorted(extra)}")
        return cls(
            int(data["window"]),
            wt=data.get("wt"),
            default=data.get("default", 1.0),
            wt1=data.get("wt1"),
            default1=data.get("default1", 1.0),
            wt2=data.get("wt2"),
            default2=data.get("default2", 1.0),
        )

    def to_json_dict(self) -> dict:
        """Canonical JSON-serializable form (sparse overrides plus defaults)."""
        def words(overrides: dict[int, float], length: int) -> dict[str, float]:
            return {
                pattern_to_word(pattern_from_index(i, length)): v
                for i, v in sorted(overrides.items())
            }

        m = self.window - 1
        out: dict = {"window": self.window, "default": self._default}
        out["wt"] = words(self._wt, self.window)
        if self._wt1 or self._default1 != 1.0:
            out["wt1"] = words(self._wt1, m)
            out["default1"] = self._default1
        if self._wt2 or self._default2 != 1.0:
            out["wt2"] = words(self._wt2, m)
            out["default2"] = self._default2
        return out

    @property
    def m(self) -> int:
        """Arity of the transfer operator: window length minus one."""
        return self.window - 1

    @property
    def digest(self) -> str:
        """Short content hash identifying the scheme in reports."""
        if self._digest is None:
            blob = json.dumps(self.to_json_dict(), sort_keys=True)
            self._digest = sha256(blob.encode()).hexdigest()[:12]
        return self._digest

    def _all_weights(self) -> list[float]:
        return [
            self._default, self._default1, self._default2,
            *self._wt.values(), *self._wt1.values(), *self._wt2.values(),
        ]

    @property
    def is_integer(self) -> bool:
        """True if every weight is an integer, so totals are exact ints."""
        return all(v == int(v) for v in self._all_weights())

    @property
    def is_nonnegative(self) -> bool:
        return all(v >= 0 for v in self._all_weights())

    @property
    def is_zero_one(self) -> bool:
        return all(v in (0.0, 1.0) for v in self._all_weights())

    @property
    def has_dense_tables(self) -> bool:
        return self.window <= DENSE_WINDOW_MAX

    def _dense(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if not self.has_dense_tables:
            raise InvalidPattern(
                f"window {self.window} too large for dense tables "
                f"(max {DENSE_WINDOW_MAX})"
            )
        if self._tables is None:
            def table(overrides, length, default):
                t = np.full(_FACTORIALS[length], default, dtype=np.float64)
                for i, v in overrides.items():
                    t[i] = v
                return t

            self._tables = (
                table(self._wt, self.window, self._default),
                table(self._wt1, self.window - 1, self._default1),
                table(self._wt2, self.window - 1, self._default2),
            )
        return self._tables

    def wt_table(self) -> np.ndarray:
        """Dense wt weights indexed by Lehmer code (lexicographic rank)."""
        return self._dense()[0]

    def wt1_table(self) -> np.ndarray:
        return self._dense()[1]

    def wt2_table(self) -> np.ndarray:
        return self._dense()[2]

    def weight(self, window: Sequence[float]) -> float:
        """wt of the standardization of a full-length window."""
        if len(window) != self.window:
            raise InvalidPattern(
                f"expected window of length {self.window}, got {len(window)}"
            )
        return self._wt.get(lehmer_index(window), self._default)

    def weight1(self, window: Sequence[float]) -> float:
        """Initial boundary weight of an (m)-length window."""
        if len(window) != self.window - 1:
            raise InvalidPattern(
                f"expected window of length {self.window - 1}, got {len(window)}"
            )
        return self._wt1.get(lehmer_index(window), self._default1)

    def weight2(self, window: Sequence[float]) -> float:
        """Final boundary weight of an (m)-length window."""
        if len(window) != self.window - 1:
            raise InvalidPattern(
                f"expected window of length {self.window - 1}, got {len(window)}"
            )
        return self._wt2.get(lehmer_index(window), self._default2)

    def __repr__(self) -> str:
        return f"WeightScheme(window={self.window}, digest={self.digest!r})"


def double_descent_scheme() -> WeightScheme:
    """Weights doubling each descending triple and killing ascending ones.

    The cyclic weight of pi under this scheme is 2**(number of cyclic
    double descents) when pi has no cyclic double ascent, and 0 otherwise.
    """
    return WeightScheme(3, wt={"321": 2.0, "123": 0.0})


def linear_weight(pi: Sequence[int], scheme: WeightScheme) -> float:
    """Product of window weights over all linear windows, with boundaries.

    Multiplies wt1 of the first m entries, wt of every consecutive window
    of length m+1, and wt2 of the last m entries.  For n = m there are no
    full windows and the middle product is empty.
    """
    pi = as_permutation(pi)
    n, m = len(pi), scheme.m
    if n < m:
        raise TooShort(f"need length >= {m}, got {n}")
    total = scheme.weight1(pi[:m]) * scheme.weight2(pi[n - m:])
    for s in range(n - m):
        total *= scheme.weight(pi[s:s + m + 1])
    return total


def cyclic_weight(pi: Sequence[int], scheme: WeightScheme) -> float:
    """Product of wt over all n cyclic windows; rotation invariant."""
    pi = as_permutation(pi)
    n, m = len(pi), scheme.m
    if n < m + 1:
        raise TooShort(f"need length >= {m + 1}, got {n}")
    total = 1.0
    for s in range(n):
        total *= scheme.weight(tuple(pi[(s + j) % n] for j in range(m + 1)))
    return total
