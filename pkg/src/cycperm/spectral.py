"""Nystrom discretization of the window-weight transfer operator.

The operator acts on functions of m variables by averaging a new first
coordinate against the window weight: T(f)(x_1..x_m) is the integral
over t of wt(standardize(t, x_1..x_m)) * f(t, x_1..x_{m-1}).  The
midpoint rule on an N-cell grid per axis turns this into an N^m by N^m
matrix whose spectrum, traces of powers, and boundary inner products
reproduce the exact linear and cyclic counts as N grows.

Grid states are m-tuples of cell indices packed into one integer with
the last coordinate varying fastest; cell i covers midpoint (i+1/2)/N.
Standardization is evaluated on the integer cell tuples, which orders
midpoints identically; coordinates falling in the same cell are ranked
by their window position on even cells and in reverse on odd cells.
A fixed tie direction would bias every collision the same way, an O(1/N)
error that overwhelms the discretization itself (leading 123 eigenvalue
off by 8e-3 at N=64); averaging over tie orders removes that bias but
resolves the shared coordinates of overlapping windows inconsistently,
which still costs O(n/N) in traces of powers.  Alternating the direction
with the cell parity keeps every window of a power walk consistent while
the bias cancels between neighboring cells, leaving O(1/N^2) behavior
(theorem-scheme traces drop from 2.7e-2 to 1.7e-3 at N=64).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    EigenFailure,
    OutOfDomain,
    RequiresNonnegative,
    ResolutionTooHigh,
    TooShort,
)
from .perms import WeightScheme, pattern_indices

# Default ceiling on N^m; a dense float64 matrix at the cap is 3.2 GB.
STATE_CAP_DEFAULT = 20000


@dataclass(frozen=True)
class GridFunction:
    """Real function sampled at the N^m grid cell midpoints."""

    resolution: int
    arity: int
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.resolution ** self.arity,):
            raise OutOfDomain(
                f"grid function needs {self.resolution ** self.arity} values, "
                f"got {self.values.shape}"
            )


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense midpoint-rule discretization of the transfer operator.

    entries[row, col] is nonzero only for col = t * N^(m-1) + row // N,
    one column per grid value of the new coordinate t, and then equals
    wt of the window (t, x_1..x_m) under the parity tie rule, divided
    by N, for the row's state (x_1..x_m).
    """

    resolution: int
    arity: int
    entries: np.ndarray
    scheme_digest: str

    @property
    def dim(self) -> int:
        return self.resolution ** self.arity


@dataclass(frozen=True)
class SpectrumResult:
    """Eigenvalues in decreasing modulus order."""

    eigenvalues: np.ndarray
    resolution: int
    scheme_digest: str

    def to_json_dict(self) -> dict:
        return {
            "scheme": self.scheme_digest,
            "N": self.resolution,
            "eigenvalues": [
                [float(z.real), float(z.imag)] for z in self.eigenvalues
            ],
        }


def _cell_coordinates(resolution: int, arity: int) -> list[np.ndarray]:
    """Per-axis cell indices of every packed state, last axis fastest."""
    states = np.arange(resolution ** arity)
    return [
        (states // resolution ** (arity - 1 - j)) % resolution
        for j in range(arity)
    ]


def _parity_keys(cells: list) -> list[np.ndarray]:
    """Sort keys realizing the parity tie rule on cell index tuples.

    Distinct cells compare by cell; equal cells compare by window slot,
    ascending on even cells and descending on odd ones.  Applying the
    same rule to every window evaluation (kernel and boundary functions
    alike) keeps the resolution of a shared coordinate pair identical in
    every window that sees it.
    """
    width = len(cells)
    return [
        c * width + np.where(c % 2 == 0, slot, width - 1 - slot)
        for slot, c in enumerate(cells)
    ]


def _grid_pattern_indices(cells: list) -> np.ndarray:
    """pattern_indices of cell tuples under the parity tie rule."""
    return pattern_indices(_parity_keys(cells))


def kappa_grid(w: WeightScheme, resolution: int) -> GridFunction:
    """Initial boundary weight wt1 sampled on the m-dimensional grid."""
    cells = _cell_coordinates(resolution, w.m)
    values = w.wt1_table()[_grid_pattern_indices(cells)]
    return GridFunction(resolution, w.m, values)


def mu_grid(w: WeightScheme, resolution: int) -> GridFunction:
    """Final boundary weight wt2 sampled on the m-dimensional grid."""
    cells = _cell_coordinates(resolution, w.m)
    values = w.wt2_table()[_grid_pattern_indices(cells)]
    return GridFunction(resolution, w.m, values)


def assemble_operator(
    w: WeightScheme,
    resolution: int,
    state_cap: int = STATE_CAP_DEFAULT,
) -> OperatorMatrix:
    """Midpoint-rule matrix of the transfer operator for a weight scheme.

    Row (x_1..x_m), column (t, x_1..x_{m-1}): the only nonzero columns
    of a row share its leading m-1 coordinates, so each row has at most
    N nonzero entries, each a window weight divided by N.
    """
    m = w.m
    if resolution < 2:
        raise OutOfDomain(f"need resolution >= 2, got {resolution}")
    dim = resolution ** m
    if dim > state_cap:
        raise ResolutionTooHigh(
            f"{resolution}^{m} = {dim} grid states exceed the cap {state_cap}"
        )
    cells = _cell_coordinates(resolution, m)
    t = np.arange(resolution)
    window_cols = [t[np.newaxis, :]] + [c[:, np.newaxis] for c in cells]
    weights = w.wt_table()[_grid_pattern_indices(window_cols)] / resolution
    rows = np.arange(dim)
    col_index = t[np.newaxis, :] * resolution ** (m - 1) + (rows // resolution)[:, np.newaxis]
    entries = np.zeros((dim, dim))
    entries[rows[:, np.newaxis], col_index] = weights
    return OperatorMatrix(resolution, m, entries, w.digest)


def top_eigenvalue(
    M: OperatorMatrix, tol: float, max_iterations: int = 10000
) -> float:
    """Largest eigenvalue of a nonnegative operator by power iteration.

    Nonnegativity makes the dominant eigenvalue real and reachable from
    a positive start vector.  Schemes with negative weights must go
    through full_spectrum instead.
    """
    if tol <= 0:
        raise OutOfDomain(f"tolerance must be positive, got {tol}")
    if np.any(M.entries < 0):
        raise RequiresNonnegative(
            "power iteration needs nonnegative weights; use full_spectrum"
        )
    v = np.full(M.dim, 1.0 / math.sqrt(M.dim))
    estimate = None
    for _ in range(max_iterations):
        image = M.entries @ v
        norm = float(np.linalg.norm(image))
        if norm == 0.0:
            return 0.0
        previous, estimate = estimate, norm
        v = image / norm
        if previous is not None and abs(estimate - previous) <= tol * estimate:
            return estimate
    raise EigenFailure(
        f"power iteration did not reach relative tolerance {tol} in "
        f"{max_iterations} iterations (last estimate {estimate})"
    )


def full_spectrum(M: OperatorMatrix, top_k: int | None = None) -> SpectrumResult:
    """All eigenvalues (or the top_k by modulus) of the operator matrix.

    Uses the dense nonsymmetric QR algorithm; ties in modulus order are
    broken by decreasing real then decreasing imaginary part so output
    order is reproducible.
    """
    if top_k is None:
        top_k = M.dim
    if not 1 <= top_k <= M.dim:
        raise OutOfDomain(f"top_k must be in 1..{M.dim}, got {top_k}")
    try:
        eigenvalues = np.linalg.eigvals(M.entries)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(f"QR eigensolver failed: {exc}") from exc
    order = np.lexsort((-eigenvalues.imag, -eigenvalues.real, -np.abs(eigenvalues)))
    return SpectrumResult(eigenvalues[order][:top_k], M.resolution, M.scheme_digest)


def trace_powers(M: OperatorMatrix, powers) -> dict[int, float]:
    """Traces of M^n for every n in powers, by incremental multiplication."""
    wanted = sorted(set(int(n) for n in powers))
    if not wanted:
        return {}
    if wanted[0] < M.arity + 1:
        raise TooShort(
            f"traces start at n = {M.arity + 1}, requested {wanted[0]}"
        )
    out: dict[int, float] = {}
    product = M.entries
    for power in range(1, wanted[-1] + 1):
        if power > 1:
            product = product @ M.entries
        if power in wanted:
            out[power] = float(np.trace(product))
    return out


def trace_power(M: OperatorMatrix, n: int) -> float:
    """Trace of the n-th matrix power; n! times it approximates the
    cyclic weight sum over S_n."""
    return trace_powers(M, [n])[n]


def alpha_spectral(
    w: WeightScheme,
    resolution: int,
    n: int,
    state_cap: int = STATE_CAP_DEFAULT,
) -> float:
    """Linear weight sum over S_n divided by n!, via the operator route.

    Applies the operator n-m times to the initial boundary function and
    pairs with the final one; the pairing is the grid average, matching
    the uniform-measure inner product.
    """
    m = w.m
    if n < m:
        raise TooShort(f"need n >= {m}, got {n}")
    M = assemble_operator(w, resolution, state_cap)
    f = kappa_grid(w, resolution).values
    for _ in range(n - m):
        f = M.entries @ f
    return float(np.mean(f * mu_grid(w, resolution).values))


def solve_213_spectrum(tol: float) -> float:
    """Positive eigenvalue of the 213 operator from its error-function law.

    The eigenvalue condition is erf(1/(sqrt(2) lambda)) = sqrt(2/pi);
    erf increases from 0 to 1 on (0, inf) and sqrt(2/pi) ~ 0.7979 lies
    inside, so bisection on u = 1/(sqrt(2) lambda) brackets the unique
    root.  Returns lambda to absolute tolerance tol.
    """
    if tol <= 0:
        raise OutOfDomain(f"tolerance must be positive, got {tol}")
    target = math.sqrt(2.0 / math.pi)

    def to_lambda(u: float) -> float:
        return 1.0 / (math.sqrt(2.0) * u)

    lo, hi = 0.1, 3.0
    assert math.erf(lo) < target < math.erf(hi)
    while to_lambda(lo) - to_lambda(hi) > tol:
        mid = 0.5 * (lo + hi)
        if math.erf(mid) < target:
            lo = mid
        else:
            hi = mid
    return to_lambda(0.5 * (lo + hi))
