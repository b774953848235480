"""Cross-check battery tying the exact, spectral, and series routes together.

Each check recomputes a quantity along two or more independent routes
(exhaustive enumeration, operator traces, eigenvalue series, root
solving) and compares at a stated tolerance.  The battery is what the
command-line `verify` subcommand runs and what the acceptance test
suite asserts, so the checks print enough detail to diagnose a failure
without rerunning by hand.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .enumeration import (
    alpha_bruteforce,
    alternating_count,
    anchored_double_descent_permutations,
    anchored_double_descent_sum,
    beta_bruteforce,
    beta_montecarlo,
    weighted_cyclic_123_sum,
)
from .perms import (
    WeightScheme,
    complement,
    cyclic_weight,
    cyclic_windows,
    double_descent_scheme,
    double_descents,
    linear_weight,
    rotate,
    standardize,
)
from .series import (
    euler_series,
    eigenvalue_123,
    eigenvalues_123_by_modulus,
    series_beta_123,
)
from .spectral import (
    alpha_spectral,
    assemble_operator,
    full_spectrum,
    solve_213_spectrum,
    top_eigenvalue,
    trace_powers,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def to_json_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@lru_cache(maxsize=None)
def _scheme_123() -> WeightScheme:
    return WeightScheme.from_forbidden_set(["123"])


@lru_cache(maxsize=None)
def _beta_123(n: int) -> int:
    return int(beta_bruteforce(n, _scheme_123()).value)


def check_series_matches_exact_123() -> CheckResult:
    """Eigenvalue power series reproduces the exact cyclic 123 counts."""
    worst = 0.0
    for n in range(3, 11):
        got = series_beta_123(n, 1e-6)
        exact = _beta_123(n)
        residual = abs(got.value - exact)
        worst = max(worst, residual)
        if round(got.value) != exact or residual > 1e-6:
            return CheckResult(
                "series-vs-exact-123",
                False,
                f"n={n}: series {got.value!r} vs exact {exact}, residual {residual:.2e}",
            )
    return CheckResult(
        "series-vs-exact-123",
        True,
        f"n=3..10 all round to the exact counts, worst residual {worst:.2e}",
    )


def check_series_123_n2() -> CheckResult:
    """The quadratically converging n=2 series sums to 2."""
    got = series_beta_123(2, 1e-9)
    err = abs(got.value - 2.0)
    return CheckResult(
        "series-123-n2-closed-form",
        err <= 1e-6,
        f"value {got.value:.9f} (error {err:.2e}, {got.terms_used} terms, "
        f"tail bound {got.tail_bound:.2e})",
    )


def check_doubling_identity() -> CheckResult:
    """Sum of 2^(cyclic double descents) over cyclic 123-avoiders is n!."""
    for n in range(3, 11):
        got = weighted_cyclic_123_sum(n)
        if got != math.factorial(n):
            return CheckResult(
                "cyclic-doubling-identity",
                False,
                f"n={n}: got {got}, expected {math.factorial(n)}",
            )
    return CheckResult(
        "cyclic-doubling-identity", True, "equals n! exactly for n=3..10"
    )


_WITNESS_5 = {
    (5, 1, 4, 3, 2),
    (5, 2, 1, 4, 3),
    (5, 2, 4, 3, 1),
    (5, 3, 1, 4, 2),
    (5, 3, 2, 4, 1),
    (5, 3, 4, 2, 1),
    (5, 4, 1, 3, 2),
    (5, 4, 2, 3, 1),
    (5, 4, 3, 2, 1),
}


def check_anchored_count() -> CheckResult:
    """Anchored no-double-ascent sums equal (n-1)!, witness set at n=5."""
    for n in range(3, 11):
        got = anchored_double_descent_sum(n)
        if got != math.factorial(n - 1):
            return CheckResult(
                "anchored-double-descent-count",
                False,
                f"n={n}: got {got}, expected {math.factorial(n - 1)}",
            )
    qualifying = set(anchored_double_descent_permutations(5))
    if qualifying != _WITNESS_5:
        return CheckResult(
            "anchored-double-descent-count",
            False,
            f"n=5 qualifying set mismatch: {sorted(qualifying)}",
        )
    weight_sum = sum(2 ** double_descents(p) for p in qualifying)
    return CheckResult(
        "anchored-double-descent-count",
        weight_sum == 24,
        f"(n-1)! for n=3..10; n=5 set is the expected 9 permutations, "
        f"weight sum {weight_sum}",
    )


def _trace_schemes() -> list[tuple[str, WeightScheme]]:
    return [
        ("123", _scheme_123()),
        ("213", WeightScheme.from_forbidden_set(["213"])),
        ("321", WeightScheme.from_forbidden_set(["321"])),
        ("doubling", double_descent_scheme()),
    ]


def check_trace_route() -> CheckResult:
    """n! tr(M^n) tracks the exact cyclic sums and improves with N."""
    details = []
    for label, scheme in _trace_schemes():
        exact = {n: float(beta_bruteforce(n, scheme).value) for n in range(4, 8)}
        errors = {}
        for resolution in (16, 32, 64):
            tr = trace_powers(assemble_operator(scheme, resolution), range(4, 8))
            errors[resolution] = {
                n: abs(math.factorial(n) * tr[n] - exact[n]) / max(1.0, exact[n])
                for n in range(4, 8)
            }
        worst = max(errors[64].values())
        monotone = all(
            errors[16][n] >= 0.9 * errors[32][n]
            and errors[32][n] >= 0.9 * errors[64][n]
            for n in range(4, 8)
        )
        details.append(f"{label}: worst@64 {worst:.2e} monotone {monotone}")
        if worst > 2e-2 or not monotone:
            return CheckResult("trace-route-vs-exact", False, "; ".join(details))
    return CheckResult("trace-route-vs-exact", True, "; ".join(details))


def check_eigenvalue_agreement() -> CheckResult:
    """Discrete spectra match the closed-form eigenvalues at N=64."""
    spectrum = full_spectrum(assemble_operator(_scheme_123(), 64), 4)
    formula = eigenvalues_123_by_modulus(4)
    diffs = [abs(z - f) for z, f in zip(spectrum.eigenvalues, formula)]
    leading = full_spectrum(assemble_operator(double_descent_scheme(), 64), 1)
    d_lead = abs(leading.eigenvalues[0] - 1.0)
    ok = all(d <= 5e-3 for d in diffs) and d_lead <= 5e-3
    return CheckResult(
        "eigenvalue-formula-agreement",
        ok,
        f"123 top-4 diffs {['%.1e' % d for d in diffs]}; "
        f"doubling leading off 1 by {d_lead:.1e}",
    )


def check_213_three_routes() -> CheckResult:
    """Root solver, discrete Perron value, and growth ratio agree for 213."""
    scheme = WeightScheme.from_forbidden_set(["213"])
    root = solve_213_spectrum(1e-10)
    residual = abs(math.erf(1.0 / (math.sqrt(2.0) * root)) - math.sqrt(2.0 / math.pi))
    perron = top_eigenvalue(assemble_operator(scheme, 64), 1e-10)
    a10 = alpha_bruteforce(10, scheme).value
    a11 = alpha_bruteforce(11, scheme).value
    ratio = a11 / (11 * a10)
    ok = (
        residual <= 1e-9
        and abs(perron - root) <= 1e-2
        and abs(ratio - root) <= 1e-2
    )
    return CheckResult(
        "spectrum-213-three-routes",
        ok,
        f"root {root:.8f} (residual {residual:.1e}), grid Perron {perron:.6f}, "
        f"growth ratio {ratio:.6f}",
    )


def check_euler_series() -> CheckResult:
    """Series Euler numbers equal alternating counts; doubled, the full sums."""
    pair = WeightScheme.from_forbidden_set(["123", "321"])
    for n in range(1, 10):
        rounded = round(euler_series(n, 1e-6).value)
        count = alternating_count(n)
        if rounded != count:
            return CheckResult(
                "euler-series-vs-count",
                False,
                f"n={n}: series rounds to {rounded}, count {count}",
            )
        if n >= 2:
            total = alpha_bruteforce(n, pair).value
            if total != 2 * rounded:
                return CheckResult(
                    "euler-series-vs-count",
                    False,
                    f"n={n}: monotone-window-free sum {total} != 2*{rounded}",
                )
    return CheckResult(
        "euler-series-vs-count",
        True,
        "series rounds to the counts for n=1..9 and to half the "
        "two-sided sums for n=2..9",
    )


def _property_failures() -> list[str]:
    failures = []
    rng = random.Random(20240917)
    s123 = _scheme_123()
    s321 = WeightScheme.from_forbidden_set(["321"])
    doubling = double_descent_scheme()
    trivial = WeightScheme.from_forbidden_set([], window=3)

    def random_perm(n):
        entries = list(range(1, n + 1))
        rng.shuffle(entries)
        return tuple(entries)

    # standardization: idempotent, invariant under monotone maps
    for _ in range(200):
        pi = random_perm(rng.randint(1, 9))
        if standardize(pi) != pi:
            failures.append(f"standardize not idempotent on {pi}")
        point = sorted(rng.random() for _ in pi)
        rng.shuffle(point)
        monotone = [math.tan(1.4 * x) for x in point]
        if standardize(point) != standardize(monotone):
            failures.append(f"standardize not monotone-invariant on {point}")

    # rotation invariance and complement symmetry of cyclic weights
    for _ in range(200):
        pi = random_perm(rng.randint(3, 9))
        r = rng.randrange(len(pi))
        scheme = rng.choice([s123, s321, doubling])
        if cyclic_weight(rotate(pi, r), scheme) != cyclic_weight(pi, scheme):
            failures.append(f"cyclic weight not rotation invariant: {pi} r={r}")
        if cyclic_weight(complement(pi), s123) != cyclic_weight(pi, s321):
            failures.append(f"complement symmetry fails on {pi}")
        if double_descents(pi, cyclic=True) != cyclic_windows(pi, 3).count((3, 2, 1)):
            failures.append(f"cyclic double descents vs windows mismatch on {pi}")

    # exact enumeration invariants
    for n in range(3, 8):
        if alpha_bruteforce(n, trivial).value != math.factorial(n):
            failures.append(f"trivial alpha at n={n} is not n!")
        if beta_bruteforce(n, trivial).value != math.factorial(n):
            failures.append(f"trivial beta at n={n} is not n!")
        alpha = alpha_bruteforce(n, s123).value
        beta = beta_bruteforce(n, s123).value
        if not 0 <= beta <= alpha <= math.factorial(n):
            failures.append(f"0<=beta<=alpha<=n! fails at n={n}")
    for n in range(3, 10):
        if beta_bruteforce(n, s123).value != beta_bruteforce(n, s321).value:
            failures.append(f"cyclic 123/321 counts differ at n={n}")
    pair = WeightScheme.from_forbidden_set(["123", "321"])
    for n in (3, 5, 7):
        if beta_bruteforce(n, pair).value != 0:
            failures.append(f"odd-length two-sided cyclic count nonzero at n={n}")
    for n in range(2, 10):
        if alternating_count(n) != alternating_count(n, "downup"):
            failures.append(f"alternating conventions differ at n={n}")

    # Monte-Carlo estimator within 5 standard errors of the exact mean
    for n, scheme in ((3, s123), (4, s123), (5, doubling)):
        est = beta_montecarlo(n, scheme, samples=200000, seed=1000 + n)
        exact = float(beta_bruteforce(n, scheme).value) / math.factorial(n)
        if abs(est.mean - exact) > 5 * max(est.std_error, 1e-12):
            failures.append(
                f"MC estimate {est.mean} vs {exact} beyond 5 sigma at n={n}"
            )
    if beta_montecarlo(4, trivial, samples=100, seed=3).mean != 1.0:
        failures.append("MC mean for the weightless scheme is not exactly 1")

    # spectral consistency at modest resolutions
    for scheme in (s123, doubling):
        for resolution in (8, 16):
            M = assemble_operator(scheme, resolution)
            eigenvalues = full_spectrum(M).eigenvalues
            for n in (4, 6):
                tr = trace_powers(M, [n])[n]
                power_sum = float(np.sum(eigenvalues ** n).real)
                if abs(tr - power_sum) > 1e-8 * max(1e-300, abs(tr)):
                    failures.append(
                        f"trace vs eigenvalue power sum at N={resolution}, n={n}"
                    )
            perron = top_eigenvalue(M, 1e-9)
            if abs(perron - abs(eigenvalues[0])) > 1e-6:
                failures.append(f"Perron value vs spectrum at N={resolution}")
    M = assemble_operator(WeightScheme.from_forbidden_set([], window=2), 16)
    eigenvalues = full_spectrum(M).eigenvalues
    if abs(eigenvalues[0] - 1.0) > 1e-12 or np.abs(eigenvalues[1:]).max() > 1e-12:
        failures.append("weightless operator spectrum is not {1, 0, ...}")
    if np.linalg.matrix_rank(M.entries) != 1:
        failures.append("weightless operator is not rank one")

    # sparsity: at most N nonzero entries per row, {0, 1/N} for 0/1 schemes
    M = assemble_operator(s123, 8)
    per_row = np.count_nonzero(M.entries, axis=1)
    if per_row.max() > 8:
        failures.append("more than N nonzero entries in a row")
    entry_values = set(np.round(M.entries, 12).flat)
    if not entry_values <= {0.0, round(1.0 / 8, 12)}:
        failures.append("0/1 scheme entries not in {0, 1/N}")

    # boundary inner product at the shortest length
    mixed = WeightScheme(3, wt1={"12": 2.0}, wt2={"21": 0.5})
    exact = sum(
        (2.0 if p == (1, 2) else 1.0) * (0.5 if p == (2, 1) else 1.0)
        for p in ((1, 2), (2, 1))
    ) / 2.0
    got = alpha_spectral(mixed, 64, 2)
    if abs(got - exact) > 2e-2 * exact:
        failures.append(f"boundary-only inner product {got} vs {exact}")

    # eigenvalue family: strictly decreasing moduli, series below n!
    moduli = [abs(v) for v in eigenvalues_123_by_modulus(101)]
    if not all(a > b for a, b in zip(moduli, moduli[1:])):
        failures.append("eigenvalue moduli not strictly decreasing")
    if abs(moduli[0] - eigenvalue_123(0)) > 1e-15:
        failures.append("leading eigenvalue mismatch")
    for n in range(2, 21):
        if series_beta_123(n, 1e-6).value / math.factorial(n) > 1 + 1e-12:
            failures.append(f"cyclic series exceeds n! at n={n}")

    # linear weight consistency against the window product definition
    for _ in range(100):
        pi = random_perm(rng.randint(2, 8))
        scheme = rng.choice([s123, doubling])
        direct = 1.0
        for s in range(len(pi) - 2):
            direct *= scheme.weight(pi[s : s + 3])
        if len(pi) >= 2 and abs(linear_weight(pi, scheme) - direct) > 1e-12:
            failures.append(f"linear weight mismatch on {pi}")

    # canonical JSON round-trip
    report = {
        "results": [beta_bruteforce(4, s123).to_json_dict()],
        "estimate": beta_montecarlo(4, s123, 1000, 7).to_json_dict(),
        "series": series_beta_123(5, 1e-6).to_json_dict(),
    }
    blob = json.dumps(report, sort_keys=True)
    if json.dumps(json.loads(blob), sort_keys=True) != blob:
        failures.append("JSON round-trip is not byte identical")
    return failures


def check_property_suite() -> CheckResult:
    """Structural invariants of all modules on fixed-seed random samples."""
    failures = _property_failures()
    if failures:
        shown = "; ".join(failures[:4])
        return CheckResult(
            "property-suite", False, f"{len(failures)} failures: {shown}"
        )
    return CheckResult(
        "property-suite",
        True,
        "symmetries, estimator, spectral consistency, and serialization hold",
    )


ALL_CHECKS = {
    "series-vs-exact-123": check_series_matches_exact_123,
    "series-123-n2-closed-form": check_series_123_n2,
    "cyclic-doubling-identity": check_doubling_identity,
    "anchored-double-descent-count": check_anchored_count,
    "trace-route-vs-exact": check_trace_route,
    "eigenvalue-formula-agreement": check_eigenvalue_agreement,
    "spectrum-213-three-routes": check_213_three_routes,
    "euler-series-vs-count": check_euler_series,
    "property-suite": check_property_suite,
}


def run_battery(names=None) -> list[CheckResult]:
    """Run the named checks (all of them by default) in declaration order."""
    if names is None:
        names = list(ALL_CHECKS)
    unknown = [name for name in names if name not in ALL_CHECKS]
    if unknown:
        raise KeyError(f"unknown checks: {unknown}; choose from {list(ALL_CHECKS)}")
    return [ALL_CHECKS[name]() for name in names]
