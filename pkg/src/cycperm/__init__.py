"""Weighted enumeration of permutations by consecutive windows.

The package counts (and more generally weight-sums) permutations whose
sliding windows of a fixed length avoid forbidden patterns, both along
a line and cyclically, and exposes three independent routes to the same
numbers: exhaustive enumeration, a discretized transfer operator whose
traces and eigenvalues govern the asymptotics, and explicit eigenvalue
series for the cases with closed forms.
"""

from .enumeration import (
    EnumerationResult,
    MCEstimate,
    alpha_bruteforce,
    alternating_count,
    anchored_double_descent_permutations,
    anchored_double_descent_sum,
    beta_bruteforce,
    beta_montecarlo,
    weighted_cyclic_123_sum,
)
from .errors import (
    CycpermError,
    EigenFailure,
    EmptyPoint,
    InvalidPattern,
    OutOfDomain,
    RequiresNonnegative,
    ResolutionTooHigh,
    TooLarge,
    TooShort,
)
from .perms import (
    WeightScheme,
    complement,
    cyclic_weight,
    cyclic_windows,
    double_descent_scheme,
    double_descents,
    lehmer_index,
    linear_weight,
    pattern_from_index,
    pattern_to_word,
    rotate,
    standardize,
    word_to_pattern,
)
from .series import (
    SeriesValue,
    euler_series,
    eigenvalue_123,
    eigenvalues_123,
    eigenvalues_123_by_modulus,
    series_beta_123,
)
from .spectral import (
    GridFunction,
    OperatorMatrix,
    SpectrumResult,
    alpha_spectral,
    assemble_operator,
    full_spectrum,
    kappa_grid,
    mu_grid,
    solve_213_spectrum,
    top_eigenvalue,
    trace_power,
    trace_powers,
)
from .verify import CheckResult, run_battery

__version__ = "0.1.0"

__all__ = [
    "CheckResult",
    "CycpermError",
    "EigenFailure",
    "EmptyPoint",
    "EnumerationResult",
    "GridFunction",
    "InvalidPattern",
    "MCEstimate",
    "OperatorMatrix",
    "OutOfDomain",
    "RequiresNonnegative",
    "ResolutionTooHigh",
    "SeriesValue",
    "SpectrumResult",
    "TooLarge",
    "TooShort",
    "WeightScheme",
    "alpha_bruteforce",
    "alpha_spectral",
    "alternating_count",
    "anchored_double_descent_permutations",
    "anchored_double_descent_sum",
    "assemble_operator",
    "beta_bruteforce",
    "beta_montecarlo",
    "complement",
    "cyclic_weight",
    "cyclic_windows",
    "double_descent_scheme",
    "double_descents",
    "euler_series",
    "eigenvalue_123",
    "eigenvalues_123",
    "eigenvalues_123_by_modulus",
    "full_spectrum",
    "kappa_grid",
    "lehmer_index",
    "linear_weight",
    "mu_grid",
    "pattern_from_index",
    "pattern_to_word",
    "rotate",
    "run_battery",
    "series_beta_123",
    "solve_213_spectrum",
    "standardize",
    "top_eigenvalue",
    "trace_power",
    "trace_powers",
    "weighted_cyclic_123_sum",
    "word_to_pattern",
]
