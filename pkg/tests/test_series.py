import math

import pytest

from cycperm import (
    OutOfDomain,
    WeightScheme,
    beta_bruteforce,
    eigenvalue_123,
    eigenvalues_123,
    eigenvalues_123_by_modulus,
    euler_series,
    series_beta_123,
    standardize,
)


def test_eigenvalue_closed_form():
    # lambda_k = sqrt(3) / (2 pi (k + 1/3))
    assert math.isclose(eigenvalue_123(0), 3 * math.sqrt(3) / (2 * math.pi))
    assert math.isclose(eigenvalue_123(-1), -3 * math.sqrt(3) / (4 * math.pi))
    assert math.isclose(eigenvalue_123(1), eigenvalue_123(0) / 4)
    assert abs(eigenvalue_123(0) - 0.8270) < 5e-5


def test_eigenvalue_range_is_inclusive():
    values = eigenvalues_123(-2, 2)
    assert len(values) == 5
    assert values[0] == eigenvalue_123(-2)
    assert values[-1] == eigenvalue_123(2)
    with pytest.raises(OutOfDomain):
        eigenvalues_123(3, 2)


def test_modulus_order_is_strictly_decreasing():
    values = eigenvalues_123_by_modulus(101)  # covers |k| <= 50
    moduli = [abs(v) for v in values]
    assert all(a > b for a, b in zip(moduli, moduli[1:]))
    assert values[0] == eigenvalue_123(0)
    assert values[1] == eigenvalue_123(-1)
    assert values[2] == eigenvalue_123(1)
    assert values[3] == eigenvalue_123(-2)


def test_series_rounds_to_exact_counts():
    scheme = WeightScheme.from_forbidden_set(["123"])
    for n in range(3, 9):
        got = series_beta_123(n, 1e-6)
        exact = beta_bruteforce(n, scheme).value
        assert round(got.value) == exact
        assert abs(got.value - exact) <= 1e-6


def test_tail_bound_is_honest():
    scheme = WeightScheme.from_forbidden_set(["123"])
    for n in range(3, 9):
        got = series_beta_123(n, 1e-4)
        exact = beta_bruteforce(n, scheme).value
        assert got.tail_bound <= 1e-4
        assert abs(got.value - exact) <= got.tail_bound
        assert got.terms_used >= 2


def test_length_two_series():
    got = series_beta_123(2, 1e-9)
    assert abs(got.value - 2.0) <= 1e-6
    # the quadratic tail forces the term cap; the reported bound stays honest
    assert got.terms_used == 2_000_000
    assert abs(got.value - 2.0) <= got.tail_bound


def test_length_two_count_by_hand():
    # windows wrap past the end, so both length-2 permutations give
    # three-point windows with a repeated value; the tie goes to the
    # earlier position and neither window standardizes to 123
    for pi in ((1, 2), (2, 1)):
        windows = [
            standardize((pi[s % 2], pi[(s + 1) % 2], pi[(s + 2) % 2]))
            for s in range(2)
        ]
        assert (1, 2, 3) not in windows
    assert standardize((1, 2, 1)) == (1, 3, 2)
    assert standardize((2, 1, 2)) == (2, 1, 3)


def test_series_stays_below_factorial():
    for n in range(2, 21):
        got = series_beta_123(n, 1e-6)
        assert got.value / math.factorial(n) <= 1 + 1e-12
        assert got.value > 0


def test_series_domain_errors():
    with pytest.raises(OutOfDomain):
        series_beta_123(1, 1e-6)
    with pytest.raises(OutOfDomain):
        series_beta_123(5, 0.0)
    with pytest.raises(OutOfDomain):
        euler_series(0, 1e-6)
    with pytest.raises(OutOfDomain):
        euler_series(3, -1e-6)


def test_euler_series_values():
    euler = [1, 1, 2, 5, 16, 61, 272, 1385, 7936]
    for n, expected in enumerate(euler, start=1):
        got = euler_series(n, 1e-6)
        assert round(got.value) == expected
        assert abs(got.value - expected) <= 1e-6
        assert got.tail_bound <= 1e-6


def test_series_value_json_shape():
    got = series_beta_123(5, 1e-6)
    data = got.to_json_dict()
    assert set(data) == {"n", "value", "terms_used", "tail_bound"}
    assert data["n"] == 5
    assert round(data["value"]) == 45
