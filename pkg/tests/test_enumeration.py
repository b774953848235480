import itertools
import math

import pytest

from cycperm import (
    OutOfDomain,
    TooLarge,
    TooShort,
    WeightScheme,
    alpha_bruteforce,
    alternating_count,
    anchored_double_descent_permutations,
    anchored_double_descent_sum,
    beta_bruteforce,
    beta_montecarlo,
    double_descent_scheme,
    double_descents,
    weighted_cyclic_123_sum,
)


def std(window):
    order = sorted(range(len(window)), key=lambda i: (window[i], i))
    ranks = [0] * len(window)
    for rank, i in enumerate(order, start=1):
        ranks[i] = rank
    return tuple(ranks)


def oracle_alpha_avoiders(n, forbidden):
    m = len(next(iter(forbidden))) - 1
    count = 0
    for pi in itertools.permutations(range(1, n + 1)):
        windows = (std(pi[s : s + m + 1]) for s in range(n - m))
        count += not any(w in forbidden for w in windows)
    return count


def oracle_beta_avoiders(n, forbidden):
    m = len(next(iter(forbidden))) - 1
    count = 0
    for pi in itertools.permutations(range(1, n + 1)):
        windows = (
            std(tuple(pi[(s + j) % n] for j in range(m + 1))) for s in range(n)
        )
        count += not any(w in forbidden for w in windows)
    return count


def oracle_weighted(n, scheme, cyclic):
    m = scheme.m
    total = 0.0
    for pi in itertools.permutations(range(1, n + 1)):
        if cyclic:
            w = 1.0
            for s in range(n):
                w *= scheme.weight(tuple(pi[(s + j) % n] for j in range(m + 1)))
        else:
            w = scheme.weight1(pi[:m]) * scheme.weight2(pi[n - m :])
            for s in range(n - m):
                w *= scheme.weight(pi[s : s + m + 1])
        total += w
    return total


FORBIDDEN_SETS = [
    frozenset([(1, 2, 3)]),
    frozenset([(2, 1, 3)]),
    frozenset([(3, 2, 1)]),
    frozenset([(1, 2, 3), (3, 2, 1)]),
    frozenset([(2, 1, 4, 3)]),
]


@pytest.mark.parametrize("forbidden", FORBIDDEN_SETS, ids=lambda fs: "-".join(
    sorted("".join(map(str, p)) for p in fs)
))
def test_avoider_counts_match_oracle(forbidden):
    scheme = WeightScheme.from_forbidden_set(sorted(forbidden))
    m = scheme.m
    for n in range(m, 7):
        assert alpha_bruteforce(n, scheme).value == oracle_alpha_avoiders(n, forbidden)
    for n in range(m + 1, 7):
        assert beta_bruteforce(n, scheme).value == oracle_beta_avoiders(n, forbidden)


def test_known_linear_123_counts():
    scheme = WeightScheme.from_forbidden_set(["123"])
    values = [alpha_bruteforce(n, scheme).value for n in range(2, 9)]
    assert values == [2, 5, 17, 70, 349, 2017, 13358]


def test_known_cyclic_123_counts():
    scheme = WeightScheme.from_forbidden_set(["123"])
    values = [beta_bruteforce(n, scheme).value for n in range(3, 9)]
    assert values == [3, 12, 45, 234, 1323, 8856]


def test_cyclic_123_equals_cyclic_321():
    a = WeightScheme.from_forbidden_set(["123"])
    b = WeightScheme.from_forbidden_set(["321"])
    for n in range(3, 10):
        assert beta_bruteforce(n, a).value == beta_bruteforce(n, b).value


def test_two_sided_cyclic_count_vanishes_for_odd_n():
    pair = WeightScheme.from_forbidden_set(["123", "321"])
    for n in (3, 5, 7, 9):
        assert beta_bruteforce(n, pair).value == 0


def test_weighted_scheme_matches_float_oracle():
    scheme = WeightScheme(
        3,
        wt={"321": 2.0, "132": 0.5},
        wt1={"12": 1.5},
        wt2={"21": 0.25},
    )
    for n in range(2, 7):
        got = alpha_bruteforce(n, scheme)
        want = oracle_weighted(n, scheme, cyclic=False)
        assert got.exact is False
        assert math.isclose(got.value, want, rel_tol=1e-12)
    for n in range(3, 7):
        got = beta_bruteforce(n, scheme)
        want = oracle_weighted(n, scheme, cyclic=True)
        assert math.isclose(got.value, want, rel_tol=1e-12)


def test_integer_schemes_return_exact_ints():
    doubling = double_descent_scheme()
    for n in range(3, 8):
        result = beta_bruteforce(n, doubling)
        assert isinstance(result.value, int)
        assert result.exact is True
        assert result.value == round(oracle_weighted(n, doubling, cyclic=True))


def test_trivial_scheme_sums_to_factorial():
    trivial = WeightScheme.from_forbidden_set([], window=3)
    for n in range(2, 8):
        assert alpha_bruteforce(n, trivial).value == math.factorial(n)
    for n in range(3, 8):
        assert beta_bruteforce(n, trivial).value == math.factorial(n)


def test_beta_between_zero_and_alpha():
    scheme = WeightScheme.from_forbidden_set(["213"])
    for n in range(3, 8):
        alpha = alpha_bruteforce(n, scheme).value
        beta = beta_bruteforce(n, scheme).value
        assert 0 <= beta <= alpha <= math.factorial(n)


def test_threaded_shards_match_serial():
    scheme = WeightScheme(3, wt={"321": 2.0, "132": 0.5})
    for n in (5, 7):
        assert (
            alpha_bruteforce(n, scheme, threads=3).value
            == alpha_bruteforce(n, scheme).value
        )
        assert (
            beta_bruteforce(n, scheme, threads=3).value
            == beta_bruteforce(n, scheme).value
        )


def test_size_guards():
    scheme = WeightScheme.from_forbidden_set(["123"])
    with pytest.raises(TooShort):
        alpha_bruteforce(1, scheme)
    with pytest.raises(TooShort):
        beta_bruteforce(2, scheme)
    with pytest.raises(TooLarge):
        alpha_bruteforce(12, scheme)  # default bound is 11
    with pytest.raises(TooLarge):
        beta_bruteforce(9, scheme, n_max=8)
    with pytest.raises(TooLarge):
        # the hard cap holds even when the caller raises n_max
        alpha_bruteforce(13, scheme, n_max=100)


def test_result_json_shape():
    scheme = WeightScheme.from_forbidden_set(["123"])
    data = beta_bruteforce(4, scheme).to_json_dict()
    assert data == {
        "n": 4,
        "mode": "cyclic",
        "scheme": scheme.digest,
        "value": 12,
        "exact": True,
    }


def test_weighted_cyclic_123_sum_is_factorial():
    for n in range(3, 9):
        assert weighted_cyclic_123_sum(n) == math.factorial(n)
    with pytest.raises(TooShort):
        weighted_cyclic_123_sum(2)


def oracle_anchored(n):
    # permutations fixing n first, no ascending window, final descent
    out = []
    for tail in itertools.permutations(range(1, n)):
        pi = (n,) + tail
        windows = [std(pi[s : s + 3]) for s in range(n - 2)]
        if (1, 2, 3) not in windows and pi[-2] > pi[-1]:
            out.append(pi)
    return out


def test_anchored_sum_is_shifted_factorial():
    for n in range(3, 9):
        qualifying = oracle_anchored(n)
        expected = sum(2 ** double_descents(p) for p in qualifying)
        assert anchored_double_descent_sum(n) == expected == math.factorial(n - 1)
        assert sorted(anchored_double_descent_permutations(n)) == sorted(qualifying)


def test_anchored_witness_set_at_five():
    words = {
        "".join(map(str, p)) for p in anchored_double_descent_permutations(5)
    }
    assert words == {
        "51432", "52143", "52431", "53142", "53241",
        "53421", "54132", "54231", "54321",
    }
    weights = sorted(
        2 ** double_descents(p) for p in anchored_double_descent_permutations(5)
    )
    assert weights == [2] * 8 + [8]
    assert sum(weights) == 24


def test_alternating_counts_are_euler_numbers():
    euler = [1, 1, 2, 5, 16, 61, 272, 1385, 7936]
    for n, expected in enumerate(euler, start=1):
        assert alternating_count(n) == expected
        assert alternating_count(n, "downup") == expected
    with pytest.raises(OutOfDomain):
        alternating_count(4, "sideways")
    with pytest.raises(TooShort):
        alternating_count(0)


def test_alternating_equals_half_the_two_sided_sum():
    pair = WeightScheme.from_forbidden_set(["123", "321"])
    for n in range(2, 9):
        assert alpha_bruteforce(n, pair).value == 2 * alternating_count(n)


def test_montecarlo_estimator():
    scheme = WeightScheme.from_forbidden_set(["123"])
    est = beta_montecarlo(6, scheme, samples=200_000, seed=99)
    exact = beta_bruteforce(6, scheme).value / math.factorial(6)
    assert abs(est.mean - exact) <= 5 * est.std_error
    assert est.samples == 200_000 and est.seed == 99
    # identical seed, identical estimate
    again = beta_montecarlo(6, scheme, samples=200_000, seed=99)
    assert again.mean == est.mean and again.std_error == est.std_error
    shifted = beta_montecarlo(6, scheme, samples=200_000, seed=100)
    assert shifted.mean != est.mean


def test_montecarlo_trivial_scheme_has_no_variance():
    trivial = WeightScheme.from_forbidden_set([], window=3)
    est = beta_montecarlo(5, trivial, samples=500, seed=1)
    assert est.mean == 1.0
    assert est.std_error == 0.0


def test_montecarlo_guards():
    scheme = WeightScheme.from_forbidden_set(["123"])
    with pytest.raises(TooShort):
        beta_montecarlo(2, scheme, samples=10, seed=0)
    with pytest.raises(OutOfDomain):
        beta_montecarlo(5, scheme, samples=0, seed=0)
    single = beta_montecarlo(5, scheme, samples=1, seed=4)
    assert single.std_error == 0.0
