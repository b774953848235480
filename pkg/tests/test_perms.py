import doctest
import itertools
import math
import random

import numpy as np
import pytest

import cycperm.perms as perms
from cycperm import (
    EmptyPoint,
    InvalidPattern,
    TooShort,
    WeightScheme,
    complement,
    cyclic_windows,
    double_descent_scheme,
    double_descents,
    lehmer_index,
    linear_weight,
    cyclic_weight,
    pattern_from_index,
    pattern_to_word,
    rotate,
    standardize,
    word_to_pattern,
)


def oracle_standardize(point):
    # independent formulation: stable argsort of the argsort
    order = np.argsort(np.asarray(point, dtype=float), kind="stable")
    ranks = np.empty(len(point), dtype=int)
    ranks[order] = np.arange(1, len(point) + 1)
    return tuple(int(r) for r in ranks)


def test_docstring_examples():
    results = doctest.testmod(perms)
    assert results.attempted > 0
    assert results.failed == 0


def test_standardize_hand_cases():
    assert standardize((0.3, 0.9, 0.2)) == (2, 3, 1)
    assert standardize((5,)) == (1,)
    assert standardize((2, 1, 2)) == (2, 1, 3)
    assert standardize((1, 1, 1)) == (1, 2, 3)


def test_standardize_matches_stable_argsort():
    rng = random.Random(7)
    for _ in range(500):
        n = rng.randint(1, 10)
        # quantized coordinates so ties actually happen
        point = [round(rng.random(), 1) for _ in range(n)]
        assert standardize(point) == oracle_standardize(point)


def test_standardize_idempotent_and_monotone_invariant():
    rng = random.Random(11)
    for _ in range(200):
        n = rng.randint(1, 9)
        pi = list(range(1, n + 1))
        rng.shuffle(pi)
        assert standardize(pi) == tuple(pi)
        point = [rng.uniform(-3, 3) for _ in range(n)]
        squashed = [math.atan(x) for x in point]
        assert standardize(point) == standardize(squashed)


def test_standardize_rejects_bad_points():
    with pytest.raises(EmptyPoint):
        standardize(())
    with pytest.raises(InvalidPattern):
        standardize((0.1, float("nan")))
    with pytest.raises(InvalidPattern):
        standardize((float("inf"), 0.0))


def test_word_round_trip():
    assert word_to_pattern("213") == (2, 1, 3)
    assert pattern_to_word((2, 1, 3)) == "213"
    # letters continue past 9
    assert word_to_pattern("a123456789") == (10, 1, 2, 3, 4, 5, 6, 7, 8, 9)
    for k in range(1, 6):
        for pi in itertools.permutations(range(1, k + 1)):
            assert word_to_pattern(pattern_to_word(pi)) == pi
    with pytest.raises(InvalidPattern):
        word_to_pattern("1x3")
    with pytest.raises(InvalidPattern):
        word_to_pattern("122")
    with pytest.raises(InvalidPattern):
        word_to_pattern("13")


def test_lehmer_index_is_lexicographic_rank():
    for k in range(1, 7):
        ordered = sorted(itertools.permutations(range(1, k + 1)))
        for rank, pi in enumerate(ordered):
            assert lehmer_index(pi) == rank
            assert pattern_from_index(rank, k) == pi


def test_lehmer_index_applies_tie_break():
    rng = random.Random(3)
    for _ in range(300):
        n = rng.randint(1, 7)
        point = [rng.choice((0.0, 0.25, 0.5, 1.0)) for _ in range(n)]
        assert lehmer_index(point) == lehmer_index(standardize(point))


def test_pattern_indices_matches_scalar():
    rng = np.random.default_rng(5)
    cols = [rng.random(400) for _ in range(4)]
    got = perms.pattern_indices(cols)
    expected = [lehmer_index([c[i] for c in cols]) for i in range(400)]
    assert got.tolist() == expected
    # scalar broadcast against an array column
    got2 = perms.pattern_indices([cols[0], 0.5])
    expected2 = [lehmer_index((cols[0][i], 0.5)) for i in range(400)]
    assert got2.tolist() == expected2


def test_rotate_and_complement():
    assert rotate((1, 2, 3, 4), 1) == (2, 3, 4, 1)
    assert rotate((1, 2, 3, 4), 0) == (1, 2, 3, 4)
    assert rotate((1, 2, 3, 4), 6) == (3, 4, 1, 2)
    assert complement((2, 3, 1)) == (2, 1, 3)
    rng = random.Random(17)
    for _ in range(100):
        n = rng.randint(1, 8)
        pi = list(range(1, n + 1))
        rng.shuffle(pi)
        pi = tuple(pi)
        assert complement(complement(pi)) == pi
        r, s = rng.randrange(n), rng.randrange(n)
        assert rotate(rotate(pi, r), s) == rotate(pi, (r + s) % n)


def test_cyclic_windows():
    assert cyclic_windows((3, 2, 1), 3) == [(3, 2, 1), (2, 1, 3), (1, 3, 2)]
    assert len(cyclic_windows((5, 1, 4, 2, 3), 3)) == 5
    with pytest.raises(TooShort):
        cyclic_windows((2, 1), 3)
    with pytest.raises(InvalidPattern):
        cyclic_windows((2, 1), 1)


def test_double_descents_counts():
    assert double_descents((3, 2, 1)) == 1
    assert double_descents((1, 2, 3)) == 0
    assert double_descents((5, 4, 3, 2, 1)) == 3
    assert double_descents((3, 2, 1), cyclic=True) == 1
    assert double_descents((5, 4, 3, 2, 1), cyclic=True) == 3
    with pytest.raises(TooShort):
        double_descents((2, 1))
    rng = random.Random(23)
    for _ in range(200):
        n = rng.randint(3, 9)
        pi = list(range(1, n + 1))
        rng.shuffle(pi)
        assert double_descents(pi, cyclic=True) == cyclic_windows(pi, 3).count((3, 2, 1))
        linear = sum(pi[i] > pi[i + 1] > pi[i + 2] for i in range(n - 2))
        assert double_descents(pi) == linear


def test_forbidden_set_scheme():
    w = WeightScheme.from_forbidden_set(["123", "321"])
    assert w.window == 3 and w.m == 2
    assert w.weight((1, 2, 3)) == 0.0
    assert w.weight((4, 5, 6)) == 0.0  # standardizes to 123
    assert w.weight((2, 1, 3)) == 1.0
    assert w.weight1((1, 2)) == 1.0
    assert w.is_zero_one and w.is_integer and w.is_nonnegative
    with pytest.raises(InvalidPattern):
        WeightScheme.from_forbidden_set(["12", "123"])
    with pytest.raises(InvalidPattern):
        WeightScheme.from_forbidden_set([])
    trivial = WeightScheme.from_forbidden_set([], window=3)
    assert trivial.weight((3, 1, 2)) == 1.0


def test_scheme_digest_is_canonical():
    a = WeightScheme(3, wt={"321": 2.0, "123": 0.0})
    b = WeightScheme(3, wt={"123": 0.0, "321": 2.0})
    assert a.digest == b.digest
    # overrides equal to the default do not change the digest
    c = WeightScheme(3, wt={"321": 2.0, "123": 0.0, "213": 1.0})
    assert c.digest == a.digest
    assert a.digest != WeightScheme.from_forbidden_set(["123"]).digest


def test_scheme_json_round_trip():
    w = WeightScheme(
        3, wt={"321": 2.0, "123": 0.0}, wt1={"12": 0.5}, default2=3.0
    )
    data = w.to_json_dict()
    back = WeightScheme.from_json_dict(data)
    assert back.digest == w.digest
    assert back.to_json_dict() == data
    with pytest.raises(InvalidPattern):
        WeightScheme.from_json_dict({"wt": {}})
    with pytest.raises(InvalidPattern):
        WeightScheme.from_json_dict({"window": 3, "nope": 1})


def test_scheme_weight_validates_window_length():
    w = WeightScheme.from_forbidden_set(["123"])
    with pytest.raises(InvalidPattern):
        w.weight((1, 2))
    with pytest.raises(InvalidPattern):
        w.weight1((1, 2, 3))


def test_linear_and_cyclic_weight_hand_cases():
    doubling = double_descent_scheme()
    assert linear_weight((3, 2, 1), doubling) == 2.0
    assert linear_weight((1, 2, 3), doubling) == 0.0
    assert linear_weight((5, 4, 3, 2, 1), doubling) == 8.0
    assert cyclic_weight((3, 2, 1), doubling) == 2.0
    s123 = WeightScheme.from_forbidden_set(["123"])
    assert cyclic_weight((1, 2, 3), s123) == 0.0
    assert cyclic_weight((2, 3, 1), s123) == 0.0  # wrap window (1,2,3)
    assert cyclic_weight((2, 1, 3), s123) == 1.0  # windows 213, 132, 321
    with pytest.raises(TooShort):
        cyclic_weight((2, 1), s123)
    with pytest.raises(TooShort):
        linear_weight((1,), s123)


def test_cyclic_weight_equals_window_product():
    rng = random.Random(31)
    doubling = double_descent_scheme()
    for _ in range(200):
        n = rng.randint(3, 9)
        pi = list(range(1, n + 1))
        rng.shuffle(pi)
        windows = cyclic_windows(pi, 3)
        if (1, 2, 3) in windows:
            expected = 0.0
        else:
            expected = 2.0 ** windows.count((3, 2, 1))
        assert cyclic_weight(pi, doubling) == expected


def test_boundary_weights_enter_linear_weight():
    w = WeightScheme(3, wt1={"21": 5.0}, wt2={"12": 7.0})
    assert linear_weight((2, 1, 3), w) == 5.0 * 7.0
    assert linear_weight((1, 2, 3), w) == 7.0
    assert linear_weight((2, 1), w) == 5.0  # n = m: boundaries only
