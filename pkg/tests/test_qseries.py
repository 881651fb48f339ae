import random
from itertools import combinations

import pytest

from qchar_project.algebra.qseries import (
    QCharSeries,
    coefficient,
    parse_key_text,
    product_of,
    stabilization_check,
    truncated_product,
)
from qchar_project.algebra.ymonomials import YMonomial
from qchar_project.errors import ParityError, ParseError, StabilizationError, UntrackedRegionError

WINDOW = (-8, 0)


def one_plus(r, window=WINDOW, degcap=4):
    return QCharSeries({(): 1, (r,): 1}, window, degcap)


def standard_product(n, window, degcap):
    return product_of((one_plus(-2 * k, window, degcap) for k in range(n)), window, degcap)


def random_series(rng):
    terms = {}
    for _ in range(rng.randint(1, 4)):
        key = tuple(sorted((2 * rng.randint(-4, 0) for _ in range(rng.randint(0, 2))), reverse=True))
        terms[key] = terms.get(key, 0) + rng.randint(1, 3)
    return QCharSeries(terms, WINDOW, 4)


class TestTruncatedProduct:
    def test_two_factors(self):
        s = truncated_product(one_plus(0), one_plus(-2))
        assert s.same_terms(QCharSeries({(): 1, (0,): 1, (-2,): 1, (0, -2): 1}))

    def test_identity(self):
        s = one_plus(0) * one_plus(-4)
        assert s * QCharSeries.one() == s

    def test_degcap_truncation(self):
        s = truncated_product(one_plus(0, degcap=1), one_plus(0, degcap=1))
        assert dict(s.items()) == {(): 1, (0,): 2}

    def test_window_truncation(self):
        s = truncated_product(one_plus(0), one_plus(-10, window=(-12, 0)))
        assert s.window == WINDOW
        assert (-10,) not in s.keys()

    def test_commutative_and_associative(self):
        rng = random.Random(8)
        for _ in range(20):
            a, b, c = random_series(rng), random_series(rng), random_series(rng)
            assert a * b == b * a
            assert (a * b) * c == a * (b * c)

    def test_subset_products_are_multiplicity_free(self):
        for n in range(1, 11):
            s = standard_product(n, (-2 * n, 0), n)
            assert s.is_multiplicity_free()
            assert len(s) == 2**n


class TestCoefficient:
    def test_examples(self):
        s = one_plus(0)
        assert coefficient(s, YMonomial.a(0, e=-1)) == 1
        assert coefficient(s, YMonomial.a(0, e=-2)) == 0

    def test_untracked(self):
        with pytest.raises(UntrackedRegionError):
            coefficient(one_plus(0), (WINDOW[0] - 2,))

    def test_odd_index_rejected(self):
        with pytest.raises(ParityError):
            QCharSeries({(-1,): 1})


class TestRegion:
    def test_restrict(self):
        s = standard_product(3, (-4, 0), 3)
        small = s.restrict((-2, 0), 1)
        assert dict(small.items()) == {(): 1, (0,): 1, (-2,): 1}
        with pytest.raises(UntrackedRegionError):
            s.restrict((-6, 0), 3)

    def test_shifted(self):
        s = one_plus(0).shifted(-2)
        assert s.window == (-10, -2)
        assert (-2,) in s.keys()

    def test_from_subsets(self):
        s = QCharSeries.from_subsets([(), (0,), (1, 2)], top=0)
        assert dict(s.items()) == {(): 1, (0,): 1, (-2, -4): 1}

    def test_leading_terms(self):
        s = QCharSeries({(0,): 1, (-2,): 1, (0, -2): 1})
        assert s.leading_terms() == [(0,), (-2,)]
        assert QCharSeries.zero().leading_terms() == []

    def test_json_sorted(self):
        s = one_plus(0) * one_plus(-2)
        data = s.to_json()
        assert [t["monomial"] for t in data["terms"]] == ["1", "A[0]^-1", "A[-2]^-1", "A[0]^-1 * A[-2]^-1"]
        assert data["window"] == [-8, 0]

    def test_from_json(self):
        s = one_plus(0) * one_plus(0) * one_plus(-2)
        assert QCharSeries.from_json(s.to_json()).same_terms(s)
        assert parse_key_text("A[0]^-2 * A[-4]^-1") == (0, 0, -4)
        assert parse_key_text("1") == ()
        with pytest.raises(ParseError):
            parse_key_text("A[0]^2")

    def test_text_table(self):
        s = QCharSeries({(): 1, (-2,): 3, (0,): 1, (0, -2): 1})
        lines = s.to_text().splitlines()
        assert [line.split()[0] for line in lines] == ["0", "1", "1", "2"]
        assert lines[1].split()[-1] == "A[0]^-1"
        assert lines[2].split()[1] == "3"


class TestStabilization:
    def test_standard_sequence(self):
        n0, stable = stabilization_check(lambda n: standard_product(n, (-4, 0), 3), (-4, 0), 3)
        assert n0 == 3
        assert len(stable) == 8

    def test_stable_value_is_subset_sum(self):
        K = 6
        window = (-2 * K, 0)
        n0, stable = stabilization_check(lambda n: standard_product(n, window, K), window, K)
        assert n0 <= K + 1
        subsets = [c for size in range(K + 1) for c in combinations(range(K + 1), size)]
        assert stable.same_terms(QCharSeries.from_subsets(subsets, 0, window, K))

    def test_constant(self):
        n0, stable = stabilization_check(lambda n: QCharSeries.one(), WINDOW, 4)
        assert n0 == 1

    def test_give_up(self):
        with pytest.raises(StabilizationError):
            stabilization_check(lambda n: QCharSeries({(0,): n}), WINDOW, 4, n_max=10)
