import random
from fractions import Fraction
from itertools import combinations

import pytest

from qchar_project.algebra.ymonomials import (
    A1,
    A2,
    B2,
    G2,
    SubsetIndex,
    YMonomial,
    a_monomial,
    nakajima_leq,
    parse_monomial,
    root_weight,
    subset_leq,
    weight,
)
from qchar_project.errors import OrderSizeError, ParityError, ParseError, UnknownNodeError


class TestAMonomial:
    def test_type_a1(self):
        assert a_monomial(1, 0) == YMonomial({("Y", 1, -1): 1, ("Y", 1, 1): 1})

    def test_type_a2_neighbour(self):
        expected = YMonomial({("Y", 1, -1): 1, ("Y", 1, 1): 1, ("Y", 2, 0): -1})
        assert a_monomial(1, 0, A2) == expected

    def test_product_adds_exponents(self):
        m = a_monomial(1, 0) * a_monomial(1, 2)
        assert m.exps == {("Y", 1, -1): 1, ("Y", 1, 1): 2, ("Y", 1, 3): 1}

    def test_double_and_triple_bonds(self):
        # C_{2,1} = -2 in B2: Y_{2,r-1} Y_{2,r+1} in the denominator
        m = a_monomial(1, 0, B2)
        assert m.exponent("Y", -1, node=2) == -1
        assert m.exponent("Y", 1, node=2) == -1
        m = a_monomial(1, 0, G2)
        assert [m.exponent("Y", r, node=2) for r in (-2, 0, 2)] == [-1, -1, -1]

    def test_errors(self):
        with pytest.raises(UnknownNodeError):
            a_monomial(3, 0, A2)
        with pytest.raises(ParityError):
            a_monomial(1, 1)

    @pytest.mark.parametrize("cd", [A1, A2, B2, G2])
    def test_weight_of_a_is_simple_root(self, cd):
        rng = random.Random(1)
        for i in cd.nodes:
            for _ in range(20):
                r = 2 * rng.randint(-10, 10)
                assert weight(a_monomial(i, r, cd), cd) == root_weight(i, cd)


class TestWeight:
    def test_examples(self):
        assert weight(YMonomial.y(-1)) == (Fraction(1),)
        assert weight(a_monomial(1, 0)) == (Fraction(2),)
        assert weight(YMonomial.one()) == (Fraction(0),)

    def test_additive(self):
        m1, m2 = YMonomial.y(-1, e=2), YMonomial.a(0, e=-1)
        assert weight(m1 * m2) == tuple(a + b for a, b in zip(weight(m1), weight(m2)))


class TestNakajimaOrder:
    def test_examples(self):
        a_inv = a_monomial(1, 0).inverse()
        assert nakajima_leq(a_inv, YMonomial.one())
        assert not nakajima_leq(YMonomial.one(), a_inv)
        assert nakajima_leq(a_inv, a_inv)

    def test_a_variables_expand(self):
        m = YMonomial.y(-1) * YMonomial.a(0, e=-1) * YMonomial.a(-2, e=-1)
        assert nakajima_leq(m, YMonomial.y(-1))
        assert not nakajima_leq(YMonomial.y(-1) * YMonomial.a(0), YMonomial.y(-1))

    def test_partial_order_properties(self):
        rng = random.Random(2)
        for _ in range(200):
            base = YMonomial.y(2 * rng.randint(-3, 3) - 1)
            m1 = base * YMonomial.a_inverse_product([2 * rng.randint(-2, 2) for _ in range(rng.randint(0, 2))])
            m2 = base * YMonomial.a_inverse_product([2 * rng.randint(-2, 2) for _ in range(rng.randint(0, 2))])
            assert nakajima_leq(m1, m1)
            if nakajima_leq(m1, m2) and nakajima_leq(m2, m1):
                assert m1 == m2


class TestSubsetIndex:
    def test_examples(self):
        assert subset_leq(SubsetIndex([0]), SubsetIndex([1]))
        assert subset_leq(SubsetIndex([(0, 1)]), SubsetIndex([(0, 2)]))
        assert subset_leq(SubsetIndex([0, 2]), SubsetIndex([0, 2]))

    def test_size_mismatch(self):
        with pytest.raises(OrderSizeError):
            subset_leq(SubsetIndex([0]), SubsetIndex([0, 1]))

    def test_total_order_on_fixed_size(self):
        for n in range(4):
            subsets = [SubsetIndex(c) for c in combinations(range(9), n)]
            for J in subsets:
                for K in subsets:
                    assert subset_leq(J, K) or subset_leq(K, J)
                    if subset_leq(J, K) and subset_leq(K, J):
                        assert J == K

    def test_text(self):
        assert SubsetIndex([2, 0]).to_text() == "{0,2}"
        assert SubsetIndex([(0, 2)]).to_text() == "{(0,2)}"
        assert SubsetIndex([]).max_element() is None


class TestParse:
    def test_round_trip_canonical(self):
        m = YMonomial.y(-1) * YMonomial.y(-3, e=2) * YMonomial.a(0, e=-1)
        assert parse_monomial(m.to_text()) == m
        assert parse_monomial("Y[-1] * Y[-3]^2 * A[0]^-1") == m

    def test_one(self):
        assert parse_monomial("1").is_one()

    def test_error_position(self):
        with pytest.raises(ParseError) as info:
            parse_monomial("Y[-1] * Z[2]")
        assert info.value.position == 7


class TestDominance:
    def test_examples(self):
        assert (YMonomial.y(-1) * YMonomial.y(-3)).is_dominant()
        assert YMonomial.y(-1).inverse().is_antidominant()
        mixed = YMonomial.y(-1) * YMonomial.y(-3).inverse()
        assert not mixed.is_dominant()
        assert not mixed.is_antidominant()
