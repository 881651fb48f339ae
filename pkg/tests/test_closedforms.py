import random

import pytest

from qchar_project.algebra.lweights import psi_of, y_of
from qchar_project.algebra.qseries import QCharSeries, stabilization_check
from qchar_project.characters.closedforms import (
    GappedTuple,
    chi_infinity,
    decompose_prefundamental,
    fundamental_qchar,
    gapped_subset_oracle,
    gapped_tuples,
    kr_qchar,
    order_compatibility_check,
    prefund_limit_qchar,
    prefund_simple_qchar,
    qchar_multiplicativity_check,
    random_negative_lweight,
    simple_qchar_gapped,
    standard_qchar,
    standard_sequence,
    verify_decomposition,
)
from qchar_project.errors import GapError, NotNegativeError, ParityError

WINDOW = (-4, 0)


class TestFiniteDimensional:
    def test_fundamental(self):
        assert dict(fundamental_qchar(-1).items()) == {(): 1, (0,): 1}
        with pytest.raises(ParityError):
            fundamental_qchar(0)

    def test_standard(self):
        s = standard_qchar([-1, -3])
        assert len(s) == 4
        assert s.is_multiplicity_free()
        assert dict(standard_qchar([-1, -1]).items()) == {(): 1, (0,): 2, (0, 0): 1}

    def test_kr(self):
        assert dict(kr_qchar(2, -1).items()) == {(): 1, (0,): 1, (0, -2): 1}
        assert dict(kr_qchar(0, -1).items()) == {(): 1}
        with pytest.raises(ValueError):
            kr_qchar(-1, -1)


class TestPrefundamental:
    def test_limit(self):
        s = prefund_limit_qchar(0, WINDOW, 2)
        assert len(s) == 7
        assert s.is_multiplicity_free()

    def test_simple_is_a_chain(self):
        s = prefund_simple_qchar(0, WINDOW, 3)
        assert s.keys() == [(), (0,), (0, -2), (0, -2, -4)]

    def test_odd_exponent(self):
        with pytest.raises(ParityError):
            prefund_limit_qchar(1, WINDOW, 2)

    def test_standard_sequence_stabilizes_to_limit(self):
        psi = psi_of(0, -1)
        n0, stable = stabilization_check(lambda n: standard_sequence(psi, n, WINDOW, 2), WINDOW, 2)
        assert n0 == 3
        assert stable.same_terms(chi_infinity(psi, WINDOW, 2))

    def test_chi_infinity_needs_negative(self):
        with pytest.raises(NotNegativeError):
            chi_infinity(psi_of(0, 1), WINDOW, 2)


class TestGappedTuple:
    def test_gap_condition(self):
        with pytest.raises(GapError):
            GappedTuple((1, 2))
        with pytest.raises(GapError):
            GappedTuple((0,))
        assert len(GappedTuple((1, 3))) == 2

    def test_bookkeeping(self):
        g = GappedTuple((1, 3))
        assert g.leading_key() == (-2, -6)
        assert g.weight_shift() == -2
        assert GappedTuple().weight_shift() == 0
        assert str(g) == "(1,3)"

    def test_enumeration(self):
        assert [g.rs for g in gapped_tuples(WINDOW, 2)] == [(), (1,), (2,)]
        rs = [g.rs for g in gapped_tuples((-8, 0), 4)]
        assert (1, 3) in rs and (1, 4) in rs and (2, 4) in rs
        assert (1, 2) not in rs


class TestSimpleGapped:
    def test_single_gap(self):
        s = simple_qchar_gapped((1,), WINDOW, 2)
        assert dict(s.items()) == {(-2,): 1, (-2, -4): 1}

    def test_empty_tuple_is_prefundamental(self):
        assert simple_qchar_gapped((), WINDOW, 3).same_terms(prefund_simple_qchar(0, WINDOW, 3))

    def test_leading_term_beyond_degcap(self):
        assert not simple_qchar_gapped((1, 3), (-8, 0), 1)

    @pytest.mark.parametrize("rs", [(), (1,), (2,), (1, 3), (1, 4), (2, 4), (1, 3, 5)])
    def test_matches_subset_oracle(self, rs):
        window, degcap = (-10, 0), 4
        assert simple_qchar_gapped(rs, window, degcap).same_terms(gapped_subset_oracle(rs, window, degcap))

    def test_shifted_top(self):
        s = simple_qchar_gapped((1,), (-6, -2), 2, top=-2)
        assert s.same_terms(gapped_subset_oracle((1,), (-6, -2), 2, top=-2))


class TestDecomposition:
    def test_limit_splits_into_gapped_summands(self):
        report = verify_decomposition((-8, 0), 4)
        assert report["equal"]
        assert report["multiplicity_free"]
        assert report["first_mismatch"] is None
        assert report["lhs_terms"] == report["rhs_terms"]

    def test_dropping_a_summand_is_detected(self):
        report = verify_decomposition((-8, 0), 4, exclude=[(1,)])
        assert not report["equal"]
        assert report["first_mismatch"]["monomial"] == "A[-2]^-1"
        assert report["first_mismatch"]["lhs"] == 1
        assert report["first_mismatch"]["rhs"] == 0

    def test_decompose_prefundamental(self):
        parts = decompose_prefundamental(0, WINDOW, 2)
        assert [p["tuple"].rs for p in parts] == [(), (1,), (2,)]
        total = QCharSeries.zero(WINDOW, 2)
        for p in parts:
            total = total + p["series"]
        assert total.same_terms(prefund_limit_qchar(0, WINDOW, 2))

    @pytest.mark.slow
    def test_depth_twelve(self):
        report = verify_decomposition((-24, 0), 6)
        assert report["equal"]
        assert report["multiplicity_free"]


class TestMultiplicativity:
    def test_examples(self):
        assert qchar_multiplicativity_check(y_of(-1), psi_of(0, -1), (-8, 0), 4)
        assert qchar_multiplicativity_check(psi_of(0, -1), psi_of(-2, -1), (-8, 0), 4)

    def test_random_pairs(self):
        rng = random.Random(0)
        for _ in range(30):
            psi1, psi2 = random_negative_lweight(rng), random_negative_lweight(rng)
            assert qchar_multiplicativity_check(psi1, psi2, (-8, 0), 3)

    def test_order_compatibility(self):
        assert order_compatibility_check(samples=60, seed=3)

    @pytest.mark.slow
    def test_hundred_samples(self):
        rng = random.Random(100)
        for _ in range(100):
            psi1, psi2 = random_negative_lweight(rng), random_negative_lweight(rng)
            assert qchar_multiplicativity_check(psi1, psi2, (-16, 0), 4)
        assert order_compatibility_check(samples=100, seed=100)
