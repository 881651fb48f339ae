import json

import pytest

from qchar_project.algebra.lweights import LWeight, a_inverse, normalize, y_of
from qchar_project.algebra.qscalar import Q, QFIELD
from qchar_project.characters.closedforms import kr_qchar, standard_qchar
from qchar_project.config import settings
from qchar_project.errors import DimensionBoundError
from qchar_project.modules import tensorsim
from qchar_project.modules.tensorsim import (
    check_relations,
    derive_drinfeld,
    lweight_decomposition,
    lweights_to_series,
    make_eval_module,
    matrix_dump,
    one_dim_module,
    standard_tensor,
    tensor,
)

WINDOW = (-8, 2)


@pytest.fixture
def two_factor():
    return standard_tensor([-1, -3])


class TestEvalModule:
    def test_fundamental_matrices(self):
        v = make_eval_module(1, -1)
        assert v.dim == 2
        assert v.k1.get(0, 0) == Q
        assert v.k1.get(1, 1) == QFIELD.one / Q
        assert v.e1.get(0, 1) == QFIELD.one
        assert v.e0.get(1, 0) == Q
        assert v.lweights == [y_of(-1), y_of(-1) * a_inverse(0)]

    def test_normalized_weights(self):
        v = make_eval_module(1, -1, normalized=True)
        assert v.weights == [0, -2]
        assert v.lweights[0] == normalize(y_of(-1))

    @pytest.mark.parametrize("k,s", [(1, -1), (2, -1), (3, -5)])
    def test_relations_hold(self, k, s):
        assert all(check_relations(make_eval_module(k, s)).values())

    def test_describe(self):
        assert make_eval_module(2, -1).describe() == "KR(k=2, top=Y[1])"
        assert one_dim_module(3).describe() == "[3]"

    def test_needs_positive_k(self):
        with pytest.raises(ValueError):
            make_eval_module(0, -1)


class TestTensor:
    def test_relations_on_products(self, two_factor):
        assert two_factor.dim == 4
        assert all(check_relations(two_factor).values())

    def test_state_enumeration(self, two_factor):
        assert two_factor.states == [(0, 0), (0, 1), (1, 0), (1, 1)]
        assert two_factor.index((1, 0)) == 2
        assert list(two_factor.weight_blocks()) == [0, -2, -4]

    def test_empty(self):
        with pytest.raises(ValueError):
            tensor([])

    def test_dimension_bound(self, monkeypatch):
        monkeypatch.setattr(settings, "MAX_TENSOR_DIM", 4)
        with pytest.raises(DimensionBoundError):
            standard_tensor([-1, -3, -5])

    def test_matrix_dump(self):
        data = json.loads(matrix_dump(make_eval_module(1, -1).e1))
        assert data["shape"] == [2, 2]
        assert data["rows"][0][1] == "1"


class TestDrinfeld:
    def test_relations_check(self, two_factor):
        cache = derive_drinfeld(two_factor, 3, 3)
        assert set(cache.h) == {1, 2, 3}
        assert cache.h[1].commutator(cache.h[2]).is_zero()

    def test_cached(self, two_factor):
        first = derive_drinfeld(two_factor, 2, 2)
        assert derive_drinfeld(two_factor, 1, 1) is first

    def test_bad_modes(self, two_factor):
        with pytest.raises(ValueError):
            derive_drinfeld(two_factor, 0, 1)


class TestLWeightDecomposition:
    def test_fundamental(self):
        decomp = lweight_decomposition(tensor([make_eval_module(1, -1)]))
        assert decomp == [(y_of(-1), 1), (y_of(-1) * a_inverse(0), 1)]

    def test_standard_module_is_product(self, two_factor):
        series = lweights_to_series(lweight_decomposition(two_factor), WINDOW, 4)
        assert series.same_terms(standard_qchar([-1, -3], WINDOW, 4))

    def test_repeated_factor_multiplicity(self):
        decomp = dict(lweight_decomposition(standard_tensor([-1, -1])))
        top = normalize(y_of(-1) * y_of(-1))
        assert decomp[top] == 1
        assert decomp[top * a_inverse(0)] == 2
        assert decomp[top * a_inverse(0) * a_inverse(0)] == 1

    def test_kr_module(self):
        decomp = lweight_decomposition(tensor([make_eval_module(2, -1)]))
        series = lweights_to_series(decomp, WINDOW, 4)
        assert series.same_terms(kr_qchar(2, 1, WINDOW, 4))

    def test_one_dim_factor_shifts_weight(self):
        decomp = lweight_decomposition(tensor([one_dim_module(2), make_eval_module(1, -1)]))
        assert [psi for psi, _ in decomp] == [LWeight(2) * y_of(-1), LWeight(2) * y_of(-1) * a_inverse(0)]

    @pytest.mark.parametrize("exponents", [[-1, -3], [-1, -1], [-1, -5, -3]])
    def test_diagonal_reading_matches_kernels(self, monkeypatch, exponents):
        fast = lweight_decomposition(standard_tensor(exponents))
        monkeypatch.setattr(tensorsim, "_diagonal_multiplicities", lambda mats, candidates: None)
        assert lweight_decomposition(standard_tensor(exponents)) == fast

    def test_cartan_blocks_are_triangular(self):
        t = standard_tensor([-1, -3, -5])
        cache = derive_drinfeld(t, 3, 3, check=False)
        for block in t.weight_blocks().values():
            mats = [cache.phi[m].restrict(block, block) for m in (1, 2, 3)]
            candidates = [(list(k), psi) for k, psi in tensorsim._candidate_groups(t, block, 3).items()]
            assert tensorsim._diagonal_multiplicities(mats, candidates) is not None

    def test_specialized_run_agrees(self):
        t = standard_tensor([-1, -3, -7])
        assert lweight_decomposition(t, qmode=(2, 3)) == lweight_decomposition(t)

    @pytest.mark.slow
    @pytest.mark.parametrize("n,qmode", [(3, None), (4, None), (5, None), (6, None), (6, (2, 3))])
    def test_standard_tensor_matches_closed_form(self, n, qmode):
        exponents = [-2 * k - 1 for k in range(n)]
        window = (-2 * n, 2)
        decomp = lweight_decomposition(standard_tensor(exponents), qmode=qmode)
        assert sum(m for _, m in decomp) == 2**n
        series = lweights_to_series(decomp, window, n)
        assert series.same_terms(standard_qchar(exponents, window, n))
