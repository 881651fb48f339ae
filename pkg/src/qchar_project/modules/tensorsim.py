"""
Matrix realizations of finite tensor products of evaluation modules.

An evaluation module of dimension k+1 has basis v_0 (highest) .. v_k and
carries the l-weight string Y_{q^s} Y_{q^{s+2}} ... Y_{q^{s+2k-2}}:

    k1 v_j = q^{k-2j} v_j,  e1 v_j = [k-j+1] v_{j-1},  e0 v_j = q^{s+k+1} [j+1] v_{j+1}.

Tensor products use the coproduct

    D(e1) = e1 (x) 1 + k1 (x) e1,  D(e0) = e0 (x) 1 + k1^{-1} (x) e0,  D(k1) = k1 (x) k1,

with factor 0 leftmost. Drinfeld generators are derived from e0, e1, k1 alone.
"""
import logging
from dataclasses import dataclass, field
from functools import reduce
from itertools import product as cartesian

from qchar_project.algebra.linalg import SparseMatrix, joint_generalized_kernel, to_qq
from qchar_project.algebra.lweights import LWeight, a_inverse, normalize, series_coeffs, y_of
from qchar_project.algebra.qscalar import QFIELD, Q, QQ_DIFF, q_number, specialize_elem
from qchar_project.algebra.qseries import QCharSeries
from qchar_project.config import settings
from qchar_project.errors import (
    DimensionBoundError,
    InconsistencyError,
    UnmatchedEigenvalueError,
)

logger = logging.getLogger(__name__)


def _qint(m):
    return q_number(m).elem


@dataclass
class EvalModule:
    """A (k+1)-dimensional evaluation module with its l-weights.

    ``lweights[j]`` is the l-weight of v_j and ``weights[j]`` its k1-exponent.
    """

    k: int
    s: int
    normalized: bool
    e1: SparseMatrix
    e0: SparseMatrix
    k1: SparseMatrix
    lweights: list
    weights: list

    @property
    def dim(self):
        return self.k1.shape[0]

    def describe(self):
        if self.k == 0:
            return f"[{self.lweights[0].wt}]"
        top = self.s + 2 * self.k - 2
        label = "~" if self.normalized else ""
        return f"KR{label}(k={self.k}, top=Y[{top}])"


def make_eval_module(k, s, normalized=False):
    """Evaluation module whose highest l-weight is Y_{q^s} Y_{q^{s+2}} ... (k factors).

    With ``normalized`` the k1 action is rescaled by q^{-k} so the highest
    l-weight has weight zero.
    """
    if k < 1:
        raise ValueError(f"evaluation modules need k >= 1, got {k}")
    dim = k + 1
    shift = -k if normalized else 0
    e1, e0, k1 = {}, {}, {}
    coeff0 = Q ** (s + k + 1)
    for j in range(dim):
        k1[j] = {j: Q ** (k - 2 * j + shift)}
        if j >= 1:
            e1.setdefault(j - 1, {})[j] = _qint(k - j + 1)
        if j < k:
            e0.setdefault(j + 1, {})[j] = coeff0 * _qint(j + 1)

    top = LWeight()
    for t in range(s, s + 2 * k - 1, 2):
        top = top * y_of(t)
    if normalized:
        top = normalize(top)
    lweights = [top]
    rtop = s + 2 * k - 2
    for j in range(1, dim):
        lweights.append(lweights[-1] * a_inverse(rtop + 3 - 2 * j))
    weights = [k - 2 * j + shift for j in range(dim)]
    return EvalModule(
        k=k,
        s=s,
        normalized=normalized,
        e1=SparseMatrix(e1, (dim, dim)),
        e0=SparseMatrix(e0, (dim, dim)),
        k1=SparseMatrix(k1, (dim, dim)),
        lweights=lweights,
        weights=weights,
    )


def one_dim_module(w):
    """The one-dimensional module [w]: e0 = e1 = 0, k1 = q^w."""
    w = int(w)
    zero = SparseMatrix.zeros(1)
    return EvalModule(
        k=0,
        s=0,
        normalized=False,
        e1=zero,
        e0=zero,
        k1=SparseMatrix({0: {0: Q**w}}, (1, 1)),
        lweights=[LWeight(w)],
        weights=[w],
    )


def _diag_inverse(m):
    return SparseMatrix({i: {i: QFIELD.one / row[i]} for i, row in m.rows.items()}, m.shape)


@dataclass
class DrinfeldCache:
    """Derived generators on a TensorModule, indexed by their mode."""

    xplus: dict = field(default_factory=dict)
    xminus: dict = field(default_factory=dict)
    phi: dict = field(default_factory=dict)
    h: dict = field(default_factory=dict)
    mmax: int = 0
    rmax: int = 0


class TensorModule:
    """Tensor product of evaluation modules as explicit sparse matrices.

    Basis vectors are tuples of factor indices, enumerated with the last
    factor varying fastest.
    """

    def __init__(self, factors, e1, e0, k1):
        self.factors = list(factors)
        self.e1 = e1
        self.e0 = e0
        self.k1 = k1
        self.k1_inv = _diag_inverse(k1)
        self.states = list(cartesian(*[range(f.dim) for f in self.factors]))
        self.weights = [sum(f.weights[j] for f, j in zip(self.factors, st)) for st in self.states]
        self.drinfeld = None

    @property
    def dim(self):
        return self.k1.shape[0]

    def index(self, state):
        """Linear index of a tuple of factor indices."""
        return self.states.index(tuple(state))

    def basis_lweight(self, i):
        """Product of the factor l-weights of basis vector ``i``."""
        return reduce(lambda a, b: a * b, (f.lweights[j] for f, j in zip(self.factors, self.states[i])))

    def weight_blocks(self):
        """``{k1-exponent: [indices]}`` in decreasing weight order."""
        blocks = {}
        for i, w in enumerate(self.weights):
            blocks.setdefault(w, []).append(i)
        return {w: blocks[w] for w in sorted(blocks, reverse=True)}

    def __repr__(self):
        return f"TensorModule({', '.join(f.describe() for f in self.factors)}; dim={self.dim})"


def tensor(mods):
    """Tensor product built from the coproduct, factor 0 leftmost.

    Raises:
        DimensionBoundError: beyond QCHAR_MAX_TENSOR_DIM.
    """
    mods = list(mods)
    if not mods:
        raise ValueError("tensor product of an empty list of modules")
    total = 1
    for m in mods:
        total *= m.dim
    if total > settings.MAX_TENSOR_DIM:
        raise DimensionBoundError(f"tensor dimension {total} exceeds QCHAR_MAX_TENSOR_DIM={settings.MAX_TENSOR_DIM}")
    e1, e0, k1 = mods[0].e1, mods[0].e0, mods[0].k1
    for m in mods[1:]:
        right_id = SparseMatrix.identity(m.dim)
        e1 = e1.kron(right_id) + k1.kron(m.e1)
        e0 = e0.kron(right_id) + _diag_inverse(k1).kron(m.e0)
        k1 = k1.kron(m.k1)
    t = TensorModule(mods, e1, e0, k1)
    logger.debug(f"Built {t}")
    return t


def standard_tensor(exponents, normalized=True):
    """S~ = L(Y~_{q^{e_0}}) (x) L(Y~_{q^{e_1}}) (x) ... from two-dimensional factors."""
    return tensor([make_eval_module(1, e, normalized=normalized) for e in exponents])


def _log_coefficients(ps, rmax):
    """Coefficients l_1..l_rmax of log(1 + p_1 z + p_2 z^2 + ...), matrices commuting."""
    logs = {}
    for m in range(1, rmax + 1):
        acc = ps[m].scale(QFIELD(m))
        for j in range(1, m):
            acc = acc - logs[j].matmul(ps[m - j]).scale(QFIELD(j))
        logs[m] = acc.scale(QFIELD.one / QFIELD(m))
    return logs


def derive_drinfeld(t, mmax, rmax, check=True):
    """Derive x_m^+, x_m^-, phi_m^+ and h_r on ``t``.

    x_0^+ = e1, x_1^- = k1 e0, h_1 = k1^{-1} [x_0^+, x_1^-];
    x_{m+1}^{+-} = +-[h_1, x_m^{+-}] / [2];
    phi_m = (q - q^{-1}) [x_0^+, x_m^-];
    h_r from the logarithm of k1^{-1} phi(z).

    Raises:
        InconsistencyError: if a Drinfeld relation fails as a matrix identity.
    """
    if mmax < 1 or rmax < 1:
        raise ValueError("mmax and rmax must be >= 1")
    cached = t.drinfeld
    if cached is not None and cached.mmax >= mmax and cached.rmax >= rmax:
        return cached
    top = max(mmax, rmax)
    two = _qint(2)
    cache = DrinfeldCache(mmax=mmax, rmax=rmax)
    cache.xplus[0] = t.e1
    cache.xminus[1] = t.k1.matmul(t.e0)
    h1 = t.k1_inv.matmul(t.e1.commutator(cache.xminus[1]))
    for m in range(0, top + 1):
        cache.xplus[m + 1] = h1.commutator(cache.xplus[m]).scale(QFIELD.one / two)
    for m in range(1, top + 1):
        cache.xminus[m + 1] = h1.commutator(cache.xminus[m]).scale(-QFIELD.one / two)
    cache.phi[0] = t.k1
    for m in range(1, rmax + 1):
        cache.phi[m] = t.e1.commutator(cache.xminus[m]).scale(QQ_DIFF.elem)
    ps = {m: t.k1_inv.matmul(cache.phi[m]) for m in range(1, rmax + 1)}
    logs = _log_coefficients(ps, rmax)
    cache.h = {r: logs[r].scale(QFIELD.one / QQ_DIFF.elem) for r in range(1, rmax + 1)}
    if cache.h[1] != h1:
        raise InconsistencyError("h_1 from the logarithm differs from k1^{-1}[x_0^+, x_1^-]")
    if check:
        _check_drinfeld(cache, top)
    t.drinfeld = cache
    logger.debug(f"Derived Drinfeld generators on {t} up to m={mmax}, r={rmax}")
    return cache


def _check_drinfeld(cache, top):
    h = cache.h
    for r in h:
        for s in h:
            if s > r and not h[r].commutator(h[s]).is_zero():
                raise InconsistencyError(f"[h_{r}, h_{s}] != 0")
    for r in h:
        c = q_number(2 * r).elem / r
        for m in range(0, top + 2 - r):
            if m + r in cache.xplus and h[r].commutator(cache.xplus[m]) != cache.xplus[m + r].scale(c):
                raise InconsistencyError(f"[h_{r}, x_{m}^+] != [{2 * r}]/{r} x_{m + r}^+")
        for m in range(1, top + 2 - r):
            if m + r in cache.xminus and h[r].commutator(cache.xminus[m]) != cache.xminus[m + r].scale(-c):
                raise InconsistencyError(f"[h_{r}, x_{m}^-] != -[{2 * r}]/{r} x_{m + r}^-")
    for m in range(2, max(cache.phi) + 1):
        other = cache.xplus[1].commutator(cache.xminus[m - 1]).scale(QQ_DIFF.elem)
        if other != cache.phi[m]:
            raise InconsistencyError(f"phi_{m} differs from (q - q^-1)[x_1^+, x_{m - 1}^-]")


def check_relations(module):
    """Cartan conjugation and q-Serre relations of e0, e1, k1 as matrix identities.

    Accepts an EvalModule or a TensorModule; returns ``{relation: bool}``.
    """
    k1, e1, e0 = module.k1, module.e1, module.e0
    k1_inv = _diag_inverse(k1)
    q2 = Q**2
    results = {
        "k1 e1 k1^-1 = q^2 e1": k1.matmul(e1).matmul(k1_inv) == e1.scale(q2),
        "k1 e0 k1^-1 = q^-2 e0": k1.matmul(e0).matmul(k1_inv) == e0.scale(1 / q2),
    }
    three = _qint(3)
    for name, a, b in (("e1", e1, e0), ("e0", e0, e1)):
        a2 = a.matmul(a)
        a3 = a2.matmul(a)
        serre = a3.matmul(b) - a2.matmul(b).matmul(a).scale(three) + a.matmul(b).matmul(a2).scale(three) - b.matmul(a3)
        results[f"q-Serre({name})"] = serre.is_zero()
    return results


def _candidate_groups(t, block, rmax):
    """Distinct candidate l-weights of a weight block keyed by their series coefficients."""
    groups = {}
    for i in block:
        psi = t.basis_lweight(i)
        coeffs = tuple(c.elem for c in series_coeffs(psi, rmax)[1:])
        groups.setdefault(coeffs, set()).add(psi)
    for coeffs, lws in groups.items():
        if len(lws) > 1:
            names = ", ".join(sorted(lw.to_text() for lw in lws))
            raise UnmatchedEigenvalueError(f"candidates {names} agree up to r={rmax}; raise rmax")
    return {coeffs: next(iter(lws)) for coeffs, lws in groups.items()}


def _diagonal_multiplicities(mats, candidates):
    """Count diagonal tuples when every matrix is triangular on the same side.

    Commuting matrices that are triangular in a common basis have joint
    generalized eigenspaces of dimension equal to the number of matching
    diagonal tuples. Returns None when the shortcut does not apply.
    """
    for below in (True, False):
        if all((j <= i) == below or i == j for m in mats for i, row in m.rows.items() for j in row):
            break
    else:
        return None
    out = {}
    for i in range(mats[0].shape[0]):
        diag = [m.get(i, i) for m in mats]
        matches = [psi for values, psi in candidates if values == diag]
        if not matches:
            raise UnmatchedEigenvalueError(f"diagonal entry {i} matches no candidate l-weight")
        if len(matches) > 1:
            return None
        out[matches[0]] = out.get(matches[0], 0) + 1
    return out


def _block_multiplicities(mats, block, groups, q0=None):
    candidates = []
    for coeffs, psi in groups.items():
        values = list(coeffs)
        if q0 is not None:
            values = [to_qq(specialize_elem(v, q0)) for v in values]
        candidates.append((values, psi))
    found = _diagonal_multiplicities(mats, candidates)
    if found is not None:
        return found
    logger.debug(f"weight block of size {len(block)} is not triangular; using generalized kernels")
    out = {}
    for values, psi in candidates:
        kernel = joint_generalized_kernel(mats, values, max_power=len(block))
        if kernel:
            out[psi] = len(kernel)
    return out


def lweight_decomposition(t, rmax=None, qmode=None):
    """l-weights of ``t`` with multiplicities, as a list of (LWeight, int).

    phi_1..phi_rmax are restricted to each k1-weight space. When they are
    triangular in the tensor basis the multiplicities are read off the
    diagonal; otherwise every candidate l-weight (product of factor
    l-weights) is tested through its joint generalized eigenspace. With ``qmode = (a, b)`` the computation runs at
    q = a and q = b and both must agree.

    Raises:
        UnmatchedEigenvalueError: if the multiplicities found in a weight
            space do not add up to its dimension.
    """
    rmax = len(t.factors) if rmax is None else rmax
    rmax = max(rmax, 1)
    cache = derive_drinfeld(t, rmax, rmax, check=False)
    totals = {}
    for w, block in t.weight_blocks().items():
        mats = [cache.phi[m].restrict(block, block) for m in range(1, rmax + 1)]
        groups = _candidate_groups(t, block, rmax)
        if qmode is None:
            found = _block_multiplicities(mats, block, groups)
        else:
            runs = []
            for q0 in qmode:
                runs.append(_block_multiplicities([m.specialize(q0) for m in mats], block, groups, q0))
            if runs[0] != runs[1]:
                raise UnmatchedEigenvalueError(f"specializations {qmode} disagree in weight {w}")
            found = runs[0]
        if sum(found.values()) != len(block):
            raise UnmatchedEigenvalueError(
                f"weight {w}: multiplicities {sum(found.values())} do not fill dimension {len(block)}"
            )
        for psi, n in found.items():
            totals[psi] = totals.get(psi, 0) + n
    result = sorted(totals.items(), key=lambda item: (-item[0].wt, item[0].to_text()))
    logger.info(f"l-weight decomposition of {t}: {len(result)} distinct l-weights")
    return result


def lweights_to_series(decomposition, window, degcap):
    """Normalized q-character of a decomposition, relative to its highest l-weight."""
    top = max(decomposition, key=lambda item: item[0].wt)[0]
    terms = {}
    for psi, n in decomposition:
        key = _a_inverse_key(psi / top)
        terms[key] = terms.get(key, 0) + n
    return QCharSeries(terms, window, degcap)


def _a_inverse_key(ratio):
    """A-indices of an l-weight that is a product of A^{-1}'s."""
    mono = ratio.to_y_monomial()
    if mono is None:
        raise UnmatchedEigenvalueError(f"{ratio.to_text()} is not a product of A^{{-1}}")
    rs = []
    # peel A^{-1} factors from the top exponent downwards
    exps = {r: e for (_, _, r), e in mono.items()}
    for _ in range(4 * settings.MAX_SPECTRAL):
        if not exps:
            break
        r = max(exps)
        if exps[r] > 0:
            raise UnmatchedEigenvalueError(f"{ratio.to_text()} is not a product of A^{{-1}}")
        a = r - 1
        n = -exps[r]
        rs.extend([a] * n)
        for t in (a - 1, a + 1):
            exps[t] = exps.get(t, 0) + n
        exps = {k: v for k, v in exps.items() if v}
    if exps:
        raise UnmatchedEigenvalueError(f"{ratio.to_text()} is not a product of A^{{-1}}")
    return tuple(sorted(rs, reverse=True))


def matrix_dump(matrix):
    """JSON dense row-major dump with QScalar strings."""
    return matrix.dump()
