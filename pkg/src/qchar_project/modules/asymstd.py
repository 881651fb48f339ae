"""
The asymptotic standard module T of a negative l-weight.

T has basis v_J over finite sets J of slots. Slots are the Y-factors of the
standard sequence of Psi, listed by decreasing spectral exponent and then by
slot number; slot positions are their indices in that list. A state whose
largest position is i0 is acted on inside S~_{i0+1} (the tensor product of
the first i0+1 normalized two-dimensional factors), with the remaining
factors collapsed into a one-dimensional tail l-weight.
"""
import logging
from itertools import combinations

from qchar_project.algebra.linalg import SparseMatrix, joint_generalized_kernel, rref
from qchar_project.algebra.lweights import a_inverse, factor_negative, normalize, psi_of, y_of
from qchar_project.algebra.qscalar import QFIELD, QScalar
from qchar_project.algebra.qseries import QCharSeries
from qchar_project.algebra.ymonomials import SubsetIndex, subset_leq
from qchar_project.config import settings
from qchar_project.errors import (
    DiagonalizationError,
    InconsistencyError,
    TruncationError,
    WeightError,
)
from qchar_project.modules.tensorsim import derive_drinfeld, standard_tensor

logger = logging.getLogger(__name__)


class TModule:
    """Slot structure and truncated actions of T for a negative l-weight.

    Args:
        psi (LWeight): A negative l-weight, Psi_{q^0}^{-1} by default.
        depth (int): Largest |J| tracked.
        window (int): Number of slot positions tracked.
    """

    def __init__(self, psi=None, depth=2, window=5):
        self.psi = psi_of(0, -1) if psi is None else psi
        self.factorization = factor_negative(self.psi)
        self.depth = depth
        self.window = window
        self._ys = self.factorization.y_exponents()
        tops = list(self._ys) + [p - 1 for p in self.factorization.psis]
        self.top_exponent = max(tops) if tops else None
        self._slots = []
        self._next_exponent = self.top_exponent
        self._tensors = {}

    def multiplicity(self, e):
        """Number of slots at spectral exponent ``e``."""
        count = self._ys.count(e)
        for p, b in self.factorization.psis.items():
            if p - 1 >= e and (p - 1 - e) % 2 == 0:
                count += b
        return count

    def is_finite(self):
        return self.factorization.is_finite()

    def n_slots(self):
        """Total number of slots, or None when there are infinitely many."""
        return len(self._ys) if self.is_finite() else None

    def _extend(self, n):
        """Enumerate slots until ``n`` positions exist (or the slots run out)."""
        if self.top_exponent is None:
            return
        while len(self._slots) < n:
            e = self._next_exponent
            if self.is_finite() and e < min(self._ys):
                return
            j = (self.top_exponent - e) // 2
            for k in range(1, self.multiplicity(e) + 1):
                self._slots.append((j, k, e))
            self._next_exponent = e - 2

    def slot(self, position):
        """``(depth j, slot k, exponent e)`` of a position."""
        self._extend(position + 1)
        if position >= len(self._slots):
            raise TruncationError(f"position {position} does not exist for {self.psi.to_text()}")
        return self._slots[position]

    def exponent(self, position):
        return self.slot(position)[2]

    def position(self, element):
        j, k = element
        if self.top_exponent is None or not 1 <= k <= self.multiplicity(self.top_exponent - 2 * j):
            raise TruncationError(f"slot {element} does not exist for {self.psi.to_text()}")
        return sum(self.multiplicity(self.top_exponent - 2 * i) for i in range(j)) + k - 1

    def positions(self, J):
        return [self.position(el) for el in J]

    def subset(self, positions):
        return SubsetIndex([self.slot(p)[:2] for p in positions])

    def subsets(self, depth=None, window=None, size=None):
        """Tracked subsets, sorted by size and then by the subset order."""
        depth = self.depth if depth is None else depth
        window = self.window if window is None else window
        if self.is_finite():
            window = min(window, self.n_slots())
        sizes = range(depth + 1) if size is None else [size]
        out = []
        for n in sizes:
            for combo in combinations(range(window), n):
                out.append(self.subset(combo))
        return sorted(out)

    def lweight_of(self, J):
        """Psi * prod over slots of A_{e+1}^{-1}."""
        result = self.psi
        for p in self.positions(J):
            result = result * a_inverse(self.exponent(p) + 1)
        return result

    def tail_lweight(self, n):
        """Normalized Psi divided by the first n slot factors Y~_{e_p}."""
        result = normalize(self.psi)
        for p in range(n):
            result = result * normalize(y_of(self.exponent(p))).inverse()
        return result

    def tensor_for(self, n):
        if n not in self._tensors:
            if 2**n > settings.MAX_TENSOR_DIM:
                raise TruncationError(f"S~_{n} exceeds QCHAR_MAX_TENSOR_DIM={settings.MAX_TENSOR_DIM}")
            self._tensors[n] = standard_tensor([self.exponent(p) for p in range(n)])
        return self._tensors[n]

    def _check_tracked(self, J):
        if len(J) > self.depth:
            raise TruncationError(f"|{J}| exceeds the tracked depth {self.depth}")
        if J and max(self.positions(J)) >= self.window:
            raise TruncationError(f"{J} leaves the tracked window of {self.window} positions")

    def _vector_index(self, positions, n):
        idx = 0
        for p in positions:
            idx += 2 ** (n - 1 - p)
        return idx

    def _subset_of_index(self, idx, n):
        return self.subset([p for p in range(n) if idx & (1 << (n - 1 - p))])

    def _act_matrix(self, matrix, J, n):
        vec = {self._vector_index(self.positions(J), n): QFIELD.one}
        return {self._subset_of_index(i, n): v for i, v in matrix.apply(vec).items()}

    def basis(self, J):
        return TState(self, {SubsetIndex(J) if not isinstance(J, SubsetIndex) else J: QScalar(1)})

    def __repr__(self):
        return f"TModule({self.psi.to_text()}, depth={self.depth}, window={self.window})"


class TState:
    """A finite combination of basis vectors v_J of a TModule."""

    __slots__ = ("module", "coeffs")

    def __init__(self, module, coeffs=None):
        self.module = module
        self.coeffs = {}
        for J, c in (coeffs or {}).items():
            c = c if isinstance(c, QScalar) else QScalar(c)
            if c:
                self.coeffs[J] = self.coeffs.get(J, QScalar(0)) + c
        self.coeffs = {J: c for J, c in self.coeffs.items() if c}

    def support(self):
        return sorted(self.coeffs)

    def coefficient(self, J):
        return self.coeffs.get(J, QScalar(0))

    def is_zero(self):
        return not self.coeffs

    def __add__(self, other):
        out = dict(self.coeffs)
        for J, c in other.coeffs.items():
            out[J] = out.get(J, QScalar(0)) + c
        return TState(self.module, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return TState(self.module, {J: v * c for J, v in self.coeffs.items()})

    def __eq__(self, other):
        if not isinstance(other, TState):
            return NotImplemented
        return self.coeffs == other.coeffs

    def to_json(self):
        return [{"subset": J.to_text(), "coeff": str(c)} for J, c in sorted(self.coeffs.items())]

    def __str__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"({c}) v{J}" for J, c in sorted(self.coeffs.items()))

    def __repr__(self):
        return f"TState({self})"


def act_k(v, normalized=True):
    """k1 v_J = q^{-2|J|} v_J, times q^{wt(Psi)} when ``normalized`` is False.

    Raises:
        WeightError: for a fractional weight part without normalization.
    """
    shift = 0
    if not normalized:
        wt = v.module.psi.wt
        if wt.denominator != 1:
            raise WeightError(f"q^{wt} is not in Q(q)")
        shift = int(wt)
    return TState(v.module, {J: c * QScalar.q_power(shift - 2 * len(J)) for J, c in v.coeffs.items()})


def _i0(module, J):
    return max(module.positions(J)) if J else -1


def act_xplus(m, v, pad=0):
    """x_m^+ on v, each v_J computed inside S~_{i0+1+pad}.

    Raises:
        TruncationError: if a state leaves the tracked truncation.
    """
    if m < 0:
        raise ValueError("x_m^+ needs m >= 0")
    mod = v.module
    out = {}
    for J, c in v.coeffs.items():
        mod._check_tracked(J)
        if not J:
            continue
        n = _i0(mod, J) + 1 + pad
        cache = derive_drinfeld(mod.tensor_for(n), max(m, 1), 1, check=False)
        for K, value in mod._act_matrix(cache.xplus[m], J, n).items():
            out[K] = out.get(K, QScalar(0)) + c * QScalar.from_elem(value)
    return TState(mod, out)


def act_h(r, v, pad=0):
    """h_r on v: inside S~_{i0+1+pad} plus the tail scalar.

    The tail scalar is the h_r-eigenvalue of ``tail_lweight(i0+1+pad)``; for
    Psi_{q^0}^{-1} it equals q^{-2(i0+1+pad)r} / (r (q - q^{-1})).

    Raises:
        TruncationError: if a state leaves the tracked truncation.
    """
    if r < 1:
        raise ValueError("h_r needs r >= 1")
    mod = v.module
    out = {}
    for J, c in v.coeffs.items():
        mod._check_tracked(J)
        n = _i0(mod, J) + 1 + pad
        tail = mod.tail_lweight(n).h_coefficient(r)
        out[J] = out.get(J, QScalar(0)) + c * tail
        if n == 0:
            continue
        cache = derive_drinfeld(mod.tensor_for(n), r, r, check=False)
        for K, value in mod._act_matrix(cache.h[r], J, n).items():
            out[K] = out.get(K, QScalar(0)) + c * QScalar.from_elem(value)
    return TState(mod, out)


def _lower_range(module, J):
    """Positions 0..max(J): lowering only moves toward the left factors."""
    ps = module.positions(J)
    return (0, max(ps)) if ps else None


def triangularity_report(depth, window, rmax=3, psi=None):
    """Check that h_r v_J lies in C v_J + sum over K < J with max(K) <= max(J).

    Returns:
        dict: ``checked``, ``violations`` (list of dicts) and ``passed``.
    """
    mod = TModule(psi, depth, window)
    violations = []
    checked = 0
    for J in mod.subsets():
        bounds = _lower_range(mod, J)
        for r in range(1, rmax + 1):
            checked += 1
            for K in act_h(r, mod.basis(J)).support():
                if K == J:
                    continue
                inside = bounds is not None and all(bounds[0] <= p <= bounds[1] for p in mod.positions(K))
                if len(K) != len(J) or not inside or not subset_leq(K, J):
                    violations.append({"r": r, "J": J.to_text(), "K": K.to_text()})
    logger.info(f"Triangularity on depth {depth}, window {window}: {len(violations)} violations")
    return {"checked": checked, "violations": violations, "passed": not violations}


def _h_matrix(mod, basis, r):
    pos = {J: i for i, J in enumerate(basis)}
    rows = {}
    for j, J in enumerate(basis):
        for K, c in act_h(r, mod.basis(J)).coeffs.items():
            rows.setdefault(pos[K], {})[j] = c.elem
    return SparseMatrix(rows, (len(basis), len(basis)))


def _lweight_block(mod, basis, rmax):
    """Unitriangular l-weight vectors of one |J|-block."""
    mats = [_h_matrix(mod, basis, r) for r in range(1, rmax + 1)]
    groups = {}
    for i, J in enumerate(basis):
        diag = tuple(m.get(i, i) for m in mats)
        expected = tuple(normalize(mod.lweight_of(J)).h_coefficient(r).elem for r in range(1, rmax + 1))
        if diag != expected:
            raise DiagonalizationError(f"h-eigenvalues on v{J} do not match the l-weight {mod.lweight_of(J)}")
        groups.setdefault(diag, []).append(i)
    n = len(basis)
    result = {}
    for values, members in groups.items():
        kernel = joint_generalized_kernel(mats, list(values), max_power=len(members) + 1)
        if len(kernel) != len(members):
            raise DiagonalizationError(
                f"generalized eigenspace of dimension {len(kernel)} for {len(members)} subsets"
            )
        # columns in decreasing subset order, so pivots are leading subsets
        flipped = SparseMatrix(
            {a: {n - 1 - i: v for i, v in vec.items()} for a, vec in enumerate(kernel)},
            (len(kernel), n),
        )
        rows, pivots = rref(flipped)
        pivot_members = sorted(n - 1 - p for p in pivots)
        if pivot_members != sorted(members):
            raise DiagonalizationError("eigenvectors are not unitriangular in the subset order")
        for row, p in zip(rows, pivots):
            J = basis[n - 1 - p]
            result[J] = TState(mod, {basis[n - 1 - c]: QScalar.from_elem(v) for c, v in row.items()})
    return result


def lweight_basis(depth, window, rmax=3, psi=None):
    """Unitriangular l-weight basis w_J in v_J + span{v_K : K < J}.

    Raises:
        DiagonalizationError: if triangularity or the eigenvalue formula fails.
    """
    return _lweight_basis(TModule(psi, depth, window), rmax)


def _lweight_basis(mod, rmax):
    result = {}
    for size in range(mod.depth + 1):
        basis = mod.subsets(size=size)
        if basis:
            result.update(_lweight_block(mod, basis, rmax))
    logger.info(f"l-weight basis of {mod}: {len(result)} vectors")
    return result


def change_of_basis(depth, window, rmax=3, psi=None):
    """v -> w matrices per |J|-block: row J holds the coordinates of w_J."""
    mod = TModule(psi, depth, window)
    wbasis = _lweight_basis(mod, rmax)
    blocks = []
    for size in range(depth + 1):
        basis = mod.subsets(size=size)
        if not basis:
            continue
        pos = {J: i for i, J in enumerate(basis)}
        rows = {}
        for i, J in enumerate(basis):
            rows[i] = {pos[K]: c.elem for K, c in wbasis[J].coeffs.items()}
        matrix = SparseMatrix(rows, (len(basis), len(basis)))
        blocks.append({
            "size": size,
            "subsets": [J.to_text() for J in basis],
            "lweights": [mod.lweight_of(J).to_text() for J in basis],
            "matrix": matrix.to_dense_strings(),
        })
    return {"psi": mod.psi.to_text(), "depth": depth, "window": window, "blocks": blocks}


def qchar_T(psi, window, degcap):
    """q-character of T relative to Psi, from subsets of slots inside the window."""
    mod = TModule(psi, degcap, 0)
    rmin, rmax = window
    positions = []
    p = 0
    while True:
        try:
            e = mod.exponent(p)
        except TruncationError:
            break
        if e + 1 < rmin:
            break
        if e + 1 <= rmax:
            positions.append(p)
        p += 1
    terms = {}
    for size in range(min(degcap, len(positions)) + 1):
        for combo in combinations(positions, size):
            key = tuple(sorted((mod.exponent(q) + 1 for q in combo), reverse=True))
            terms[key] = terms.get(key, 0) + 1
    return QCharSeries(terms, window, degcap)


def xminus_divergence_witness(N):
    """Coefficients of v_{k}, k = 0..N, in x_1^- v_empty inside S~_{N+1}.

    Raises:
        InconsistencyError: if a coefficient differs from q^{-2k-1}.
    """
    t = standard_tensor([-2 * p - 1 for p in range(N + 1)])
    xminus = t.k1.matmul(t.e0)
    column = xminus.apply({0: QFIELD.one})
    coefficients = []
    for k in range(N + 1):
        idx = 2 ** (N - k)
        value = QScalar.from_elem(column.get(idx, QFIELD.zero))
        if value != QScalar.q_power(-2 * k - 1):
            raise InconsistencyError(f"coefficient of v{{{k}}} is {value}, expected q^{-2 * k - 1}")
        coefficients.append(value)
    logger.info(f"x_1^- v_empty in S~_{N + 1}: all {N + 1} coefficients nonzero")
    return coefficients


def stability_report(max_position, mmax=3, rmax=3, psi=None):
    """Compare act_h and act_xplus computed in S~_{i0+1} and S~_{i0+2}.

    Returns:
        dict: ``checked``, ``mismatches`` and ``passed``.
    """
    mod = TModule(psi, max_position + 1, max_position + 1)
    mismatches = []
    checked = 0
    for J in mod.subsets():
        v = mod.basis(J)
        for r in range(1, rmax + 1):
            checked += 1
            if act_h(r, v) != act_h(r, v, pad=1):
                mismatches.append({"op": f"h_{r}", "J": J.to_text()})
        for m in range(0, mmax + 1):
            checked += 1
            if act_xplus(m, v) != act_xplus(m, v, pad=1):
                mismatches.append({"op": f"x_{m}^+", "J": J.to_text()})
    logger.info(f"Stability up to position {max_position}: {len(mismatches)} mismatches in {checked} checks")
    return {"checked": checked, "mismatches": mismatches, "passed": not mismatches}
