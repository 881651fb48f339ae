"""
Sparse exact matrices over sympy domains.

Matrices are dict-of-dicts ``{row: {col: value}}`` whose values are raw
domain elements (``QFIELD`` or ``QQ``). Elimination is delegated to
``DomainMatrix``; everything else is plain sparse bookkeeping.
"""
import json
import logging
from fractions import Fraction

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from qchar_project.algebra.qscalar import QFIELD, QScalar, specialize_elem

logger = logging.getLogger(__name__)


def _clean(rows):
    out = {}
    for i, row in rows.items():
        kept = {j: v for j, v in row.items() if v}
        if kept:
            out[i] = kept
    return out


class SparseMatrix:
    """Exact sparse matrix.

    Args:
        rows (dict): ``{i: {j: value}}`` with domain elements as values.
        shape (tuple): ``(nrows, ncols)``.
        domain: A sympy field, ``QFIELD`` by default.
    """

    __slots__ = ("rows", "shape", "domain")

    def __init__(self, rows, shape, domain=QFIELD):
        self.rows = _clean(rows)
        self.shape = tuple(shape)
        self.domain = domain

    @classmethod
    def zeros(cls, nrows, ncols=None, domain=QFIELD):
        return cls({}, (nrows, nrows if ncols is None else ncols), domain)

    @classmethod
    def identity(cls, n, domain=QFIELD):
        return cls({i: {i: domain.one} for i in range(n)}, (n, n), domain)

    @classmethod
    def diag(cls, values, domain=QFIELD):
        values = list(values)
        return cls({i: {i: v} for i, v in enumerate(values)}, (len(values), len(values)), domain)

    @classmethod
    def stack(cls, mats):
        """Stack matrices with equal column counts vertically."""
        rows, offset = {}, 0
        ncols = mats[0].shape[1]
        for m in mats:
            if m.shape[1] != ncols:
                raise ValueError("column counts differ")
            for i, row in m.rows.items():
                rows[offset + i] = dict(row)
            offset += m.shape[0]
        return cls(rows, (offset, ncols), mats[0].domain)

    def get(self, i, j):
        return self.rows.get(i, {}).get(j, self.domain.zero)

    def nnz(self):
        return sum(len(row) for row in self.rows.values())

    def is_zero(self):
        return not self.rows

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash((self.shape, frozenset((i, frozenset(r.items())) for i, r in self.rows.items())))

    def __neg__(self):
        return SparseMatrix({i: {j: -v for j, v in row.items()} for i, row in self.rows.items()},
                            self.shape, self.domain)

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        rows = {i: dict(row) for i, row in self.rows.items()}
        zero = self.domain.zero
        for i, row in other.rows.items():
            target = rows.setdefault(i, {})
            for j, v in row.items():
                target[j] = target.get(j, zero) + v
        return SparseMatrix(rows, self.shape, self.domain)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        if not c:
            return SparseMatrix.zeros(*self.shape, domain=self.domain)
        return SparseMatrix({i: {j: c * v for j, v in row.items()} for i, row in self.rows.items()},
                            self.shape, self.domain)

    def matmul(self, other):
        if self.shape[1] != other.shape[0]:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        zero = self.domain.zero
        rows = {}
        for i, row in self.rows.items():
            acc = {}
            for k, a in row.items():
                brow = other.rows.get(k)
                if not brow:
                    continue
                for j, b in brow.items():
                    acc[j] = acc.get(j, zero) + a * b
            rows[i] = acc
        return SparseMatrix(rows, (self.shape[0], other.shape[1]), self.domain)

    __matmul__ = matmul

    def commutator(self, other):
        return self.matmul(other) - other.matmul(self)

    def shifted(self, c):
        """Return ``self - c * I``."""
        return self - SparseMatrix.identity(self.shape[0], self.domain).scale(c)

    def power(self, p):
        result = SparseMatrix.identity(self.shape[0], self.domain)
        for _ in range(p):
            result = result.matmul(self)
        return result

    def apply(self, vec):
        """Multiply by a sparse column vector ``{j: value}``."""
        zero = self.domain.zero
        out = {}
        for i, row in self.rows.items():
            acc = zero
            for j, a in row.items():
                v = vec.get(j)
                if v:
                    acc += a * v
            if acc:
                out[i] = acc
        return out

    def column(self, j):
        return {i: row[j] for i, row in self.rows.items() if j in row}

    def kron(self, other):
        """Kronecker product; index ``i * n2 + k`` for the pair (i, k)."""
        n2, m2 = other.shape
        rows = {}
        for i, row in self.rows.items():
            for k, orow in other.rows.items():
                target = rows.setdefault(i * n2 + k, {})
                for j, a in row.items():
                    for l, b in orow.items():
                        target[j * m2 + l] = a * b
        return SparseMatrix(rows, (self.shape[0] * n2, self.shape[1] * m2), self.domain)

    def restrict(self, row_idx, col_idx):
        """Submatrix on the given (ordered) row and column indices."""
        col_pos = {c: p for p, c in enumerate(col_idx)}
        rows = {}
        for p, i in enumerate(row_idx):
            row = self.rows.get(i)
            if not row:
                continue
            rows[p] = {col_pos[j]: v for j, v in row.items() if j in col_pos}
        return SparseMatrix(rows, (len(row_idx), len(col_idx)), self.domain)

    def diagonal(self):
        return [self.get(i, i) for i in range(min(self.shape))]

    def specialize(self, q0):
        """Evaluate a ``QFIELD`` matrix at q = q0, giving a ``QQ`` matrix."""
        if self.domain is QQ:
            return self
        rows = {}
        for i, row in self.rows.items():
            rows[i] = {j: to_qq(specialize_elem(v, q0)) for j, v in row.items()}
        return SparseMatrix(rows, self.shape, QQ)

    def to_domain_matrix(self):
        rows = {i: dict(row) for i, row in self.rows.items()}
        return DomainMatrix(rows, self.shape, self.domain)

    def to_dense_strings(self):
        """Row-major dense list of strings (used by the JSON dumps)."""
        nrows, ncols = self.shape
        return [[_elem_str(self.get(i, j), self.domain) for j in range(ncols)] for i in range(nrows)]

    def dump(self):
        return json.dumps({"shape": list(self.shape), "rows": self.to_dense_strings()})

    def __repr__(self):
        return f"SparseMatrix(shape={self.shape}, nnz={self.nnz()}, domain={self.domain})"


def to_qq(value):
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def qq_to_fraction(value):
    return Fraction(int(value.numerator), int(value.denominator))


def _elem_str(value, domain):
    if domain is QQ:
        return str(qq_to_fraction(value))
    return str(QScalar.from_elem(value))


def _sdm_rows(dm):
    return {i: dict(row) for i, row in dm.to_sparse().rep.items()}


def rref(matrix):
    """Reduced row echelon form.

    Returns:
        tuple: (list of row dicts in pivot order, tuple of pivot columns).
    """
    if matrix.is_zero():
        return [], ()
    reduced, pivots = matrix.to_domain_matrix().rref()
    rows = _sdm_rows(reduced)
    return [rows[i] for i in sorted(rows)], tuple(pivots)


def rank(matrix):
    if matrix.is_zero():
        return 0
    return len(rref(matrix)[1])


def nullspace(matrix):
    """Basis of the right kernel as sparse vectors ``{col: value}``.

    The vector attached to a free column ``f`` has coordinate 1 at ``f``
    and zeros at the other free columns.
    """
    ncols = matrix.shape[1]
    rows, pivots = rref(matrix)
    pivot_set = set(pivots)
    basis = []
    one = matrix.domain.one
    for f in range(ncols):
        if f in pivot_set:
            continue
        vec = {f: one}
        for row, p in zip(rows, pivots):
            v = row.get(f)
            if v:
                vec[p] = -v
        basis.append(vec)
    return basis


def joint_generalized_kernel(mats, values, max_power=None):
    """Joint generalized kernel of ``(M_i - values[i])`` over commuting ``mats``.

    Follows the nullity chain: powers grow until the kernel dimension stops
    changing.

    Returns:
        list: Basis vectors of the kernel.
    """
    n = mats[0].shape[0]
    max_power = n if max_power is None else max_power
    shifted = [m.shifted(v) for m, v in zip(mats, values)]
    powers = list(shifted)
    previous = None
    for p in range(1, max_power + 1):
        kernel = nullspace(SparseMatrix.stack(powers))
        if previous is not None and len(kernel) == len(previous):
            return kernel
        if len(kernel) == 0:
            return kernel
        previous = kernel
        if p < max_power:
            powers = [pw.matmul(s) for pw, s in zip(powers, shifted)]
    return previous
