"""
Monomials in the variables Y_{i,q^r} and A_{i,q^r}.

Spectral parameters are integer powers of q, so a variable is keyed by
``(kind, node, r)`` with ``kind`` either ``"Y"`` or ``"A"``.
"""
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

from sympy import QQ

from qchar_project.algebra.linalg import SparseMatrix, qq_to_fraction, rref
from qchar_project.config import settings
from qchar_project.errors import (
    OrderSizeError,
    OverflowBoundError,
    ParityError,
    ParseError,
    UnknownNodeError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CartanData:
    """A finite-type Cartan matrix with its symmetrizer.

    Nodes are numbered from 1. ``C[j-1][i-1]`` is the entry C_{j,i}.
    """

    name: str
    C: tuple
    D: tuple

    def __post_init__(self):
        n = len(self.C)
        if len(self.D) != n or any(len(row) != n for row in self.C):
            raise ValueError(f"{self.name}: Cartan matrix and symmetrizer sizes differ")
        for i in range(n):
            if self.C[i][i] != 2:
                raise ValueError(f"{self.name}: diagonal entry C[{i}][{i}] is not 2")
            for j in range(n):
                if i != j and self.C[i][j] not in (0, -1, -2, -3):
                    raise ValueError(f"{self.name}: off-diagonal entry {self.C[i][j]} not allowed")
                if self.D[i] * self.C[i][j] != self.D[j] * self.C[j][i]:
                    raise ValueError(f"{self.name}: DC is not symmetric")

    @property
    def rank(self):
        return len(self.C)

    @property
    def nodes(self):
        return range(1, self.rank + 1)

    def entry(self, j, i):
        return self.C[j - 1][i - 1]

    def d(self, i):
        return self.D[i - 1]

    def check_node(self, i):
        if i not in self.nodes:
            raise UnknownNodeError(f"node {i} is not a node of type {self.name}")


A1 = CartanData("A1", ((2,),), (1,))
A2 = CartanData("A2", ((2, -1), (-1, 2)), (1, 1))
B2 = CartanData("B2", ((2, -1), (-2, 2)), (2, 1))
G2 = CartanData("G2", ((2, -1), (-3, 2)), (3, 1))

CARTAN_TYPES = {cd.name: cd for cd in (A1, A2, B2, G2)}


def _check_exponent(r):
    if abs(r) > settings.MAX_SPECTRAL:
        raise OverflowBoundError(f"spectral exponent {r} exceeds QCHAR_MAX_SPECTRAL={settings.MAX_SPECTRAL}")


class YMonomial:
    """A Laurent monomial in the Y and A variables.

    Args:
        exps (dict): ``{(kind, node, r): exponent}``; zero exponents are dropped.
    """

    __slots__ = ("_exps", "_hash")

    def __init__(self, exps=None):
        clean = {}
        for (kind, node, r), e in (exps or {}).items():
            if kind not in ("Y", "A"):
                raise ValueError(f"unknown variable kind {kind!r}")
            if e:
                _check_exponent(r)
                clean[(kind, int(node), int(r))] = int(e)
        self._exps = clean
        self._hash = None

    @classmethod
    def one(cls):
        return cls()

    @classmethod
    def y(cls, r, node=1, e=1):
        return cls({("Y", node, r): e})

    @classmethod
    def a(cls, r, node=1, e=1):
        return cls({("A", node, r): e})

    @classmethod
    def a_inverse_product(cls, rs, node=1):
        """Product of A_{node,r}^{-1} over the iterable ``rs`` (repeats allowed)."""
        exps = {}
        for r in rs:
            key = ("A", node, r)
            exps[key] = exps.get(key, 0) - 1
        return cls(exps)

    @property
    def exps(self):
        return dict(self._exps)

    def items(self):
        return sorted(self._exps.items())

    def exponent(self, kind, r, node=1):
        return self._exps.get((kind, node, r), 0)

    def is_one(self):
        return not self._exps

    def support(self):
        return sorted(self._exps)

    def a_degree(self):
        """Total A^{-1}-degree (A^{-1} counts +1)."""
        return -sum(e for (kind, _, _), e in self._exps.items() if kind == "A")

    def is_dominant(self):
        return all(e > 0 for e in self._exps.values())

    def is_antidominant(self):
        return all(e < 0 for e in self._exps.values())

    def __eq__(self, other):
        if not isinstance(other, YMonomial):
            return NotImplemented
        return self._exps == other._exps

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._exps.items()))
        return self._hash

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        """Deterministic key: A-degree first, then the sorted exponent list."""
        return (self.a_degree(), tuple((k, -e) for k, e in sorted(self._exps.items(), key=_display_order)))

    def __mul__(self, other):
        out = dict(self._exps)
        for key, e in other._exps.items():
            out[key] = out.get(key, 0) + e
        return YMonomial(out)

    def inverse(self):
        return YMonomial({key: -e for key, e in self._exps.items()})

    def __truediv__(self, other):
        return self * other.inverse()

    def __pow__(self, n):
        return YMonomial({key: e * n for key, e in self._exps.items()})

    def expand(self, cd=A1):
        """Rewrite every A-variable through ``a_monomial``, leaving only Y-variables."""
        result = YMonomial({key: e for key, e in self._exps.items() if key[0] == "Y"})
        for (kind, node, r), e in self._exps.items():
            if kind == "A":
                result = result * (a_monomial(node, r, cd, check_parity=False) ** e)
        return result

    def to_text(self, short=False):
        if not self._exps:
            return "1"
        parts = []
        for (kind, node, r), e in sorted(self._exps.items(), key=_display_order):
            var = f"{kind}[{r}]" if short else f"{kind}[{node},{r}]"
            parts.append(var if e == 1 else f"{var}^{e}")
        return " * ".join(parts)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"YMonomial({self.to_text()})"

    @classmethod
    def parse(cls, text):
        return parse_monomial(text)


def _display_order(item):
    (kind, node, r), _ = item
    # Y before A, higher spectral exponent first
    return (kind != "Y", node, -r)


def a_monomial(i, r, cd=A1, check_parity=True):
    """The Y-expansion of A_{i,q^r} for the Cartan data ``cd``.

    Raises:
        UnknownNodeError: if ``i`` is not a node of ``cd``.
        ParityError: for type A1 when ``r`` is odd.
    """
    cd.check_node(i)
    if check_parity and cd.rank == 1 and r % 2 != 0:
        raise ParityError(f"A-variables of type A1 live at even exponents, got r={r}")
    di = cd.d(i)
    exps = {("Y", i, r - di): 1}
    exps[("Y", i, r + di)] = exps.get(("Y", i, r + di), 0) + 1
    for j in cd.nodes:
        if j == i:
            continue
        c = cd.entry(j, i)
        if c == -1:
            shifts = (0,)
        elif c == -2:
            shifts = (-1, 1)
        elif c == -3:
            shifts = (-2, 0, 2)
        else:
            continue
        for s in shifts:
            key = ("Y", j, r + s)
            exps[key] = exps.get(key, 0) - 1
    return YMonomial(exps)


def weight(m, cd=A1):
    """Weight of a monomial as a tuple of Fractions in the fundamental-weight basis."""
    vec = [Fraction(0)] * cd.rank
    for (kind, node, _), e in m.items():
        cd.check_node(node)
        if kind == "Y":
            vec[node - 1] += e
        else:
            for j in cd.nodes:
                vec[j - 1] += e * cd.entry(j, node)
    return tuple(vec)


def root_weight(i, cd=A1):
    """alpha_i expressed in fundamental weights (column i of C)."""
    return tuple(Fraction(cd.entry(j, i)) for j in cd.nodes)


def nakajima_leq(m, m2, cd=A1):
    """Decide m <= m2, i.e. whether m / m2 is a product of A^{-1} factors.

    The quotient is expanded into Y-variables and the exponents of candidate
    A-variables are solved for exactly over QQ. Only A-variables whose
    Y-expansion can touch the quotient's support are candidates.
    """
    x = (m / m2).expand(cd)
    if x.is_one():
        return True
    support = x.support()
    lo = min(r for _, _, r in support) - 3
    hi = max(r for _, _, r in support) + 3
    candidates = [(j, b) for j in cd.nodes for b in range(lo, hi + 1)]
    columns = [a_monomial(j, b, cd, check_parity=False) for j, b in candidates]

    row_keys = sorted({key for col in columns for key in col.support()} | set(support))
    row_pos = {key: p for p, key in enumerate(row_keys)}
    rhs = len(columns)
    rows = {}
    for c, col in enumerate(columns):
        for key, e in col.items():
            rows.setdefault(row_pos[key], {})[c] = QQ(e)
    for key, e in x.items():
        rows.setdefault(row_pos[key], {})[rhs] = QQ(e)
    reduced, pivots = rref(SparseMatrix(rows, (len(row_keys), rhs + 1), QQ))
    if rhs in pivots:
        return False
    for row, p in zip(reduced, pivots):
        value = qq_to_fraction(row.get(rhs, QQ(0)))
        if value.denominator != 1 or value > 0:
            return False
    return True


@total_ordering
class SubsetIndex:
    """A finite set of slots (j, k): depth j >= 0 below the top exponent, slot k >= 1.

    Elements are ordered lexicographically as pairs, which matches the left to
    right order of tensor factors. A bare integer j stands for (j, 1).
    """

    __slots__ = ("_elements",)

    def __init__(self, elements=()):
        pairs = set()
        for el in elements:
            pair = (int(el), 1) if isinstance(el, int) else (int(el[0]), int(el[1]))
            if pair[0] < 0 or pair[1] < 1:
                raise ValueError(f"invalid slot {el!r}")
            pairs.add(pair)
        self._elements = tuple(sorted(pairs))

    @property
    def elements(self):
        return self._elements

    def depths(self):
        return [j for j, _ in self._elements]

    def __len__(self):
        return len(self._elements)

    def __iter__(self):
        return iter(self._elements)

    def __contains__(self, item):
        pair = (item, 1) if isinstance(item, int) else tuple(item)
        return pair in self._elements

    def __eq__(self, other):
        if not isinstance(other, SubsetIndex):
            return NotImplemented
        return self._elements == other._elements

    def __hash__(self):
        return hash(self._elements)

    def __lt__(self, other):
        """Order used for sorting: size first, then the subset order."""
        return (len(self), self._elements) < (len(other), other._elements)

    def max_element(self):
        return self._elements[-1] if self._elements else None

    def to_text(self):
        if all(k == 1 for _, k in self._elements):
            return "{" + ",".join(str(j) for j, _ in self._elements) + "}"
        return "{" + ",".join(f"({j},{k})" for j, k in self._elements) + "}"

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"SubsetIndex({self.to_text()})"


def subset_leq(J, K):
    """Lexicographic order on equal-size subsets.

    Raises:
        OrderSizeError: if the subsets differ in size.
    """
    if len(J) != len(K):
        raise OrderSizeError(f"cannot compare subsets of sizes {len(J)} and {len(K)}")
    return J.elements <= K.elements


_TOKEN = re.compile(r"\s*(Y|A)\s*\[\s*(-?\d+)\s*(?:,\s*(-?\d+)\s*)?\]\s*(?:\^\s*(-?\d+))?\s*")


def parse_monomial(text):
    """Parse ``Y[i,r]^e * A[i,r]^e`` (or the sl2 shorthand ``Y[r]``).

    Raises:
        ParseError: with the offset of the first unparseable character.
    """
    stripped = text.strip()
    if stripped == "1":
        return YMonomial.one()
    exps = {}
    pos = 0
    while True:
        match = _TOKEN.match(text, pos)
        if not match:
            raise ParseError("expected Y[...] or A[...]", text, pos)
        kind, first, second, power = match.groups()
        node, r = (int(first), int(second)) if second is not None else (1, int(first))
        key = (kind, node, r)
        exps[key] = exps.get(key, 0) + (int(power) if power is not None else 1)
        pos = match.end()
        if pos == len(text):
            break
        if text[pos] != "*":
            raise ParseError("expected '*'", text, pos)
        pos += 1
    return YMonomial(exps)
