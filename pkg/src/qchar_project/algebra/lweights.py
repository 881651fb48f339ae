"""
l-weights of the Borel subalgebra of quantum affine sl2.

An l-weight is stored multiplicatively as

    psi(z) = q^wt * prod_{r in roots} (1 - q^r z) / prod_{r in poles} (1 - q^r z)

with ``wt`` an exact rational (the coefficient of the fundamental weight)
and roots/poles reduced multisets of integers.
"""
import json
import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from qchar_project.algebra.qscalar import QFIELD, Q, QQ_DIFF, QScalar
from qchar_project.algebra.ymonomials import A1, YMonomial, nakajima_leq
from qchar_project.errors import NotNegativeError, ParityError, ParseError, WeightError

logger = logging.getLogger(__name__)


class LWeight:
    """An l-weight (wt, roots, poles).

    Args:
        wt: Weight part, anything ``Fraction`` accepts.
        roots (iterable): Integer exponents r of factors (1 - q^r z).
        poles (iterable): Integer exponents r of factors (1 - q^r z)^{-1}.
    """

    __slots__ = ("wt", "roots", "poles")

    def __init__(self, wt=0, roots=(), poles=()):
        r, p = Counter(int(x) for x in roots), Counter(int(x) for x in poles)
        common = r & p
        r, p = r - common, p - common
        self.wt = Fraction(wt)
        self.roots = tuple(sorted(r.elements()))
        self.poles = tuple(sorted(p.elements()))

    @classmethod
    def trivial(cls):
        return cls()

    def is_trivial(self):
        return self.wt == 0 and not self.roots and not self.poles

    def __eq__(self, other):
        if not isinstance(other, LWeight):
            return NotImplemented
        return (self.wt, self.roots, self.poles) == (other.wt, other.roots, other.poles)

    def __hash__(self):
        return hash((self.wt, self.roots, self.poles))

    def __lt__(self, other):
        return (self.wt, self.roots, self.poles) < (other.wt, other.roots, other.poles)

    def __mul__(self, other):
        return LWeight(self.wt + other.wt, self.roots + other.roots, self.poles + other.poles)

    def inverse(self):
        return LWeight(-self.wt, self.poles, self.roots)

    def __truediv__(self, other):
        return self * other.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result = LWeight()
        for _ in range(n):
            result = result * self
        return result

    def series_coeffs(self, M):
        return series_coeffs(self, M)

    def h_coefficient(self, r):
        """The r-th coefficient of (q - q^{-1})^{-1} log(psi(z) / psi(0))."""
        if r < 1:
            raise ValueError("h_r is defined for r >= 1")
        total = QFIELD.zero
        for p in self.poles:
            total += Q ** (p * r)
        for p in self.roots:
            total -= Q ** (p * r)
        return QScalar.from_elem(total) / (QQ_DIFF * r)

    def to_y_monomial(self):
        """Express the l-weight as a Y-monomial, or return None if impossible.

        Y_s contributes the root s-1 and the pole s+1, so the Y-exponents are
        running sums of (#roots - #poles) along each parity class.
        """
        f = Counter(self.roots)
        f.subtract(Counter(self.poles))
        if not f:
            return YMonomial.one() if self.wt == 0 else None
        lo, hi = min(f), max(f)
        exps = {}
        running = {0: 0, 1: 0}
        for n in range(lo, hi + 1):
            running[n % 2] += f.get(n, 0)
            if running[n % 2]:
                exps[("Y", 1, n + 1)] = running[n % 2]
        if running[0] or running[1]:
            return None
        if sum(exps.values()) != self.wt:
            return None
        return YMonomial(exps)

    def to_text(self):
        """Canonical text: weight part then Psi factors by decreasing exponent."""
        counts = Counter(self.roots)
        counts.subtract(Counter(self.poles))
        parts = []
        if self.wt != 0:
            parts.append(f"[{self.wt}]")
        for r in sorted(counts, reverse=True):
            e = counts[r]
            if e:
                parts.append(f"Psi[{r}]" if e == 1 else f"Psi[{r}]^{e}")
        return " * ".join(parts) if parts else "1"

    def to_json(self):
        return {"wt": str(self.wt), "roots": list(self.roots), "poles": list(self.poles)}

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        return cls(Fraction(data["wt"]), data["roots"], data["poles"])

    @classmethod
    def parse(cls, text):
        return parse_lweight(text)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"LWeight({self.to_text()})"


def psi_of(r, sign=1):
    """Prefundamental l-weight Psi_{q^r}^{sign}."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return LWeight(0, (r,), ()) if sign == 1 else LWeight(0, (), (r,))


def y_of(r, check_parity=True):
    """Y_{q^r} = q * Psi_{q^{r+1}}^{-1} * Psi_{q^{r-1}}.

    Raises:
        ParityError: if ``r`` is even.
    """
    if check_parity and r % 2 == 0:
        raise ParityError(f"Y-variables live at odd exponents, got r={r}")
    return LWeight(1, (r - 1,), (r + 1,))


def a_inverse(r):
    """A_{q^r}^{-1} = (Y_{q^{r-1}} Y_{q^{r+1}})^{-1}, r even."""
    if r % 2 != 0:
        raise ParityError(f"A-variables live at even exponents, got r={r}")
    return (y_of(r - 1) * y_of(r + 1)).inverse()


def weight_of(w):
    """The one-dimensional l-weight [w]."""
    return LWeight(w)


def normalize(psi):
    """Drop the weight part: the normalized l-weight."""
    return LWeight(0, psi.roots, psi.poles)


@dataclass(frozen=True)
class NegFactorization:
    """[omega] * ystring * prod_p Psi_{q^p}^{-b_p}."""

    omega: Fraction
    ystring: YMonomial
    psis: dict = field(default_factory=dict)

    def recombine(self):
        result = LWeight(self.omega)
        for (_, _, r), e in self.ystring.items():
            result = result * (y_of(r, check_parity=False) ** e)
        for p, b in self.psis.items():
            result = result * (psi_of(p, -1) ** b)
        return result

    def y_exponents(self):
        """The Y-string as a sorted list of exponents, with repetition."""
        out = []
        for (_, _, r), e in self.ystring.items():
            out.extend([r] * e)
        return sorted(out)

    def is_finite(self):
        return not self.psis

    def to_text(self):
        parts = []
        if self.omega != 0:
            parts.append(f"[{self.omega}]")
        for r in sorted(self.y_exponents(), reverse=True):
            parts.append(f"Y[{r}]")
        for p in sorted(self.psis, reverse=True):
            parts.append(f"Psi[{p}]^-{self.psis[p]}")
        return " * ".join(parts) if parts else "1"


def factor_negative(psi):
    """Factor a negative l-weight as [omega] * (Y-string) * prod Psi^{-1}.

    Roots are scanned in decreasing order; a root r takes the nearest free
    pole r + 2k (k >= 1) and becomes the string Y_{q^{r+1}} ... Y_{q^{r+2k-1}}.
    Unpaired poles become Psi^{-1} factors.

    Raises:
        NotNegativeError: if some root has no partner pole.
    """
    poles = Counter(psi.poles)
    ys = {}
    for r in sorted(psi.roots, reverse=True):
        above = [p for p in poles if p > r and (p - r) % 2 == 0 and poles[p] > 0]
        if not above:
            raise NotNegativeError(
                f"{psi.to_text()} is not negative: root {r} has no pole at r + 2k above it"
            )
        top = min(above)
        poles[top] -= 1
        for s in range(r + 1, top, 2):
            key = ("Y", 1, s)
            ys[key] = ys.get(key, 0) + 1
    ystring = YMonomial(ys)
    omega = psi.wt - sum(ys.values())
    psis = {p: b for p, b in sorted(poles.items()) if b > 0}
    return NegFactorization(omega, ystring, psis)


def is_negative(psi):
    try:
        factor_negative(psi)
    except NotNegativeError:
        return False
    return True


def is_finite_dim_type(psi):
    """True iff psi is [omega] times a monomial in the Y-variables."""
    try:
        return factor_negative(psi).is_finite()
    except NotNegativeError:
        return False


def series_coeffs(psi, M):
    """First M+1 Taylor coefficients of psi(z) at z = 0.

    Raises:
        WeightError: if the weight part is not an integer (q^wt would not be
            an element of Q(q)).
    """
    if M < 0:
        raise ValueError("truncation order must be >= 0")
    if psi.wt.denominator != 1:
        raise WeightError(f"series of {psi.to_text()} needs q^{psi.wt}, which is not in Q(q)")
    coeffs = [Q ** int(psi.wt)] + [QFIELD.zero] * M
    for r in psi.roots:
        a = Q**r
        for k in range(M, 0, -1):
            coeffs[k] = coeffs[k] - a * coeffs[k - 1]
    for r in psi.poles:
        a = Q**r
        for k in range(1, M + 1):
            coeffs[k] = coeffs[k] + a * coeffs[k - 1]
    return [QScalar.from_elem(c) for c in coeffs]


def lweight_leq(psi1, psi2, cd=A1):
    """psi1 <= psi2 iff psi1 / psi2 is a product of A^{-1} l-weights."""
    x = (psi1 / psi2).to_y_monomial()
    if x is None:
        return False
    return nakajima_leq(x, YMonomial.one(), cd)


_LW_TOKEN = re.compile(
    r"\s*(?:\[\s*(?P<w>-?\d+(?:/\d+)?)\s*\]|(?P<kind>Y|Psi|A)\s*\[\s*(?P<r>-?\d+)\s*\]"
    r"(?:\s*\^\s*(?P<e>-?\d+))?)\s*"
)


def parse_lweight(text):
    """Parse ``[w] * Y[r]^e * Psi[r]^e * A[r]^e`` (any order, ``1`` for trivial).

    Raises:
        ParseError: with the offset of the first unparseable character.
    """
    if text.strip() == "1":
        return LWeight()
    result = LWeight()
    pos = 0
    while True:
        match = _LW_TOKEN.match(text, pos)
        if not match:
            raise ParseError("expected [w], Y[r], Psi[r] or A[r]", text, pos)
        if match.group("w") is not None:
            result = result * LWeight(Fraction(match.group("w")))
        else:
            kind, r = match.group("kind"), int(match.group("r"))
            e = int(match.group("e")) if match.group("e") is not None else 1
            try:
                if kind == "Y":
                    factor = y_of(r)
                elif kind == "Psi":
                    factor = psi_of(r, 1)
                else:
                    factor = a_inverse(r).inverse()
            except ParityError as err:
                raise ParseError(str(err), text, match.start("r"))
            result = result * (factor ** e)
        pos = match.end()
        if pos == len(text):
            return result
        if text[pos] != "*":
            raise ParseError("expected '*'", text, pos)
        pos += 1
