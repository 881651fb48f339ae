"""
Truncated formal sums of A^{-1}-monomials.

A term is keyed by the multiset of A-indices it contains, stored as a
tuple sorted in decreasing order: ``(0, -2, -2)`` is A_0^{-1} A_{-2}^{-2}.
A series only tracks terms whose indices lie in ``window`` and whose total
degree is at most ``degcap``.
"""
import logging
import re

from qchar_project.algebra.ymonomials import YMonomial
from qchar_project.config import settings
from qchar_project.errors import (
    OverflowBoundError,
    ParityError,
    ParseError,
    StabilizationError,
    UntrackedRegionError,
)

logger = logging.getLogger(__name__)


def monomial_key(m):
    """Convert an A^{-1}-monomial (YMonomial or iterable of indices) to a key."""
    if isinstance(m, YMonomial):
        rs = []
        for (kind, node, r), e in m.items():
            if kind != "A" or node != 1 or e > 0:
                raise ValueError(f"{m} is not a product of A^{{-1}} variables")
            rs.extend([r] * (-e))
        return tuple(sorted(rs, reverse=True))
    return tuple(sorted((int(r) for r in m), reverse=True))


def key_to_monomial(key):
    return YMonomial.a_inverse_product(key)


def key_text(key):
    if not key:
        return "1"
    parts = []
    for r in sorted(set(key), reverse=True):
        e = key.count(r)
        parts.append(f"A[{r}]^-{e}")
    return " * ".join(parts)


_KEY_FACTOR = re.compile(r"A\[(-?\d+)\]\^-(\d+)")


def parse_key_text(text):
    """Inverse of ``key_text``.

    Raises:
        ParseError: on anything but ``1`` or ``A[r]^-e`` factors joined by ``*``.
    """
    if text.strip() == "1":
        return ()
    rs = []
    for part in text.split("*"):
        match = _KEY_FACTOR.fullmatch(part.strip())
        if not match:
            raise ParseError("expected A[r]^-e", text, text.find(part))
        rs.extend([int(match.group(1))] * int(match.group(2)))
    return monomial_key(rs)


def _sort_key(key):
    return (len(key), tuple(-r for r in key))


class QCharSeries:
    """Sparse integer series over A^{-1}-monomials with a tracked region.

    Args:
        terms (dict): ``{monomial: coefficient}`` where a monomial is a
            YMonomial or an iterable of A-indices. Terms outside the region
            are dropped.
        window (tuple): ``(rmin, rmax)`` bounds on A-indices.
        degcap (int): Maximal total degree.
    """

    __slots__ = ("_terms", "window", "degcap")

    def __init__(self, terms=None, window=(-8, 0), degcap=4):
        self.window = (int(window[0]), int(window[1]))
        self.degcap = int(degcap)
        self._terms = {}
        for m, c in (terms or {}).items():
            self._accumulate(monomial_key(m), c)

    def _in_region(self, key):
        rmin, rmax = self.window
        return len(key) <= self.degcap and all(rmin <= r <= rmax for r in key)

    def _accumulate(self, key, c):
        if not c:
            return
        for r in key:
            if r % 2 != 0:
                raise ParityError(f"A-indices must be even, got {r}")
        if not self._in_region(key):
            return
        value = self._terms.get(key, 0) + c
        if abs(value) > settings.COEFFICIENT_BOUND:
            raise OverflowBoundError(f"coefficient of {key_text(key)} overflowed")
        if value:
            self._terms[key] = value
        else:
            self._terms.pop(key, None)

    @classmethod
    def one(cls, window=(-8, 0), degcap=4):
        return cls({(): 1}, window, degcap)

    @classmethod
    def zero(cls, window=(-8, 0), degcap=4):
        return cls({}, window, degcap)

    @classmethod
    def monomial(cls, m, window=(-8, 0), degcap=4, coeff=1):
        return cls({monomial_key(m): coeff}, window, degcap)

    @classmethod
    def from_subsets(cls, subsets, top=0, window=(-8, 0), degcap=4):
        """Sum of prod_{j in J} A_{top-2j}^{-1} over the given subsets J of depths."""
        out = cls({}, window, degcap)
        for subset in subsets:
            out._accumulate(monomial_key(top - 2 * j for j in subset), 1)
        return out

    @property
    def terms(self):
        return {key_to_monomial(k): c for k, c in self._terms.items()}

    def keys(self):
        return sorted(self._terms, key=_sort_key)

    def items(self):
        return [(k, self._terms[k]) for k in self.keys()]

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if not isinstance(other, QCharSeries):
            return NotImplemented
        return (self.window, self.degcap, self._terms) == (other.window, other.degcap, other._terms)

    def same_terms(self, other):
        return self._terms == other._terms

    def _common_region(self, other):
        window = (max(self.window[0], other.window[0]), min(self.window[1], other.window[1]))
        return window, min(self.degcap, other.degcap)

    def __add__(self, other):
        window, degcap = self._common_region(other)
        out = QCharSeries({}, window, degcap)
        for k, c in self._terms.items():
            out._accumulate(k, c)
        for k, c in other._terms.items():
            out._accumulate(k, c)
        return out

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, n):
        return QCharSeries({k: n * c for k, c in self._terms.items()}, self.window, self.degcap)

    def truncated_product(self, other):
        return truncated_product(self, other)

    def __mul__(self, other):
        return truncated_product(self, other)

    def coefficient(self, m):
        return coefficient(self, m)

    def restrict(self, window=None, degcap=None):
        """Restrict to a smaller region.

        Raises:
            UntrackedRegionError: if the requested region is not inside the
                tracked one.
        """
        window = self.window if window is None else tuple(window)
        degcap = self.degcap if degcap is None else degcap
        if window[0] < self.window[0] or window[1] > self.window[1] or degcap > self.degcap:
            raise UntrackedRegionError(
                f"cannot restrict {self.window}/{self.degcap} to larger region {window}/{degcap}"
            )
        return QCharSeries(dict(self._terms), window, degcap)

    def shifted(self, s):
        """Shift every A-index by ``s`` (and the window with it)."""
        return QCharSeries(
            {tuple(r + s for r in k): c for k, c in self._terms.items()},
            (self.window[0] + s, self.window[1] + s),
            self.degcap,
        )

    def times_monomial(self, key):
        """Multiply by a single A^{-1}-monomial, dropping what leaves the region."""
        key = monomial_key(key)
        out = QCharSeries({}, self.window, self.degcap)
        for k, c in self._terms.items():
            out._accumulate(tuple(sorted(k + key, reverse=True)), c)
        return out

    def is_multiplicity_free(self):
        return all(c in (0, 1) for c in self._terms.values())

    def leading_terms(self):
        """Terms of lowest A^{-1}-degree (the highest l-weight end)."""
        if not self._terms:
            return []
        d = min(len(k) for k in self._terms)
        return [k for k in self.keys() if len(k) == d]

    def to_json(self):
        return {
            "window": list(self.window),
            "degcap": self.degcap,
            "terms": [{"monomial": key_text(k), "coeff": c} for k, c in self.items()],
        }

    @classmethod
    def from_json(cls, data):
        terms = {}
        for term in data["terms"]:
            key = parse_key_text(term["monomial"])
            terms[key] = terms.get(key, 0) + int(term["coeff"])
        return cls(terms, tuple(data["window"]), data["degcap"])

    def to_text(self):
        if not self._terms:
            return "0"
        width = max(len(str(c)) for c in self._terms.values())
        lines = []
        for k, c in self.items():
            lines.append(f"{len(k):>3}  {str(c):>{width}}  {key_text(k)}")
        return "\n".join(lines)

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for k, c in self.items():
            body = key_text(k)
            if body == "1":
                parts.append(str(c))
            else:
                parts.append(body if c == 1 else f"{c}*{body}")
        return " + ".join(parts)

    def __repr__(self):
        return f"QCharSeries({self}, window={self.window}, degcap={self.degcap})"


def truncated_product(s1, s2):
    """Product within the common region; terms leaving it are dropped."""
    window, degcap = s1._common_region(s2)
    out = QCharSeries({}, window, degcap)
    for k1, c1 in s1._terms.items():
        if not out._in_region(k1):
            continue
        for k2, c2 in s2._terms.items():
            if len(k1) + len(k2) > degcap:
                continue
            out._accumulate(tuple(sorted(k1 + k2, reverse=True)), c1 * c2)
    return out


def coefficient(s, m):
    """Coefficient of ``m`` in ``s``.

    Raises:
        UntrackedRegionError: if ``m`` lies outside the tracked region, where a
            zero could not be certified.
    """
    key = monomial_key(m)
    if not s._in_region(key):
        raise UntrackedRegionError(
            f"{key_text(key)} lies outside window {s.window} / degcap {s.degcap}"
        )
    return s._terms.get(key, 0)


def product_of(series, window, degcap):
    """Truncated product of an iterable of series, starting from 1."""
    result = QCharSeries.one(window, degcap)
    for s in series:
        result = truncated_product(result, s)
    return result


def stabilization_check(gen, window, degcap, n_max=None):
    """Least N0 with gen(N0), gen(N0+1), gen(N0+2) equal on the region.

    Args:
        gen (callable): ``N -> QCharSeries`` for N >= 1; each value must track
            at least the requested region.
        window (tuple): Region window.
        degcap (int): Region degree cap.
        n_max (int): Give-up bound on N.

    Returns:
        tuple: (N0, stable QCharSeries restricted to the region).

    Raises:
        StabilizationError: if no N0 with N0 + 2 <= n_max exists.
    """
    n_max = settings.STABILIZATION_MAX_N if n_max is None else n_max
    snapshots = []
    for n in range(1, n_max + 1):
        snapshots.append(gen(n).restrict(window, degcap))
        if len(snapshots) >= 3 and snapshots[-1] == snapshots[-2] == snapshots[-3]:
            n0 = n - 2
            logger.info(f"Sequence stabilized at N0={n0} on window {window}, degcap {degcap}")
            return n0, snapshots[-3]
    raise StabilizationError(f"no stabilization up to N={n_max} on window {window}, degcap {degcap}")
