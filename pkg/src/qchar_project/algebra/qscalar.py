"""
Exact coefficients in the quantum parameter q.

``QLaurent`` is an integer Laurent polynomial stored as a sparse
``{exponent: coefficient}`` mapping. ``QScalar`` is an element of the
rational function field Q(q); it wraps an element of sympy's ``ZZ(q)``
fraction field so that matrix code can hand the raw element straight to
``DomainMatrix``.
"""
from fractions import Fraction
from functools import lru_cache
from math import gcd

from sympy import Symbol, ZZ, sympify
from sympy.core.sympify import SympifyError
from sympy.polys.fields import FracElement
from sympy.polys.polyerrors import CoercionFailed

from qchar_project.errors import ParseError, SpecializationError

Q_SYMBOL = Symbol("q")
QFIELD = ZZ.frac_field(Q_SYMBOL)
_FIELD = QFIELD.field
_RING = _FIELD.ring
Q = QFIELD.gens[0]


class QLaurent:
    """Integer Laurent polynomial in q.

    Args:
        coeffs (dict): Mapping ``exponent -> integer coefficient``. Zero
            coefficients are dropped.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs=None):
        if isinstance(coeffs, QLaurent):
            self._coeffs = dict(coeffs._coeffs)
            return
        if isinstance(coeffs, int):
            coeffs = {0: coeffs}
        self._coeffs = {int(e): int(c) for e, c in (coeffs or {}).items() if c}

    @classmethod
    def monomial(cls, exponent, coeff=1):
        return cls({exponent: coeff})

    @property
    def coeffs(self):
        return dict(self._coeffs)

    def items(self):
        return sorted(self._coeffs.items())

    def coefficient(self, exponent):
        return self._coeffs.get(exponent, 0)

    @property
    def min_exp(self):
        return min(self._coeffs) if self._coeffs else 0

    def is_monomial(self):
        return len(self._coeffs) == 1

    def __bool__(self):
        return bool(self._coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = QLaurent(other)
        if not isinstance(other, QLaurent):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self):
        return hash(frozenset(self._coeffs.items()))

    def __neg__(self):
        return QLaurent({e: -c for e, c in self._coeffs.items()})

    def __add__(self, other):
        other = _as_laurent(other)
        if other is None:
            return NotImplemented
        out = dict(self._coeffs)
        for e, c in other._coeffs.items():
            out[e] = out.get(e, 0) + c
        return QLaurent(out)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_laurent(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_laurent(other)
        if other is None:
            return NotImplemented
        out = {}
        for e1, c1 in self._coeffs.items():
            for e2, c2 in other._coeffs.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return QLaurent(out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative powers of a Laurent polynomial are not Laurent polynomials")
        result = QLaurent(1)
        for _ in range(n):
            result = result * self
        return result

    def shift(self, n):
        """Multiply by q^n."""
        return QLaurent({e + n: c for e, c in self._coeffs.items()})

    def evaluate(self, q0):
        q0 = Fraction(q0)
        return sum((c * q0**e for e, c in self._coeffs.items()), Fraction(0))

    def to_json(self):
        return [f"{e}:{c}" for e, c in self.items()]

    @classmethod
    def from_json(cls, pairs):
        coeffs = {}
        for pair in pairs:
            e, c = pair.split(":")
            coeffs[int(e)] = coeffs.get(int(e), 0) + int(c)
        return cls(coeffs)

    def __str__(self):
        if not self._coeffs:
            return "0"
        parts = []
        for e, c in sorted(self._coeffs.items(), reverse=True):
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if e == 0:
                body = str(mag)
            else:
                power = "q" if e == 1 else f"q^{e}"
                body = power if mag == 1 else f"{mag}*{power}"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"QLaurent({self})"


def _as_laurent(value):
    if isinstance(value, QLaurent):
        return value
    if isinstance(value, int):
        return QLaurent(value)
    return None


def q_int(m):
    """Symmetric quantum integer [m]_q = q^{m-1} + q^{m-3} + ... + q^{1-m}."""
    if m < 0:
        return -q_int(-m)
    return QLaurent({m - 1 - 2 * i: 1 for i in range(m)})


def q_factorial(n):
    result = QLaurent(1)
    for k in range(1, n + 1):
        result = result * q_int(k)
    return result


@lru_cache(maxsize=None)
def q_binomial(n, k):
    """Symmetric quantum binomial coefficient as a Laurent polynomial."""
    if k < 0 or k > n:
        return QLaurent()
    if k == 0 or k == n:
        return QLaurent(1)
    return q_binomial(n - 1, k).shift(k) + q_binomial(n - 1, k - 1).shift(-(n - k))


def laurent_to_elem(poly):
    """Convert a QLaurent into an element of ``QFIELD``."""
    if not poly:
        return QFIELD.zero
    lo = poly.min_exp
    numer = _RING.from_dict({(e - lo,): c for e, c in poly.items()})
    return _FIELD.new(numer) * Q**lo


def _poly_to_laurent(poly):
    return QLaurent({monom[0]: int(c) for monom, c in poly.terms()})


def to_elem(value):
    """Coerce ints, Fractions, QLaurent and QScalar into ``QFIELD`` elements."""
    if isinstance(value, QScalar):
        return value.elem
    if isinstance(value, QLaurent):
        return laurent_to_elem(value)
    if isinstance(value, Fraction):
        return _FIELD(value.numerator) / _FIELD(value.denominator)
    if isinstance(value, int):
        return _FIELD(value)
    if isinstance(value, FracElement) and value.field == _FIELD:
        return value
    raise TypeError(f"cannot interpret {value!r} as an element of Q(q)")


def specialize_elem(elem, q0):
    """Evaluate a ``QFIELD`` element at the rational q0."""
    q0 = Fraction(q0)
    if q0 in (0, 1, -1):
        raise SpecializationError(f"q0 = {q0} is not a generic value of q")
    den = _poly_to_laurent(elem.denom).evaluate(q0)
    if den == 0:
        raise SpecializationError(f"denominator vanishes at q0 = {q0}")
    return _poly_to_laurent(elem.numer).evaluate(q0) / den


class QScalar:
    """Exact element of Q(q).

    ``num`` and ``den`` give the canonical Laurent form: the denominator has
    lowest exponent 0 with a positive coefficient there, and the integer
    content of numerator and denominator is coprime.
    """

    __slots__ = ("_elem",)

    def __init__(self, value=0):
        self._elem = to_elem(value)

    @classmethod
    def from_elem(cls, elem):
        obj = cls.__new__(cls)
        obj._elem = elem
        return obj

    @classmethod
    def q_power(cls, n):
        return cls.from_elem(Q**n)

    @classmethod
    def parse(cls, text):
        """Parse text such as ``"(q^2 - 1)/(q^3)"`` or ``"q^-1"``."""
        try:
            expr = sympify(text, locals={"q": Q_SYMBOL})
            return cls.from_elem(QFIELD.from_sympy(expr))
        except (SympifyError, SyntaxError, TypeError, CoercionFailed) as e:
            raise ParseError(f"not a rational function of q ({e})", text, 0)

    @property
    def elem(self):
        return self._elem

    def _canonical(self):
        num = _poly_to_laurent(self._elem.numer)
        den = _poly_to_laurent(self._elem.denom)
        lo = den.min_exp
        num, den = num.shift(-lo), den.shift(-lo)
        content = 0
        for _, c in num.items() + den.items():
            content = gcd(content, c)
        if content > 1:
            num = QLaurent({e: c // content for e, c in num.items()})
            den = QLaurent({e: c // content for e, c in den.items()})
        if den.coefficient(0) < 0:
            num, den = -num, -den
        return num, den

    @property
    def num(self):
        return self._canonical()[0]

    @property
    def den(self):
        return self._canonical()[1]

    def is_zero(self):
        return not self._elem

    def __bool__(self):
        return bool(self._elem)

    def __eq__(self, other):
        try:
            other = to_elem(other)
        except TypeError:
            return NotImplemented
        return self._elem == other

    def __hash__(self):
        return hash(self._elem)

    def __neg__(self):
        return QScalar.from_elem(-self._elem)

    def __add__(self, other):
        try:
            return QScalar.from_elem(self._elem + to_elem(other))
        except TypeError:
            return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        try:
            return QScalar.from_elem(self._elem - to_elem(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        try:
            return QScalar.from_elem(to_elem(other) - self._elem)
        except TypeError:
            return NotImplemented

    def __mul__(self, other):
        try:
            return QScalar.from_elem(self._elem * to_elem(other))
        except TypeError:
            return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            other = to_elem(other)
        except TypeError:
            return NotImplemented
        if not other:
            raise ZeroDivisionError("division by the zero element of Q(q)")
        return QScalar.from_elem(self._elem / other)

    def __rtruediv__(self, other):
        if not self._elem:
            raise ZeroDivisionError("division by the zero element of Q(q)")
        try:
            return QScalar.from_elem(to_elem(other) / self._elem)
        except TypeError:
            return NotImplemented

    def __pow__(self, n):
        if n < 0 and not self._elem:
            raise ZeroDivisionError("negative power of zero")
        return QScalar.from_elem(self._elem**n)

    def specialize(self, q0):
        return specialize(self, q0)

    def to_laurent(self):
        """Return the value as a QLaurent, or None if it is not one."""
        num, den = self._canonical()
        if den.is_monomial() and den.coefficient(den.min_exp) == 1:
            return num.shift(-den.min_exp)
        return None

    def __str__(self):
        num, den = self._canonical()
        if den == 1:
            return str(num)
        num_text = str(num) if len(num.items()) == 1 else f"({num})"
        return f"{num_text}/({den})"

    def __repr__(self):
        return f"QScalar({self})"


def specialize(s, q0):
    """Exact value of ``s`` at the rational number ``q0``.

    Raises:
        SpecializationError: if q0 is 0, 1, -1 or a pole of ``s``.
    """
    return specialize_elem(to_elem(s), q0)


def q_number(m):
    """[m]_q as a QScalar."""
    return QScalar(q_int(m))


QQ_DIFF = QScalar.from_elem(Q - Q**-1)
