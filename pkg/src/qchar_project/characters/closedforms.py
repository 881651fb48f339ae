"""
Closed-form normalized q-characters for affine sl2.

All series are normalized (divided by their highest l-weight) and live in
the A^{-1}-monomial ring of ``qseries``; A-indices are even, Y-indices odd.
"""
import logging
import random
from dataclasses import dataclass
from itertools import combinations

from qchar_project.algebra.lweights import (
    LWeight,
    a_inverse,
    factor_negative,
    lweight_leq,
    psi_of,
    y_of,
)
from qchar_project.algebra.qseries import QCharSeries, key_text, product_of
from qchar_project.errors import GapError, ParityError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GappedTuple:
    """Increasing positive integers r_1 < ... < r_m with r_{i+1} > r_i + 1."""

    rs: tuple = ()

    def __post_init__(self):
        rs = tuple(self.rs)
        object.__setattr__(self, "rs", rs)
        if any(r < 1 for r in rs):
            raise GapError(f"entries of a gapped tuple are positive, got {rs}")
        for a, b in zip(rs, rs[1:]):
            if b <= a + 1:
                raise GapError(f"gap condition fails between {a} and {b} in {rs}")

    def __len__(self):
        return len(self.rs)

    def leading_key(self, top=0):
        """A-indices of the highest l-weight relative to Psi_{q^top}^{-1}."""
        return tuple(top - 2 * r for r in self.rs)

    def weight_shift(self):
        """The weight bookkeeping [(-r_m + 1) omega] of the simple summand (0 for ())."""
        return 0 if not self.rs else -self.rs[-1] + 1

    def __str__(self):
        return "(" + ",".join(str(r) for r in self.rs) + ")"


def _check_odd(r):
    if r % 2 == 0:
        raise ParityError(f"Y-variables live at odd exponents, got r={r}")


def _chain(top, length, window, degcap):
    """1 + A_top^{-1} + A_top^{-1} A_{top-2}^{-1} + ... with ``length`` proper terms.

    ``length=None`` means the chain continues while it stays in the window.
    """
    terms = {(): 1}
    key = ()
    j = 0
    while length is None or j < length:
        r = top - 2 * j
        if r < window[0] or len(key) + 1 > degcap:
            break
        key = key + (r,)
        terms[key] = 1
        j += 1
    return QCharSeries(terms, window, degcap)


def _default_region(window, degcap, *indices):
    if window is None:
        top = max(indices) if indices else 0
        window = (top - 8, max(top, 0))
    if degcap is None:
        degcap = 4
    return window, degcap


def fundamental_qchar(r, window=None, degcap=None):
    """Normalized q-character 1 + A_{r+1}^{-1} of the fundamental module at Y_{q^r}."""
    _check_odd(r)
    window, degcap = _default_region(window, degcap, r + 1)
    return QCharSeries({(): 1, (r + 1,): 1}, window, degcap)


def standard_qchar(ys, window=None, degcap=None):
    """Product of fundamental q-characters over the multiset ``ys`` of odd exponents."""
    ys = list(ys)
    for r in ys:
        _check_odd(r)
    if window is None:
        window, degcap = _default_region(window, degcap, *[r + 1 for r in ys])
        if ys:
            window = (min(min(ys) + 1, window[0]), max(max(ys) + 1, window[1]))
        degcap = max(degcap, len(ys))
    elif degcap is None:
        degcap = len(ys)
    return product_of((fundamental_qchar(r, window, degcap) for r in ys), window, degcap)


def kr_qchar(k, rtop, window=None, degcap=None):
    """Normalized q-character of the KR module Y_{rtop} Y_{rtop-2} ... (k factors).

    The chain sum_{j=0}^{k} prod_{l<j} A_{rtop+1-2l}^{-1}.
    """
    if k < 0:
        raise ValueError("KR length must be >= 0")
    _check_odd(rtop)
    if window is None:
        window = (rtop + 1 - 2 * max(k - 1, 0), max(rtop + 1, 0))
    if degcap is None:
        degcap = k
    return _chain(rtop + 1, k, window, degcap)


def prefund_limit_qchar(r, window, degcap):
    """Sum over finite J of {0,1,2,...} of prod_{j in J} A_{r-2j}^{-1}, truncated."""
    if r % 2 != 0:
        raise ParityError(f"prefundamental limits sit at even exponents, got r={r}")
    factors = []
    j = 0
    while r - 2 * j >= window[0]:
        if r - 2 * j <= window[1]:
            factors.append(QCharSeries({(): 1, (r - 2 * j,): 1}, window, degcap))
        j += 1
    return product_of(factors, window, degcap)


def prefund_simple_qchar(r, window, degcap):
    """Normalized q-character of the simple module L(Psi_{q^r}^{-1}).

    The limit of the KR chains: sum_k prod_{j<k} A_{r-2j}^{-1}.
    """
    if r % 2 != 0:
        raise ParityError(f"prefundamental modules sit at even exponents, got r={r}")
    return _chain(r, None, window, degcap)


def standard_sequence(psi, n, window, degcap):
    """Normalized q-character of the N-th truncated standard module of ``psi``.

    Each Psi_{q^p}^{-b} is replaced by b copies of the fundamentals at
    p-1, p-3, ..., p-2N+1.
    """
    fac = factor_negative(psi)
    ys = list(fac.y_exponents())
    for p, b in fac.psis.items():
        for _ in range(b):
            ys.extend(p - 1 - 2 * k for k in range(n))
    return standard_qchar(ys, window, degcap)


def chi_infinity(psi, window, degcap):
    """Limit q-character of a negative l-weight.

    Raises:
        NotNegativeError: propagated from ``factor_negative``.
    """
    fac = factor_negative(psi)
    series = [fundamental_qchar(r, window, degcap) for r in fac.y_exponents()]
    for p, b in fac.psis.items():
        series.extend([prefund_limit_qchar(p, window, degcap)] * b)
    return product_of(series, window, degcap)


def simple_highest_lweight(g, top=0):
    """Highest l-weight Psi_{q^top}^{-1} * prod A_{top-2r_i}^{-1} of the summand for ``g``."""
    result = psi_of(top, -1)
    for r in g.rs:
        result = result * a_inverse(top - 2 * r)
    return result


def simple_qchar_gapped(g, window, degcap, top=0):
    """Normalized q-character of L(Psi_{q^top}^{-1} * prod_i A_{top-2r_i}^{-1}).

    Built as the leading monomial times the KR chains of the Y-strings
    between the gaps and the prefundamental chain below the last gap. The
    result is relative to Psi_{q^top}^{-1}, so the leading term is
    prod A_{top-2r_i}^{-1}.
    """
    if not isinstance(g, GappedTuple):
        g = GappedTuple(tuple(g))
    rs = g.rs
    if not rs:
        return prefund_simple_qchar(top, window, degcap)
    lead = tuple(top - 2 * r for r in rs)
    if len(lead) > degcap:
        return QCharSeries.zero(window, degcap)
    # chain under the top string Y_{top-1} ... of length r_1 - 1
    factors = [_chain(top, rs[0] - 1, window, degcap)]
    for a, b in zip(rs, rs[1:]):
        factors.append(_chain(top - 2 * a - 2, b - a - 2, window, degcap))
    factors.append(prefund_simple_qchar(top - 2 * rs[-1] - 2, window, degcap))
    body = product_of(factors, window, degcap - len(lead))
    return QCharSeries(dict(body.items()), window, degcap).times_monomial(lead)


def _components(positions):
    """Start points of the maximal runs of consecutive integers in ``positions``."""
    starts = []
    previous = None
    for p in sorted(positions):
        if previous is None or p != previous + 1:
            starts.append(p)
        previous = p
    return starts


def gapped_subset_oracle(g, window, degcap, top=0):
    """Brute force: sum over subsets J whose components start at r_1..r_m, or at 0, r_1..r_m.

    A subset J of {0, 1, 2, ...} stands for prod_{j in J} A_{top-2j}^{-1}.
    """
    if not isinstance(g, GappedTuple):
        g = GappedTuple(tuple(g))
    allowed = {tuple(g.rs), (0,) + tuple(g.rs)}
    depth = (top - window[0]) // 2
    positions = [j for j in range(depth + 1) if top - 2 * j <= window[1]]
    terms = {}
    for size in range(min(degcap, len(positions)) + 1):
        for subset in combinations(positions, size):
            if tuple(_components(subset)) in allowed:
                terms[tuple(top - 2 * j for j in subset)] = 1
    return QCharSeries(terms, window, degcap)


def gapped_tuples(window, degcap, top=0):
    """All gapped tuples whose leading monomial lies inside the region."""
    depth = (top - window[0]) // 2
    out = [GappedTuple(())]

    def extend(prefix, start):
        for r in range(start, depth + 1):
            rs = prefix + (r,)
            if len(rs) > degcap:
                return
            out.append(GappedTuple(rs))
            extend(rs, r + 2)

    extend((), 1)
    return out


def verify_decomposition(window, degcap, exclude=(), top=0):
    """Compare the limit q-character with the sum of the gapped simple q-characters.

    Args:
        window (tuple): Region window.
        degcap (int): Region degree cap.
        exclude (iterable): Gapped tuples to leave out (perturbation runs).
        top (int): Even exponent of the prefundamental Psi_{q^top}^{-1}.

    Returns:
        dict: ``lhs_terms``, ``rhs_terms``, ``equal``, ``multiplicity_free``,
        ``first_mismatch``, ``summands``.
    """
    excluded = {t if isinstance(t, GappedTuple) else GappedTuple(tuple(t)) for t in exclude}
    lhs = prefund_limit_qchar(top, window, degcap)
    rhs = QCharSeries.zero(window, degcap)
    summands = []
    multiplicity_free = True
    for g in gapped_tuples(window, degcap, top):
        if g in excluded:
            continue
        s = simple_qchar_gapped(g, window, degcap, top)
        multiplicity_free = multiplicity_free and s.is_multiplicity_free()
        rhs = rhs + s
        summands.append({
            "tuple": list(g.rs),
            "highest_lweight": simple_highest_lweight(g, top).to_text(),
            "weight_shift": g.weight_shift(),
            "terms": len(s),
        })
    multiplicity_free = multiplicity_free and rhs.is_multiplicity_free()
    mismatch = None
    for key in sorted(set(lhs.keys()) | set(rhs.keys()), key=lambda k: (len(k), tuple(-r for r in k))):
        if lhs._terms.get(key, 0) != rhs._terms.get(key, 0):
            mismatch = {
                "monomial": key_text(key),
                "lhs": lhs._terms.get(key, 0),
                "rhs": rhs._terms.get(key, 0),
            }
            break
    equal = mismatch is None
    logger.info(
        f"Decomposition check on window {window}, degcap {degcap}: "
        f"{len(summands)} summands, equal={equal}, multiplicity_free={multiplicity_free}"
    )
    return {
        "lhs_terms": len(lhs),
        "rhs_terms": len(rhs),
        "equal": equal,
        "multiplicity_free": multiplicity_free,
        "first_mismatch": mismatch,
        "summands": summands,
    }


def decompose_prefundamental(r, window, degcap):
    """Simple constituents of the asymptotic standard module of Psi_{q^r}^{-1}."""
    if r % 2 != 0:
        raise ParityError(f"prefundamental modules sit at even exponents, got r={r}")
    out = []
    for g in gapped_tuples(window, degcap, top=r):
        s = simple_qchar_gapped(g, window, degcap, top=r)
        out.append({
            "tuple": g,
            "highest_lweight": simple_highest_lweight(g, top=r),
            "weight_shift": g.weight_shift(),
            "series": s,
        })
    return out


def qchar_multiplicativity_check(psi1, psi2, window, degcap):
    """chi_infinity(psi1 * psi2) == chi_infinity(psi1) * chi_infinity(psi2) on the region."""
    lhs = chi_infinity(psi1 * psi2, window, degcap)
    rhs = chi_infinity(psi1, window, degcap) * chi_infinity(psi2, window, degcap)
    return lhs.same_terms(rhs)


def random_negative_lweight(rng, depth=8, max_factors=3):
    """A random negative l-weight with Y and Psi^{-1} factors near the origin."""
    result = LWeight(rng.randint(-2, 2))
    for _ in range(rng.randint(0, max_factors)):
        result = result * y_of(-2 * rng.randint(0, depth - 1) - 1)
    for _ in range(rng.randint(0, max_factors)):
        result = result * psi_of(-2 * rng.randint(0, depth - 1), -1)
    return result


def random_a_inverse_product(rng, depth=8, max_factors=3):
    result = LWeight()
    for _ in range(rng.randint(0, max_factors)):
        result = result * a_inverse(-2 * rng.randint(0, depth - 1))
    return result


def order_compatibility_check(samples=100, seed=0, depth=8):
    """Check (psi <= psi1 and psi' <= psi * psi2) => psi' <= psi1 * psi2 on random triples.

    Half of the samples are built so that the premise holds; the rest are
    unconstrained.
    """
    rng = random.Random(seed)
    for i in range(samples):
        psi1 = random_negative_lweight(rng, depth)
        psi2 = random_negative_lweight(rng, depth)
        if i % 2 == 0:
            psi = psi1 * random_a_inverse_product(rng, depth)
            psi_prime = psi * psi2 * random_a_inverse_product(rng, depth)
        else:
            psi = random_negative_lweight(rng, depth)
            psi_prime = random_negative_lweight(rng, depth)
        premise = lweight_leq(psi, psi1) and lweight_leq(psi_prime, psi * psi2)
        if premise and not lweight_leq(psi_prime, psi1 * psi2):
            logger.warning(f"Order compatibility fails for {psi1}, {psi2}, {psi}, {psi_prime}")
            return False
    return True
