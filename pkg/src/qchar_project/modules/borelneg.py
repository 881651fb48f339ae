"""
The negative half U_q^-(b) and the induced module U_q^-(b) (x) T.

U_q^-(b) is generated by x_m^-, m >= 1, subject to

    x_{m+1} x_l - q^{-2} x_l x_{m+1} = q^{-2} x_m x_{l+1} - x_{l+1} x_m,

and has the ordered words x_{m_1} ... x_{m_s} (m_1 <= ... <= m_s) as a
basis. Degree is sum(m_i).
"""
import logging
import random
from dataclasses import dataclass
from itertools import product as cartesian

from sympy.utilities.iterables import partitions

from qchar_project.algebra.linalg import SparseMatrix, nullspace, rank
from qchar_project.algebra.qscalar import QFIELD, Q, QScalar, q_number
from qchar_project.config import settings
from qchar_project.errors import RewriteBudgetError, TruncationError
from qchar_project.modules.asymstd import TModule, act_h

logger = logging.getLogger(__name__)

Q_MINUS_2 = Q**-2


@dataclass(frozen=True, order=True)
class PBWWord:
    """A word x_{m_1} ... x_{m_s}; ``indices`` need not be ordered."""

    indices: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(m) for m in self.indices))
        if any(m < 1 for m in self.indices):
            raise ValueError(f"x_m^- needs m >= 1, got {self.indices}")

    @property
    def degree(self):
        return sum(self.indices)

    def __len__(self):
        return len(self.indices)

    def is_normal(self):
        return all(a <= b for a, b in zip(self.indices, self.indices[1:]))

    def __str__(self):
        return " ".join(f"x[{m}]" for m in self.indices) if self.indices else "1"


class BorelNegElement:
    """A combination of normal-ordered words with Q(q) coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        for word, c in (terms or {}).items():
            word = word if isinstance(word, PBWWord) else PBWWord(word)
            c = c if isinstance(c, QScalar) else QScalar(c)
            if not word.is_normal():
                raise ValueError(f"{word} is not normal-ordered; use pbw_normalize")
            total = self.terms.get(word, QScalar(0)) + c
            if total:
                self.terms[word] = total
            else:
                self.terms.pop(word, None)

    @classmethod
    def one(cls):
        return cls({PBWWord(): 1})

    def words(self):
        return sorted(self.terms)

    def coefficient(self, word):
        word = word if isinstance(word, PBWWord) else PBWWord(word)
        return self.terms.get(word, QScalar(0))

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, BorelNegElement):
            return NotImplemented
        return self.terms == other.terms

    def __add__(self, other):
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, QScalar(0)) + c
        return BorelNegElement(out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return BorelNegElement({w: v * c for w, v in self.terms.items()})

    def __mul__(self, other):
        """Concatenate words and normalize."""
        out = BorelNegElement()
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                out = out + pbw_normalize(w1.indices + w2.indices).scale(c1 * c2)
        return out

    def to_json(self):
        return [{"word": str(w), "coeff": str(self.terms[w])} for w in self.words()]

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({self.terms[w]}) {w}" for w in self.words())

    def __repr__(self):
        return f"BorelNegElement({self})"


def _rewrite_pair(a, b):
    """x_a x_b for a > b as a list of ((i, j), coeff), solved for x_a x_b."""
    rhs = [((b, a), Q_MINUS_2), ((a - 1, b + 1), Q_MINUS_2), ((b + 1, a - 1), -QFIELD.one)]
    merged = {}
    for pair, c in rhs:
        merged[pair] = merged.get(pair, QFIELD.zero) + c
    self_coeff = merged.pop((a, b), QFIELD.zero)
    scale = QFIELD.one / (QFIELD.one - self_coeff)
    return [(pair, c * scale) for pair, c in merged.items() if c]


def pbw_normalize(word, strategy="leftmost", seed=0, budget=None):
    """Rewrite a word into normal-ordered words.

    Args:
        word: A PBWWord or a sequence of indices >= 1.
        strategy (str): ``"leftmost"`` resolves the leftmost descent first,
            ``"random"`` a random one (seeded).
        seed (int): Seed for the random strategy.
        budget (int): Maximal number of rewriting steps.

    Returns:
        BorelNegElement

    Raises:
        RewriteBudgetError: if the step budget is exhausted.
    """
    if strategy not in ("leftmost", "random"):
        raise ValueError(f"unknown rewriting strategy {strategy!r}")
    budget = settings.PBW_STEP_BUDGET if budget is None else budget
    indices = word.indices if isinstance(word, PBWWord) else tuple(word)
    rng = random.Random(seed)
    pending = {tuple(indices): QFIELD.one}
    done = {}
    steps = 0
    while pending:
        w = min(pending)
        c = pending.pop(w)
        if not c:
            continue
        descents = [i for i in range(len(w) - 1) if w[i] > w[i + 1]]
        if not descents:
            done[w] = done.get(w, QFIELD.zero) + c
            continue
        steps += 1
        if steps > budget:
            raise RewriteBudgetError(f"normalizing {PBWWord(indices)} needed more than {budget} steps")
        i = descents[0] if strategy == "leftmost" else rng.choice(descents)
        for (x, y), coeff in _rewrite_pair(w[i], w[i + 1]):
            new = w[:i] + (x, y) + w[i + 2:]
            pending[new] = pending.get(new, QFIELD.zero) + c * coeff
    logger.debug(f"Normalized {PBWWord(indices)} in {steps} steps")
    return BorelNegElement({PBWWord(w): QScalar.from_elem(c) for w, c in done.items() if c})


def normal_words(degree):
    """Normal-ordered words of the given degree, one per partition."""
    if degree == 0:
        return [PBWWord()]
    out = []
    for part in partitions(degree):
        indices = []
        for m in sorted(part):
            indices.extend([m] * part[m])
        out.append(PBWWord(tuple(indices)))
    return sorted(out)


def graded_dimension(N):
    """Dimension of the degree-N part of U_q^-(b)."""
    if N < 0:
        raise ValueError("degree must be >= 0")
    return len(normal_words(N))


def compositions(degree):
    """All words (ordered or not) of the given degree."""
    if degree == 0:
        return [()]
    out = []
    for first in range(1, degree + 1):
        for rest in compositions(degree - first):
            out.append((first,) + rest)
    return out


def _relation(m, l, sign):
    """x_{m+1} x_l - q^{-2} x_l x_{m+1} - q^{-2} x_m x_{l+1} - sign * x_{l+1} x_m."""
    terms = {}
    for word, c in (
        ((m + 1, l), QFIELD.one),
        ((l, m + 1), -Q_MINUS_2),
        ((m, l + 1), -Q_MINUS_2),
        ((l + 1, m), -QFIELD.one if sign > 0 else QFIELD.one),
    ):
        terms[word] = terms.get(word, QFIELD.zero) + c
    return {w: c for w, c in terms.items() if c}


def linear_oracle_check(D, perturb=False):
    """Compare rewriting with the degree <= D quotient of the free algebra.

    In each degree d the ideal is spanned by u * rel * v over the defining
    relations and words u, v. The check asserts that the quotient has the
    partition-number dimension and that w - pbw_normalize(w) lies in the
    ideal for every word w with length <= 4. ``perturb`` flips the sign of
    the last relation term.
    """
    sign = 1 if perturb else -1
    for d in range(1, D + 1):
        words = compositions(d)
        pos = {w: i for i, w in enumerate(words)}
        rows = []
        for m in range(1, d):
            for l in range(1, d - m):
                rel = _relation(m, l, sign)
                rest = d - (m + l + 1)
                for left_deg in range(rest + 1):
                    for u in compositions(left_deg):
                        for v in compositions(rest - left_deg):
                            rows.append({pos[u + w + v]: c for w, c in rel.items()})
        ideal = SparseMatrix(dict(enumerate(rows)), (len(rows), len(words)))
        ideal_rank = rank(ideal)
        quotient = len(words) - ideal_rank
        if quotient != graded_dimension(d):
            logger.info(f"Linear oracle: degree {d} quotient has dimension {quotient}, expected {graded_dimension(d)}")
            return False
        for w in words:
            if len(w) > 4:
                continue
            diff = {pos[w]: QFIELD.one}
            for nw, c in pbw_normalize(w).terms.items():
                diff[pos[nw.indices]] = diff.get(pos[nw.indices], QFIELD.zero) - c.elem
            extended = SparseMatrix.stack([ideal, SparseMatrix({0: diff}, (1, len(words)))])
            if rank(extended) != ideal_rank:
                logger.info(f"Linear oracle: {PBWWord(w)} minus its normal form is not in the ideal")
                return False
    logger.info(f"Linear oracle passed up to degree {D}")
    return True


class InducedState:
    """A combination of pure tensors (word (x) v_J) in U_q^-(b) (x) T.

    Args:
        tmodule (TModule): The T-side module.
        terms (dict): ``{(PBWWord, SubsetIndex): coefficient}``.
        D (int): Largest PBW degree tracked.
    """

    __slots__ = ("tmodule", "terms", "D")

    def __init__(self, tmodule, terms=None, D=4):
        self.tmodule = tmodule
        self.D = D
        self.terms = {}
        for (word, J), c in (terms or {}).items():
            word = word if isinstance(word, PBWWord) else PBWWord(word)
            c = c if isinstance(c, QScalar) else QScalar(c)
            total = self.terms.get((word, J), QScalar(0)) + c
            if total:
                self.terms[(word, J)] = total
            else:
                self.terms.pop((word, J), None)

    def __add__(self, other):
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, QScalar(0)) + c
        return InducedState(self.tmodule, out, max(self.D, other.D))

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return InducedState(self.tmodule, {k: v * c for k, v in self.terms.items()}, self.D)

    def is_zero(self):
        return not self.terms

    def max_degree(self):
        return max((w.degree for w, _ in self.terms), default=0)

    def __eq__(self, other):
        if not isinstance(other, InducedState):
            return NotImplemented
        return self.terms == other.terms

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({c}) {w} (x) v{J}" for (w, J), c in sorted(self.terms.items()))


def act_h_induced(r, v):
    """h_r on U_q^-(b) (x) T.

    h_r (x_{m_1}..x_{m_s} (x) u) = sum_j (-[2r]/r) x_{m_1}..x_{m_j + r}..x_{m_s} (x) u
    + x_{m_1}..x_{m_s} (x) h_r u, with every shifted word normalized.

    Raises:
        TruncationError: if a shifted word would exceed the tracked degree D.
    """
    shift_coeff = -q_number(2 * r) / r
    out = {}
    for (word, J), c in v.terms.items():
        if word.indices and word.degree + r > v.D:
            raise TruncationError(f"h_{r} on {word} leaves PBW degree {v.D}")
        for j in range(len(word)):
            shifted = list(word.indices)
            shifted[j] += r
            for nw, nc in pbw_normalize(shifted).terms.items():
                key = (nw, J)
                out[key] = out.get(key, QScalar(0)) + c * shift_coeff * nc
        for K, tc in act_h(r, v.tmodule.basis(J)).coeffs.items():
            key = (word, K)
            out[key] = out.get(key, QScalar(0)) + c * tc
    return InducedState(v.tmodule, out, v.D)


def is_h_eigenvector(r, state):
    """Return (True, eigenvalue) if h_r state = lambda state, else (False, None)."""
    if state.is_zero():
        return False, None
    image = act_h_induced(r, state)
    key = min(state.terms)
    value = image.terms.get(key, QScalar(0)) / state.terms[key]
    if image == state.scale(value):
        return True, value
    return False, None


def induced_basis(D, depth, window, psi=None, tmodule=None):
    """Pure tensors (word, J) with deg(word) < D and J tracked by the T-module."""
    tmodule = TModule(psi, depth, window) if tmodule is None else tmodule
    words = [w for d in range(D) for w in normal_words(d)]
    return [(w, J) for w, J in cartesian(words, tmodule.subsets())]


def _shift_injective(d, r):
    """The map word -> sum_j normalize(word with m_j + r) is injective on degree d."""
    source = normal_words(d)
    target = {w: i for i, w in enumerate(normal_words(d + r))}
    rows = {}
    for col, word in enumerate(source):
        for j in range(len(word)):
            shifted = list(word.indices)
            shifted[j] += r
            for nw, c in pbw_normalize(shifted).terms.items():
                row = rows.setdefault(target[nw], {})
                row[col] = row.get(col, QFIELD.zero) + c.elem
    matrix = SparseMatrix(rows, (len(target), len(source)))
    return rank(matrix) == len(source)


def eigenvector_location_check(D, depth, window, rset=(1,), psi=None):
    """Locate the exact h_r-eigenvectors of the degree < D truncation.

    For each r and each h_r-eigenvalue lambda of the T truncation, the
    eigenvectors supported in PBW degrees < D - r (where the truncated
    operator is exact) are computed and must lie in 1 (x) T, with the same
    count as on T. Higher degrees are boundary artifacts and are excluded.

    Returns:
        dict: report with ``passed``.
    """
    tmodule = TModule(psi, depth, window)
    basis = induced_basis(D, depth, window, tmodule=tmodule)
    tsubsets = tmodule.subsets()
    report = {
        "D": D,
        "depth": depth,
        "window": window,
        "rset": list(rset),
        "dimension": len(basis),
        "checks": [],
        "passed": True,
    }
    for r in rset:
        interior = D - r
        entry = {"r": r, "vacuous": interior <= 0}
        if interior <= 0 or not basis:
            entry.update({"eigenvalues": 0, "interior_eigenvectors": 0, "outside_1xT": 0,
                          "multiplicity_match": True, "shift_injective": True})
            report["checks"].append(entry)
            continue
        pos = {key: i for i, key in enumerate(basis)}
        extra = {}
        rows = {}
        for col, (word, J) in enumerate(basis):
            image = act_h_induced(r, InducedState(tmodule, {(word, J): 1}, D + r))
            for key, c in image.terms.items():
                if key not in pos:
                    extra.setdefault(key, len(basis) + len(extra))
                row = pos.get(key, extra.get(key))
                rows.setdefault(row, {})[col] = c.elem
        n_rows = len(basis) + len(extra)
        h_full = SparseMatrix(rows, (n_rows, len(basis)))
        embed = SparseMatrix({i: {i: QFIELD.one} for i in range(len(basis))}, (n_rows, len(basis)))
        boundary = [i for i, (w, _) in enumerate(basis) if w.degree >= interior]
        boundary_rows = SparseMatrix({a: {i: QFIELD.one} for a, i in enumerate(boundary)}, (len(boundary), len(basis)))

        tpos = {J: i for i, J in enumerate(tsubsets)}
        trows = {}
        for col, J in enumerate(tsubsets):
            for K, c in act_h(r, tmodule.basis(J)).coeffs.items():
                trows.setdefault(tpos[K], {})[col] = c.elem
        h_t = SparseMatrix(trows, (len(tsubsets), len(tsubsets)))
        eigenvalues = sorted(set(h_t.diagonal()), key=str)

        outside = 0
        found = 0
        match = True
        for lam in eigenvalues:
            system = h_full - embed.scale(lam)
            if boundary:
                system = SparseMatrix.stack([system, boundary_rows])
            vectors = nullspace(system)
            found += len(vectors)
            for vec in vectors:
                if any(basis[i][0].indices for i in vec):
                    outside += 1
            t_dim = len(nullspace(h_t.shifted(lam)))
            if len(vectors) != t_dim:
                match = False
        injective = all(_shift_injective(d, r) for d in range(1, interior))
        passed = outside == 0 and match and injective
        entry.update({"eigenvalues": len(eigenvalues), "interior_eigenvectors": found,
                      "outside_1xT": outside, "multiplicity_match": match, "shift_injective": injective})
        report["checks"].append(entry)
        report["passed"] = report["passed"] and passed
        if outside:
            logger.warning(f"h_{r}: {outside} interior eigenvectors outside 1 (x) T")
    logger.info(f"Eigenvector location at D={D}, depth {depth}, window {window}: passed={report['passed']}")
    return report
