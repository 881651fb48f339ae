import logging
from fractions import Fraction

from qchar_project.algebra.lweights import parse_lweight
from qchar_project.algebra.qseries import stabilization_check
from qchar_project.characters.closedforms import (
    chi_infinity,
    decompose_prefundamental,
    standard_sequence,
)
from qchar_project.config import settings
from qchar_project.modules.asymstd import change_of_basis
from qchar_project.modules.borelneg import eigenvector_location_check
from qchar_project.modules.tensorsim import (
    lweight_decomposition,
    make_eval_module,
    one_dim_module,
    tensor,
)
from qchar_project.runners.base_runner import QCharBaseRunner

logger = logging.getLogger(__name__)

# q-values used when a tensor is too large for symbolic eigen-analysis
FALLBACK_QMODE = (Fraction(2), Fraction(3))


def parse_factors(text):
    """Parse ``"1:-1, 1:-3, [2]"`` into (k, s) pairs and one-dimensional ``("w", w)`` entries."""
    factors = []
    for part in (p.strip() for p in text.split(",")):
        if not part:
            continue
        if part.startswith("[") and part.endswith("]"):
            factors.append(("w", int(part[1:-1])))
            continue
        k, s = part.split(":")
        factors.append((int(k), int(s)))
    return factors


class ComputeRunner(QCharBaseRunner):
    def __init__(self, name="compute_runner", config=None, ledger=None):
        super().__init__(name=name, role="Character computation", config=config, ledger=ledger)

    def process_request(self, message):
        """Process computation requests"""
        action = message.get("action")
        try:
            if action == "qchar":
                return self.compute_qchar(message["expr"])
            elif action == "limit":
                return self.compute_limit(message["expr"], message.get("n_max"))
            elif action == "decompose":
                return self.decompose(message.get("r", 0))
            elif action == "simulate":
                return self.simulate(message["factors"], message.get("normalized", False))
            elif action == "induce":
                return self.induce(
                    message.get("D", 4),
                    message.get("positions", 3),
                    message.get("rset", (1,)),
                )
            elif action == "basis":
                return self.basis(message.get("positions", 3), message.get("rmax", 3))
            else:
                return {"error": "Unknown action requested.", "requested_action": action}
        except Exception as e:
            logger.error(f"Error processing {action} request: {e}")
            return {"error": f"Error processing request: {e}", "error_type": type(e).__name__}

    def _envelope(self, command, **body):
        return {"schema": settings.SCHEMA_VERSION, "command": command, **body}

    def compute_qchar(self, expr):
        """Normalized limit q-character of an l-weight given as text."""
        psi = parse_lweight(expr)
        series = chi_infinity(psi, self.config.window, self.config.degcap)
        logger.info(f"q-character of {expr}: {len(series)} terms")
        return self._envelope("qchar", input=expr, lweight=psi.to_text(), series=series.to_json())

    def compute_limit(self, expr, n_max=None):
        """Stabilize the standard sequence of ``expr`` and compare it with the closed form."""
        psi = parse_lweight(expr)
        window, degcap = self.config.window, self.config.degcap
        n0, stable = stabilization_check(
            lambda n: standard_sequence(psi, n, window, degcap), window, degcap, n_max
        )
        closed = chi_infinity(psi, window, degcap)
        return self._envelope(
            "limit",
            input=expr,
            n0=n0,
            matches_closed_form=stable.same_terms(closed),
            series=stable.to_json(),
        )

    def decompose(self, r):
        """Simple constituents of the limit module of Psi_{q^r}^{-1}."""
        window, degcap = self.config.window, self.config.degcap
        summands = [
            {
                "tuple": list(item["tuple"].rs),
                "highest_lweight": item["highest_lweight"].to_text(),
                "weight_shift": item["weight_shift"],
                "series": item["series"].to_json(),
            }
            for item in decompose_prefundamental(r, window, degcap)
        ]
        return self._envelope("decompose", r=r, summands=summands)

    def simulate(self, factors, normalized=False):
        """l-weight table of a tensor product of evaluation modules."""
        if isinstance(factors, str):
            factors = parse_factors(factors)
        mods = []
        for k, s in factors:
            mods.append(one_dim_module(s) if k == "w" else make_eval_module(k, s, normalized=normalized))
        t = tensor(mods)
        qmode = self.config.qmode
        if qmode is None and t.dim > settings.SYMBOLIC_DIM_LIMIT:
            logger.warning(f"dimension {t.dim} above QCHAR_SYMBOLIC_DIM_LIMIT; specializing at {FALLBACK_QMODE}")
            qmode = FALLBACK_QMODE
        rows = [
            {"lweight": psi.to_text(), "multiplicity": n}
            for psi, n in lweight_decomposition(t, qmode=qmode)
        ]
        return self._envelope("simulate", dimension=t.dim, rows=rows)

    def induce(self, D, positions, rset=(1,)):
        """Eigenvector location report on the truncated induced module."""
        report = eigenvector_location_check(D, self.config.depth, positions, tuple(rset))
        return self._envelope("induce", passed=report["passed"], report=report)

    def basis(self, positions, rmax=3):
        """v -> w change of basis of the asymptotic standard module, per weight block."""
        return self._envelope("basis", **change_of_basis(self.config.depth, positions, rmax))
