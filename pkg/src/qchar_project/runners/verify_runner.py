import logging
import random

from qchar_project.characters.closedforms import (
    order_compatibility_check,
    qchar_multiplicativity_check,
    random_negative_lweight,
    verify_decomposition,
)
from qchar_project.config import settings
from qchar_project.errors import InconsistencyError
from qchar_project.knowledge import CheckLedger
from qchar_project.modules.asymstd import (
    stability_report,
    triangularity_report,
    xminus_divergence_witness,
)
from qchar_project.modules.borelneg import (
    eigenvector_location_check,
    linear_oracle_check,
    pbw_normalize,
)
from qchar_project.runners.base_runner import QCharBaseRunner

logger = logging.getLogger(__name__)

TARGETS = ("decomp", "multiplicativity", "triangularity", "induced", "stability", "divergence", "oracle")


class VerifyRunner(QCharBaseRunner):
    def __init__(self, name="verify_runner", config=None, ledger=None):
        super().__init__(
            name=name,
            role="Verification",
            config=config,
            ledger=ledger if ledger is not None else CheckLedger(),
        )

    def process_request(self, message):
        """Process verification requests"""
        action = message.get("action")
        if action != "verify":
            return {"error": "Unknown action requested.", "requested_action": action}
        target = message.get("target", "all")
        if target != "all" and target not in TARGETS:
            return {"error": "Unknown verification target.", "requested_target": target}
        try:
            self.update_status(f"verifying {target}")
            checks = []
            for name in TARGETS if target == "all" else (target,):
                checks.extend(getattr(self, f"verify_{name}")(message))
            passed = all(check["passed"] for check in checks)
            self.update_status("standby")
            logger.info(f"Verification of {target}: {'passed' if passed else 'FAILED'} ({len(checks)} checks)")
            return {
                "schema": settings.SCHEMA_VERSION,
                "target": target,
                "passed": passed,
                "checks": checks,
            }
        except Exception as e:
            logger.error(f"Error verifying {target}: {e}")
            self.update_status("error")
            return {"error": f"Error processing request: {e}", "error_type": type(e).__name__}

    def _check(self, name, anchor, passed, details):
        event = self.ledger.record(name, anchor, passed, details)
        if not passed:
            logger.warning(f"Check {name} ({anchor}) failed")
        return event

    def verify_decomp(self, message):
        report = verify_decomposition(self.config.window, self.config.degcap)
        passed = report["equal"] and report["multiplicity_free"]
        return [self._check("decomposition", "decomposition-theorem", passed, report)]

    def verify_multiplicativity(self, message):
        samples = message.get("samples", 100)
        rng = random.Random(self.config.seed)
        failures = []
        for _ in range(samples):
            psi1, psi2 = random_negative_lweight(rng), random_negative_lweight(rng)
            if not qchar_multiplicativity_check(psi1, psi2, self.config.window, self.config.degcap):
                failures.append([psi1.to_text(), psi2.to_text()])
        ordered = order_compatibility_check(samples, self.config.seed)
        return [
            self._check(
                "multiplicativity",
                "limit-qchar-multiplicative",
                not failures,
                {"samples": samples, "failures": failures},
            ),
            self._check("order_compatibility", "lweight-order-product", ordered, {"samples": samples}),
        ]

    def verify_triangularity(self, message):
        report = triangularity_report(
            self.config.depth, message.get("positions", 4), message.get("rmax", 3)
        )
        return [self._check("triangularity", "h-action-triangular", report["passed"], report)]

    def verify_induced(self, message):
        report = eigenvector_location_check(
            message.get("D", 4),
            message.get("depth", self.config.depth),
            message.get("positions", 3),
            tuple(message.get("rset", (1,))),
        )
        return [self._check("induced", "induced-lweights-in-1xT", report["passed"], report)]

    def verify_stability(self, message):
        report = stability_report(message.get("max_position", 3), message.get("mmax", 3), message.get("rmax", 3))
        return [self._check("stability", "coproduct-stability", report["passed"], report)]

    def verify_divergence(self, message):
        n = message.get("N", 3)
        try:
            coefficients = [str(c) for c in xminus_divergence_witness(n)]
            return [self._check("divergence", "xminus-has-no-limit", True, {"N": n, "coefficients": coefficients})]
        except InconsistencyError as e:
            return [self._check("divergence", "xminus-has-no-limit", False, {"N": n, "reason": str(e)})]

    def verify_oracle(self, message):
        D = message.get("D", 4)
        words = message.get("words", 200)
        checks = [self._check("pbw_oracle", "pbw-basis", linear_oracle_check(D), {"D": D})]
        rng = random.Random(self.config.seed)
        disagreements = []
        for i in range(words):
            word = [rng.randint(1, 6) for _ in range(rng.randint(1, 5))]
            if pbw_normalize(word) != pbw_normalize(word, strategy="random", seed=self.config.seed + i):
                disagreements.append(word)
        checks.append(
            self._check(
                "pbw_confluence",
                "pbw-rewriting-confluent",
                not disagreements,
                {"words": words, "disagreements": disagreements},
            )
        )
        return checks
