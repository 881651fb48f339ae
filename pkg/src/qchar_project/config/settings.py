import os
from dataclasses import dataclass, replace
from fractions import Fraction

from dotenv import load_dotenv

from qchar_project.errors import ConfigError

# Load environment variables from .env file
load_dotenv()

LOG_LEVEL = os.getenv("QCHAR_LOG_LEVEL", "INFO")

# Hard bounds
MAX_SPECTRAL = int(os.getenv("QCHAR_MAX_SPECTRAL", 64))
MAX_DEGREE = int(os.getenv("QCHAR_MAX_DEGREE", 32))
MAX_TENSOR_DIM = int(os.getenv("QCHAR_MAX_TENSOR_DIM", 4096))
SYMBOLIC_DIM_LIMIT = int(os.getenv("QCHAR_SYMBOLIC_DIM_LIMIT", 256))
STABILIZATION_MAX_N = int(os.getenv("QCHAR_STABILIZATION_MAX_N", 64))
PBW_STEP_BUDGET = int(os.getenv("QCHAR_PBW_STEP_BUDGET", 200000))
COEFFICIENT_BOUND = 2**63 - 1

# CLI defaults
DEFAULT_WINDOW = os.getenv("QCHAR_WINDOW", "-8:0")
DEFAULT_DEGCAP = int(os.getenv("QCHAR_DEGCAP", 4))
DEFAULT_DEPTH = int(os.getenv("QCHAR_DEPTH", 2))
DEFAULT_Q = os.getenv("QCHAR_Q", "symbolic")
DEFAULT_SEED = int(os.getenv("QCHAR_SEED", 0))
DEFAULT_FORMAT = os.getenv("QCHAR_FORMAT", "json")

SCHEMA_VERSION = 1


def parse_window(text):
    """Parse ``"rmin:rmax"`` into a pair of ints."""
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError:
        raise ConfigError(f"window must look like 'rmin:rmax', got {text!r}")


def parse_qmode(text):
    """Parse ``"symbolic"`` or ``"a,b"`` (two rationals) into a qmode value.

    Returns:
        None for symbolic mode, otherwise a tuple of two Fractions.
    """
    if text is None or text.strip().lower() == "symbolic":
        return None
    try:
        values = tuple(Fraction(part.strip()) for part in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"--q must be 'symbolic' or 'a,b', got {text!r}")
    if len(values) != 2:
        raise ConfigError(f"--q needs exactly two specialization points, got {text!r}")
    return values


@dataclass(frozen=True)
class RunConfig:
    window: tuple = (-8, 0)
    degcap: int = 4
    depth: int = 2
    qmode: tuple = None
    seed: int = 0
    format: str = "json"

    @classmethod
    def from_env(cls):
        return cls(
            window=parse_window(DEFAULT_WINDOW),
            degcap=DEFAULT_DEGCAP,
            depth=DEFAULT_DEPTH,
            qmode=parse_qmode(DEFAULT_Q),
            seed=DEFAULT_SEED,
            format=DEFAULT_FORMAT,
        )

    def with_overrides(self, **changes):
        """Return a copy with every non-None keyword applied."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    def validate(self):
        rmin, rmax = self.window
        if rmin > rmax:
            raise ConfigError(f"window lower bound {rmin} exceeds upper bound {rmax}")
        if max(abs(rmin), abs(rmax)) > MAX_SPECTRAL:
            raise ConfigError(f"window {self.window} exceeds QCHAR_MAX_SPECTRAL={MAX_SPECTRAL}")
        if self.degcap < 0 or self.depth < 0:
            raise ConfigError("degcap and depth must be non-negative")
        if self.degcap > MAX_DEGREE:
            raise ConfigError(f"degcap {self.degcap} exceeds QCHAR_MAX_DEGREE={MAX_DEGREE}")
        if self.qmode is not None:
            a, b = self.qmode
            if a == b:
                raise ConfigError("the two specialization points must differ")
            if {a, b} & {0, 1, -1}:
                raise ConfigError("specialization points must avoid 0, 1 and -1")
        if self.format not in ("json", "text"):
            raise ConfigError(f"unknown output format {self.format!r}")
        return self
