import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Tuple

from dotenv import load_dotenv

from utils.errors import ConfigError

load_dotenv()


def _env_int(name, default):
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got '{raw}'")


THREADS = _env_int("ELLCAN_THREADS", 4)
DENOMINATOR = _env_int("ELLCAN_DENOMINATOR", 48)
ORDER = os.getenv("ELLCAN_ORDER", "3")
DB_PATH = os.getenv("ELLCAN_DB_PATH", "verification_runs.db")
REPORT_DIR = os.getenv("ELLCAN_REPORT_DIR", "reports")
LOG_LEVEL = os.getenv("ELLCAN_LOG_LEVEL", "INFO")

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

# numeric oracle defaults
DEFAULT_SEED = 0
DEFAULT_POINTS = 20
DEFAULT_QMAG = 0.1
DEFAULT_TOL = 1e-9


def parse_rational(text):
    """Parse '3', '1/4' or '-3/4' into a Fraction"""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"'{text}' is not a rational number")


def slope_fits(slope, denominator):
    """True when delta_z^slope keeps half-integral z-exponents on the 1/denominator lattice"""
    return (Fraction(slope) * denominator / 2).denominator == 1


@dataclass
class RunConfig:
    denominator: int = DENOMINATOR
    order: Fraction = field(default_factory=lambda: parse_rational(ORDER))
    preset: str = "theta"
    slopes: Tuple[Fraction, ...] = ()
    seed: int = DEFAULT_SEED
    points: int = DEFAULT_POINTS
    qmag: float = DEFAULT_QMAG
    tol: float = DEFAULT_TOL
    json_path: Optional[str] = None
    threads: int = THREADS

    def validate(self):
        """Check the run configuration and raise ConfigError on the first problem"""
        from config.presets import PRESETS

        if self.denominator <= 0 or self.denominator % 48 != 0:
            raise ConfigError(f"denominator {self.denominator} is not a positive multiple of 48")
        if self.order <= 0:
            raise ConfigError(f"order must be positive, got {self.order}")
        if (self.order * self.denominator).denominator != 1:
            raise ConfigError(f"order {self.order} is not on the 1/{self.denominator} lattice")
        for slope in self.slopes:
            if not slope_fits(slope, self.denominator):
                raise ConfigError(
                    f"slope {slope} shifts z^(1/2) off the 1/{self.denominator} lattice"
                )
        if self.preset not in PRESETS:
            raise ConfigError(f"unknown preset '{self.preset}'")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.points < 1:
            raise ConfigError("points must be at least 1")
        if not 0 < self.qmag < 1:
            raise ConfigError(f"qmag must lie in (0, 1), got {self.qmag}")
        return self

    def to_dict(self):
        return {
            "denominator": self.denominator,
            "order": str(self.order),
            "preset": self.preset,
            "slopes": [str(s) for s in self.slopes],
            "seed": self.seed,
            "points": self.points,
            "qmag": self.qmag,
            "tol": self.tol,
            "threads": self.threads,
        }
