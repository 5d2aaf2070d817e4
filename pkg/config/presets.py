"""Coefficient triples (f0, f1, f2) for the elliptic family.

Each coefficient is a tagged spec (kind, coefficient, q_shift) with kind one of
"one", "zero", "theta0", "theta1", meaning coefficient * q^q_shift * X for
X = 1, 0, theta_0(v), theta_1(v).  Presets flagged as controls skip the
invariant gate so that they can be built and shown to fail.
"""
from fractions import Fraction

from utils.errors import ConfigError

ONE = ("one", 1, 0)
ZERO = ("zero", 0, 0)

PRESETS = {
    "minimal": {
        "f": (ONE, ONE, ZERO),
        "description": "f = (1, 1, 0); Upsilon = theta_0(v)",
    },
    "theta": {
        "f": (ONE, ("theta0", 1, 0), ("theta1", 1, 1)),
        "description": "f = (1, theta_0(v), q theta_1(v)); satisfies the v-shift eigen-condition",
    },
    "shifted": {
        "f": (ONE, ("one", 1, Fraction(1, 2)), ("one", 1, Fraction(5, 4))),
        "description": "f = (1, q^1/2, q^5/4) with c1 = 1/2 > 0",
    },
    "broken-odd": {
        "f": (ONE, ONE, ZERO),
        "description": "minimal with an odd lattice-class term added to E([2])",
        "control": True,
        "inject_odd": True,
    },
    "broken-f1": {
        "f": (ONE, ("one", 2, 0), ZERO),
        "description": "f1 = 2, leading coefficient not 1",
        "control": True,
    },
    "broken-c2": {
        "f": (ONE, ONE, ("one", 1, Fraction(1, 4))),
        "description": "f2 = q^1/4, so c2 = c1 + 1/4",
        "control": True,
    },
}


def get_preset(name):
    """Helper function to get a preset by name"""
    if name not in PRESETS:
        raise ConfigError(f"unknown preset '{name}'")
    return PRESETS[name]


def control_presets():
    """Names of the negative-control presets"""
    return [name for name, preset in PRESETS.items() if preset.get("control")]
