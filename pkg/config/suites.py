from fractions import Fraction

from utils.errors import UnknownSuiteError

SUITES = {
    "dual-pair": {
        "group": "geometry",
        "description": "Dual-pair axioms of the Hilbert scheme model and its flop pairing",
        "needs_preset": False,
        "needs_slope": False,
    },
    "stab-ell": {
        "group": "geometry",
        "description": "Elliptic stable basis: normalization, q-difference equations, sigma-duality",
        "needs_preset": False,
        "needs_slope": False,
    },
    "k-limit": {
        "group": "geometry",
        "description": "K-theory limits of the stable basis against their closed forms",
        "needs_preset": False,
        "needs_slope": True,
    },
    "k-canonical": {
        "group": "klcanon",
        "description": "K-theoretic canonical bases at generic slopes and their transition matrices",
        "needs_preset": False,
        "needs_slope": True,
    },
    "k-canonical-engine": {
        "group": "klcanon",
        "description": "Canonical bases solved from engine K-limits rather than closed forms",
        "needs_preset": False,
        "needs_slope": True,
    },
    "wall": {
        "group": "klcanon",
        "description": "Canonical bases on walls, their shape and the wall-crossing bijection",
        "needs_preset": False,
        "needs_slope": True,
    },
    "classes": {
        "group": "klcanon",
        "description": "Equivalence classes of canonical labels and line-bundle periodicity",
        "needs_preset": False,
        "needs_slope": False,
    },
    "duality": {
        "group": "elliptic",
        "description": "Upsilon Stab = E tE^! for the elliptic canonical family",
        "needs_preset": True,
        "needs_slope": False,
    },
    "qdiff-z": {
        "group": "elliptic",
        "description": "z-shift equations of the family",
        "needs_preset": True,
        "needs_slope": False,
    },
    "qdiff-a": {
        "group": "elliptic",
        "description": "a-shift matrix equation and the lattice-piece recursions",
        "needs_preset": True,
        "needs_slope": False,
    },
    "qdiff-v": {
        "group": "elliptic",
        "description": "v-shift equations and the extracted eigenvalue x_p",
        "needs_preset": True,
        "needs_slope": False,
    },
    "bar": {
        "group": "elliptic",
        "description": "Bar invariance identities and the flop duality equation",
        "needs_preset": True,
        "needs_slope": False,
    },
    "family": {
        "group": "elliptic",
        "description": "Equivalent expansions of E([2]) and single-valuedness of the family",
        "needs_preset": True,
        "needs_slope": False,
    },
    "property-a": {
        "group": "elliptic",
        "description": "Leading terms after delta_z^-s against the K-theoretic canonical bases",
        "needs_preset": True,
        "needs_slope": True,
    },
    "theta-id": {
        "group": "identities",
        "description": "The five-theta identity for epsilon = 0, 1",
        "needs_preset": False,
        "needs_slope": False,
    },
    "h-constraints": {
        "group": "identities",
        "description": "Linear constraints on the lattice-class coefficients forced by duality",
        "needs_preset": True,
        "needs_slope": False,
    },
    "lattice-identities": {
        "group": "identities",
        "description": "f_AB symmetry, the cancelation sums and the leading-exponent matching",
        "needs_preset": False,
        "needs_slope": False,
    },
    "numeric": {
        "group": "numeric",
        "description": "Floating-point oracle at seeded random points",
        "needs_preset": True,
        "needs_slope": False,
    },
}

GROUPS = ("geometry", "klcanon", "elliptic", "identities", "numeric")

# slopes used when none are given on the command line
DEFAULT_SLOPES = {
    "k-limit": tuple(Fraction(x) for x in ("-1", "-3/4", "-1/2", "-1/4", "0", "1/4", "1/2", "3/4", "1", "3/2")),
    "k-canonical": tuple(Fraction(x) for x in ("-7/4", "-5/4", "-3/4", "-1/4", "1/4", "3/4", "5/4", "7/4", "9/4", "11/4")),
    "k-canonical-engine": tuple(Fraction(x) for x in ("-1/4", "1/4", "3/4")),
    "wall": tuple(Fraction(x) for x in ("-1", "-1/2", "0", "1/2", "1")),
    "classes": tuple(Fraction(x) for x in ("0", "1/4", "1/2")),
    "property-a": tuple(Fraction(x) for x in ("0", "1/4", "1/2", "3/4", "1")),
}


def get_suite(name):
    """Helper function to get a suite entry by name"""
    if name not in SUITES:
        raise UnknownSuiteError(name)
    return SUITES[name]


def suites_in_group(group):
    return [name for name, suite in SUITES.items() if suite["group"] == group]


def resolve_suites(names):
    """Expand 'all' and group names into suite names, preserving order"""
    resolved = []
    for name in names:
        if name == "all":
            candidates = list(SUITES)
        elif name in GROUPS:
            candidates = suites_in_group(name)
        else:
            get_suite(name)
            candidates = [name]
        resolved.extend(x for x in candidates if x not in resolved)
    return resolved
