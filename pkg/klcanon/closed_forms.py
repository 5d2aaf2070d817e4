"""Closed forms of the K-theoretic canonical bases and their transition matrices.

All matrices are twisted by sqrt(L(kappa)) and laid out with columns indexed by
the basis point ([2], [1,1]) and rows by the restriction point.
"""
from geometry.limits import GENERIC, INTEGER_WALL, Slope
from series.lattice import A, V, Z
from series.laurent import LaurentMatrix


def canonical_generic_closed_form(s):
    s = Slope.of(s)
    if not s.is_generic:
        raise ValueError(f"slope {s} lies on a wall")
    m = s.m
    if s.lower_half:
        col2 = [V ** (2 * m) * A, V ** (2 * m) * A ** (2 * m)]
        col11 = [V ** (2 * m + 1) * A ** (-2 * m), V ** (2 * m + 1) * A]
    else:
        col2 = [V ** (2 * m + 1) * A, V ** (2 * m + 1) * A ** (2 * m + 2)]
        col11 = [V ** (2 * m + 2) * A ** (-2 * m - 2), V ** (2 * m + 2) * A]
    return LaurentMatrix.from_columns([col2, col11])


def canonical_wall_closed_form(s):
    s = Slope.of(s)
    if s.is_generic:
        raise ValueError(f"slope {s} is generic")
    m = s.m
    if s.classification == INTEGER_WALL:
        col2 = [
            V ** (2 * m) * A - V ** (2 * m) / Z,
            V ** (2 * m) * A ** (2 * m) - V ** (2 * m) * A ** (2 * m + 1) / Z,
        ]
        col11 = [
            V ** (2 * m + 1) * A ** (-2 * m) - V ** (2 * m - 1) * A ** (-2 * m + 1) / Z,
            V ** (2 * m + 1) * A - V ** (2 * m - 1) / Z,
        ]
    else:
        col2 = [V ** (2 * m + 1) * A, V ** (2 * m + 1) * A ** (2 * m + 2)]
        col11 = [
            V ** (2 * m + 2) * A ** (-2 * m - 2) + V ** (2 * m) * A ** (-2 * m) / Z**2,
            V ** (2 * m + 2) * A + V ** (2 * m) / (A * Z**2),
        ]
    return LaurentMatrix.from_columns([col2, col11])


def canonical_closed_form(s):
    s = Slope.of(s)
    if s.is_generic:
        return canonical_generic_closed_form(s)
    return canonical_wall_closed_form(s)


def transition_closed_form(s):
    """(E^-1 Stab_s, E^-1 (-v Stab_{-X,s})) as displayed for each slope type"""
    s = Slope.of(s)
    m = s.m
    kind = s.classification
    if kind == GENERIC:
        k = 2 * m + 1 if s.lower_half else 2 * m + 3
        j = 2 * m - 1 if s.lower_half else 2 * m + 1
        T = [[1, -A ** (-k) / V], [-A**j / V, 1]]
        T_minus = [[1, -V * A ** (-k)], [-V * A**j, 1]]
    elif kind == INTEGER_WALL:
        T = [
            [
                (1 - 1 / (V**2 * A * Z)) / (1 - 1 / (V * Z**2)),
                -A ** (-2 * m - 1) / V * (1 - V**2 * A / Z) / (1 - V / Z**2),
            ],
            [
                -A ** (2 * m - 1) / V * (1 - A / Z) / (1 - 1 / (V * Z**2)),
                (1 - 1 / (A * Z)) / (1 - V / Z**2),
            ],
        ]
        T_minus = [
            [
                (1 - V**2 / (A * Z)) / (1 - V / Z**2),
                -V * A ** (-2 * m - 1) * (1 - A / (V**2 * Z)) / (1 - 1 / (V * Z**2)),
            ],
            [
                -V * A ** (2 * m - 1) * (1 - A / Z) / (1 - V / Z**2),
                (1 - 1 / (A * Z)) / (1 - 1 / (V * Z**2)),
            ],
        ]
    else:
        T = [
            [
                (1 + 1 / (V**2 * A**2 * Z**2)) / (1 - 1 / (V * Z**2)),
                -A ** (-2 * m - 3) / V * (1 + V**2 * A**2 / Z**2) / (1 - V / Z**2),
            ],
            [
                -A ** (2 * m + 1) / V / (1 - 1 / (V * Z**2)),
                1 / (1 - V / Z**2),
            ],
        ]
        T_minus = [
            [
                (1 + V**2 / (A**2 * Z**2)) / (1 - V / Z**2),
                -V * A ** (-2 * m - 3) * (1 + A**2 / (V**2 * Z**2)) / (1 - 1 / (V * Z**2)),
            ],
            [
                -V * A ** (2 * m + 1) / (1 - V / Z**2),
                1 / (1 - 1 / (V * Z**2)),
            ],
        ]
    return LaurentMatrix(T), LaurentMatrix(T_minus)
