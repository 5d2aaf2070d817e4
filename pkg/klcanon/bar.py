"""K-theoretic bar involution and the canonical-basis solver."""
import logging
import time
from dataclasses import dataclass
from typing import Tuple

import sympy

from geometry.limits import Slope, k_stab, k_stab_closed_form, stab_minus
from geometry.model import POINTS, flop_pair_model, hilb2_model
from klcanon.closed_forms import canonical_generic_closed_form, transition_closed_form
from series.lattice import V
from series.laurent import LaurentFraction, LaurentMatrix
from utils.errors import NoCanonicalSolutionError
from utils.reports import make_report

logger = logging.getLogger(__name__)


def _apply(matrix: LaurentMatrix, values):
    n = matrix.size
    return tuple(sum((matrix[i, k] * values[k] for k in range(n)), LaurentFraction(0)) for i in range(n))


@dataclass(frozen=True, eq=False)
class KClass:
    """An element of the localized K-group by its restrictions to the fixed points"""

    values: Tuple[LaurentFraction, ...]
    points: Tuple[str, ...] = POINTS

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(LaurentFraction.of(x) for x in self.values))
        if len(self.values) != len(self.points):
            raise ValueError("one restriction per fixed point")

    @classmethod
    def column(cls, matrix: LaurentMatrix, j, points=POINTS):
        return cls(tuple(matrix.column(j)), tuple(points))

    def __getitem__(self, pid):
        return self.values[self.points.index(pid)]

    def __eq__(self, other):
        if not isinstance(other, KClass):
            return NotImplemented
        return self.points == other.points and all(x == y for x, y in zip(self.values, other.values))

    __hash__ = None

    def __add__(self, other):
        return KClass(tuple(x + y for x, y in zip(self.values, other.values)), self.points)

    def __sub__(self, other):
        return KClass(tuple(x - y for x, y in zip(self.values, other.values)), self.points)

    def scale(self, factor):
        return KClass(tuple(x * factor for x in self.values), self.points)

    def bar_v(self):
        return KClass(tuple(x.bar_v() for x in self.values), self.points)

    def coordinates(self, basis: LaurentMatrix):
        """Coefficients of self in the basis given by the columns of `basis`"""
        return _apply(basis.inverse(), self.values)

    def render(self):
        return ", ".join(f"{p}: {x.render()}" for p, x in zip(self.points, self.values))


@dataclass(frozen=True)
class BarData:
    S_plus: LaurentMatrix
    S_minus: LaurentMatrix
    dim_half: int = 1

    @property
    def size(self):
        return self.S_plus.size

    @property
    def sign(self):
        """(-v)^(dim X / 2)"""
        return (-V) ** self.dim_half

    def bar_matrix(self):
        """B with T B = bar(T) for every bar-invariant basis E = S_plus T^-1"""
        return self.S_plus.inverse() @ self.S_minus.scale(self.sign)


def bar_data(s, engine=False, model=None):
    """Bar data at slope s from the closed forms, or from the K-limit engine"""
    s = Slope.of(s)
    if engine:
        model = model or hilb2_model()
        return BarData(k_stab(model, s), k_stab(flop_pair_model(), s))
    S = k_stab_closed_form(s)
    return BarData(S, stab_minus(S))


def bar_apply(bd: BarData, x: KClass):
    """Expand in Stab_s, conjugate v coefficientwise and resum in (-v)^(dim/2) Stab_{-X,s}"""
    coords = _apply(bd.S_plus.inverse(), x.values)
    conj = tuple(c.bar_v() for c in coords)
    image = _apply(bd.S_minus.scale(bd.sign), conj)
    return KClass(image, x.points)


def _ansatz(size, degree):
    blocks = []
    for k in range(1, degree + 1):
        blocks.append(sympy.Matrix(size, size, lambda i, j, k=k: sympy.Symbol(f"t_{k}_{i}_{j}")))
    unknowns = [x for block in blocks for x in block]
    T = sympy.eye(size)
    T_bar = sympy.eye(size)
    for k, block in enumerate(blocks, start=1):
        T += block * V ** (-k)
        T_bar += block * V**k
    return unknowns, T, T_bar


def _equations(residual):
    equations = []
    for entry in residual:
        num, _ = sympy.fraction(sympy.together(entry))
        num = sympy.expand(num)
        if num != 0:
            equations.extend(sympy.Poly(num, V).coeffs())
    return equations


def default_degree_bound(s):
    return 4 * abs(Slope.of(s).m) + 8


def canonical_solve(bd: BarData, degree_bound=8):
    """The bar-invariant basis E = S_plus T^-1 with T = 1 + O(v^-1) in Laurent entries"""
    B = bd.bar_matrix().to_sympy()
    for degree in range(1, degree_bound + 1):
        unknowns, T, T_bar = _ansatz(bd.size, degree)
        solutions = sympy.linsolve(_equations(T * B - T_bar), unknowns)
        if not isinstance(solutions, sympy.FiniteSet) or len(solutions) == 0:
            continue
        (values,) = tuple(solutions)
        free = set().union(*(sympy.sympify(x).free_symbols for x in values)) & set(unknowns)
        if free:
            raise NoCanonicalSolutionError(degree, reason="solution is not unique")
        logger.debug("canonical basis found with v-degree %d", degree)
        T = LaurentMatrix.from_sympy(T.subs(dict(zip(unknowns, values))).applyfunc(sympy.cancel))
        E = bd.S_plus @ T.inverse()
        for i in range(E.size):
            for j in range(E.size):
                if not E[i, j].is_laurent():
                    raise NoCanonicalSolutionError(degree, reason="basis entries are not Laurent")
        return E
    raise NoCanonicalSolutionError(degree_bound)


def transition_matrices(E: LaurentMatrix, bd: BarData):
    """(E^-1 S_plus, E^-1 (-v)^(dim/2) S_minus)"""
    inverse = E.inverse()
    return inverse @ bd.S_plus, inverse @ bd.S_minus.scale(bd.sign)


def _v_limit_failures(T: LaurentMatrix):
    failures = []
    for i in range(T.size):
        for j in range(T.size):
            entry = T[i, j] - 1 if i == j else T[i, j]
            if entry.is_zero:
                continue
            degree = entry.cancel().degree("v")
            if degree >= 0:
                failures.append(f"T[{i}, {j}] has v-degree {degree}")
    return failures


def check_canonical(s, bd: BarData = None, suite="klcanon"):
    """Solver output against the closed form plus the defining properties at a generic slope"""
    s = Slope.of(s)
    bd = bd or bar_data(s)
    reports = []

    started = time.perf_counter()
    try:
        E = canonical_solve(bd, default_degree_bound(s))
    except NoCanonicalSolutionError as exc:
        return [make_report(suite, f"solve s={s}", [str(exc)], started)]
    expected = canonical_generic_closed_form(s)
    failures = [f"E[{i}, {j}] = {E[i, j].render()}" for i, j in E.mismatches(expected)]
    reports.append(make_report(suite, f"solve s={s}", failures, started))

    started = time.perf_counter()
    T, T_minus = transition_matrices(E, bd)
    shown, shown_minus = transition_closed_form(s)
    failures = [f"T{ij}" for ij in T.mismatches(shown)]
    failures += [f"T_minus{ij}" for ij in T_minus.mismatches(shown_minus)]
    failures += [f"bar(T){ij}" for ij in T_minus.mismatches(T.bar_v())]
    reports.append(make_report(suite, f"transition s={s}", failures, started))

    started = time.perf_counter()
    failures = []
    for j, p in enumerate(POINTS):
        basis = KClass.column(bd.S_plus, j)
        if not bar_apply(bd, bar_apply(bd, basis)) == basis:
            failures.append(f"bar(bar(Stab({p}))) differs from Stab({p})")
        element = KClass.column(E, j)
        if not bar_apply(bd, element) == element:
            failures.append(f"E({p}) is not bar invariant")
    reports.append(make_report(suite, f"bar s={s}", failures, started))

    started = time.perf_counter()
    reports.append(make_report(suite, f"v-limit s={s}", _v_limit_failures(T), started))
    return reports


def check_engine_canonical(s, model=None, suite="klcanon"):
    """Canonical basis solved from the engine K-limits of both chambers"""
    s = Slope.of(s)
    started = time.perf_counter()
    bd = bar_data(s, engine=True, model=model)
    closed = bar_data(s)
    failures = [f"S_plus{ij}" for ij in bd.S_plus.mismatches(closed.S_plus)]
    failures += [f"S_minus{ij}" for ij in bd.S_minus.mismatches(closed.S_minus)]
    reports = [make_report(suite, f"engine s={s}", failures, started)]
    return reports + check_canonical(s, bd, suite)

def check_interval_independence(s1, s2, suite="klcanon"):
    """Two generic slopes in one chamber interval give the same canonical basis"""
    s1, s2 = Slope.of(s1), Slope.of(s2)
    started = time.perf_counter()
    if (s1.m, s1.lower_half) != (s2.m, s2.lower_half):
        raise ValueError(f"slopes {s1} and {s2} lie in different intervals")
    E1 = canonical_solve(bar_data(s1), default_degree_bound(s1))
    E2 = canonical_solve(bar_data(s2), default_degree_bound(s2))
    failures = [f"E{ij}" for ij in E1.mismatches(E2)]
    return make_report(suite, f"interval s={s1},{s2}", failures, started)
