"""Canonical bases on walls, the wall-crossing bijection and the classes it generates."""
import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, FrozenSet, Tuple

import sympy

from geometry.limits import INTEGER_WALL, Slope, k_stab_closed_form, wall_denominators_ok
from geometry.model import P2, P11, POINTS, DualPairModel, hilb2_model
from klcanon.bar import KClass, bar_apply, bar_data, transition_matrices
from klcanon.closed_forms import canonical_closed_form, canonical_wall_closed_form, transition_closed_form
from series.lattice import A, V, Z
from series.laurent import LaurentFraction
from utils.reports import make_report

logger = logging.getLogger(__name__)

WALL_OFFSET = Fraction(1, 4)
DEFAULT_PAD = 3


@dataclass(frozen=True, order=True)
class CanLabel:
    """v^eps x^m O(n) with x the equivariant variable a (or z on the dual side)"""

    eps: int
    m: int
    n: int
    var: str = "a"

    def __post_init__(self):
        if self.eps not in (-1, 0, 1):
            raise ValueError(f"label exponent of v must be -1, 0 or 1, got {self.eps}")

    @property
    def node(self):
        """The label modulo character twists"""
        return self.eps, self.n

    def __str__(self):
        v = {-1: "v^-1 ", 0: "", 1: "v "}[self.eps]
        return f"{v}{self.var}^{self.m} O({self.n})"


def _exponents(x):
    expr = sympy.expand(sympy.cancel(LaurentFraction.of(x).expr))
    if expr == 0 or len(sympy.Add.make_args(expr)) != 1:
        raise ValueError(f"{expr} is not a monomial")
    powers = expr.as_powers_dict()
    if powers.get(Z, 0):
        raise ValueError(f"{expr} depends on z")
    return int(powers.get(A, 0)), int(powers.get(V, 0))


def label_of(x):
    """Read the label of a twisted monomial class (restrictions at [2], [1,1]); signs are ignored"""
    values = x.values if isinstance(x, KClass) else tuple(x)
    a2, v2 = _exponents(values[0])
    a11, v11 = _exponents(values[1])
    if v2 != v11 or (a11 - a2 - 1) % 2:
        raise ValueError("restrictions do not come from a line bundle times v^eps a^m")
    n = (a11 - a2 - 1) // 2
    return CanLabel(eps=v2 - 2 * n - 1, m=a2 + n - 1, n=n)


def canonical_wall(s):
    return canonical_wall_closed_form(s)


def expected_beta_max(s, pid):
    s = Slope.of(s)
    if s.classification == INTEGER_WALL:
        return 1
    return 2 if pid == P11 else 0


def _z_parts(values):
    """{beta: coefficient vector of z^-beta} of a vector of Laurent polynomials in z^-1"""
    parts: Dict[int, list] = {}
    for i, x in enumerate(values):
        expr = sympy.expand(sympy.cancel(LaurentFraction.of(x).expr))
        for term in sympy.Add.make_args(expr):
            if term == 0:
                continue
            beta = -int(term.as_powers_dict().get(Z, 0))
            vector = parts.setdefault(beta, [0] * len(values))
            vector[i] += term * Z**beta
    return {beta: tuple(LaurentFraction(x) for x in vector) for beta, vector in parts.items()}


def _v_exponents(x):
    expr = sympy.expand(sympy.cancel(LaurentFraction.of(x).expr))
    if expr == 0:
        return []
    _, den = sympy.fraction(sympy.together(expr))
    if len(sympy.Add.make_args(sympy.expand(den))) != 1:
        return None
    return [int(t.as_powers_dict().get(V, 0)) for t in sympy.Add.make_args(expr)]


def _all_v_negative(coords):
    for c in coords:
        powers = _v_exponents(c)
        if powers is None or any(e >= 0 for e in powers):
            return False
    return True


def _all_v_positive(coords):
    for c in coords:
        powers = _v_exponents(c)
        if powers is None or any(e <= 0 for e in powers):
            return False
    return True


def _twist_to(vector, target):
    """k with vector = +-a^k target, or None"""
    ratios = []
    for x, y in zip(vector, target):
        if x.is_zero or y.is_zero:
            if not (x.is_zero and y.is_zero):
                return None
            continue
        ratios.append(sympy.cancel((x / y).expr))
    if not ratios or any(sympy.simplify(r - ratios[0]) != 0 for r in ratios):
        return None
    sign = 1 if ratios[0].could_extract_minus_sign() is False else -1
    rest = sympy.cancel(sign * ratios[0])
    powers = rest.as_powers_dict()
    if rest.free_symbols - {A} or set(powers) - {A, 1}:
        return None
    return int(powers.get(A, 0))


@dataclass(frozen=True)
class WallCrossing:
    slope: Slope
    pairs: Tuple[Tuple[CanLabel, CanLabel], ...]
    beta_max: Tuple[Tuple[str, int], ...]

    def image(self, label: CanLabel):
        for source, target in self.pairs:
            if source.node == label.node:
                return CanLabel(target.eps, label.m + target.m - source.m, target.n, label.var)
        raise KeyError(str(label))


def _wall_pieces(s):
    s = Slope.of(s)
    E = canonical_wall(s)
    E_plus = canonical_closed_form(s.value + WALL_OFFSET)
    E_minus = canonical_closed_form(s.value - WALL_OFFSET)
    pieces = {}
    for j, p in enumerate(POINTS):
        diff = KClass.column(E, j) - KClass.column(E_plus, j)
        pieces[p] = _z_parts(diff.values)
    return E, E_plus, E_minus, pieces


def wall_crossing_map(s):
    """Pairs (label of E_{s+}(p), label of the z^-beta_max coefficient) for every point p"""
    s = Slope.of(s)
    if s.is_generic:
        raise ValueError(f"slope {s} is not a wall")
    return _crossing(s)


@lru_cache(maxsize=None)
def _crossing(s: Slope):
    _, E_plus, _, pieces = _wall_pieces(s)
    pairs = []
    beta_max = []
    for j, p in enumerate(POINTS):
        source = label_of(KClass.column(E_plus, j))
        top = max(pieces[p], default=0)
        target = label_of(pieces[p][top]) if top else source
        pairs.append((source, target))
        beta_max.append((p, top))
    return WallCrossing(s, tuple(pairs), tuple(beta_max))


def check_wall(s, suite="klcanon"):
    """Bar invariance and wall-crossing shape of the canonical basis on a wall"""
    s = Slope.of(s)
    bd = bar_data(s)
    E, E_plus, E_minus, pieces = _wall_pieces(s)
    reports = []

    started = time.perf_counter()
    T, T_minus = transition_matrices(E, bd)
    shown, shown_minus = transition_closed_form(s)
    failures = [f"T{ij}" for ij in T.mismatches(shown)]
    failures += [f"T_minus{ij}" for ij in T_minus.mismatches(shown_minus)]
    failures += [f"bar(T){ij}" for ij in T_minus.mismatches(T.bar_v())]
    for j, p in enumerate(POINTS):
        element = KClass.column(E, j)
        if not bar_apply(bd, element) == element:
            failures.append(f"E({p}) is not bar invariant")
    if not wall_denominators_ok(k_stab_closed_form(s)):
        failures.append("stable basis denominators outside (1 - v^+-1 z^-2)")
    reports.append(make_report(suite, f"wall-bar s={s}", failures, started))

    started = time.perf_counter()
    failures = []
    plus_columns = [KClass.column(E_plus, j) for j in range(len(POINTS))]
    minus_columns = [KClass.column(E_minus, j) for j in range(len(POINTS))]
    for p in POINTS:
        parts = pieces[p]
        top = max(parts, default=0)
        if top != expected_beta_max(s, p):
            failures.append(f"{p}: beta_max {top}, expected {expected_beta_max(s, p)}")
        if (s.value * top).denominator != 1:
            failures.append(f"{p}: <s, beta_max> = {s.value * top} is not integral")
        for beta, vector in sorted(parts.items()):
            if beta <= 0:
                failures.append(f"{p}: correction in z^{-beta}")
                continue
            coords_plus = KClass(vector).coordinates(E_plus)
            if beta < top:
                if (s.value * beta).denominator != 1:
                    failures.append(f"{p}: z^-{beta} with <s, beta> not integral")
                if not _all_v_negative(coords_plus):
                    failures.append(f"{p}: F_{beta} not in v^-1 Z[v^-1] over the s+ basis")
                if not _all_v_positive(KClass(vector).coordinates(E_minus)):
                    failures.append(f"{p}: F_{beta} not in v Z[v] over the s- basis")
                continue
            if not any(_twist_to(vector, target.values) is not None for target in minus_columns):
                failures.append(f"{p}: z^-{beta} coefficient is not +-a^k E_s-(p')")
            if not _all_v_negative(coords_plus):
                failures.append(f"{p}: wall-crossing term not in v^-1 Z[v^-1] over the s+ basis")
        if not top and not KClass.column(E, POINTS.index(p)) == plus_columns[POINTS.index(p)]:
            failures.append(f"{p}: no correction but E_s differs from E_s+")
    reports.append(make_report(suite, f"wall-shape s={s}", failures, started))
    return reports


class UnionFind:
    def __init__(self, items=()):
        self.parent = {item: item for item in items}

    def add(self, item):
        self.parent.setdefault(item, item)

    def find(self, item):
        root = item
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[item] != root:
            self.parent[item], item = root, self.parent[item]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)


def _node_forest(low, high):
    forest = UnionFind((eps, n) for eps in (-1, 0, 1) for n in range(low, high + 1))
    for m in range(low - 1, high + 2):
        for s in (Fraction(m), Fraction(2 * m + 1, 2)):
            for source, target in wall_crossing_map(s).pairs:
                if source.node in forest.parent and target.node in forest.parent:
                    forest.union(source.node, target.node)
    return forest


@dataclass(frozen=True)
class XiPartition:
    window: int
    classes: Tuple[FrozenSet[CanLabel], ...]
    iota: Tuple[str, ...]

    def class_of(self, label: CanLabel):
        for index, members in enumerate(self.classes):
            if label in members:
                return index
        raise KeyError(str(label))

    def point_of(self, label: CanLabel):
        return self.iota[self.class_of(label)]


def xi_classes(window=3, pad=DEFAULT_PAD):
    """Equivalence classes of labels v^eps a^m O(n), |m|, |n| <= window, and the point each is sent to"""
    if window < 0 or pad < 1:
        raise ValueError("window must be >= 0 and pad >= 1")
    forest = _node_forest(-window - pad, window + pad)
    grouped: Dict[tuple, set] = {}
    for eps in (-1, 0, 1):
        for m in range(-window, window + 1):
            for n in range(-window, window + 1):
                grouped.setdefault(forest.find((eps, n)), set()).add(CanLabel(eps, m, n))
    classes = tuple(sorted((frozenset(x) for x in grouped.values()), key=min))
    E = canonical_closed_form(WALL_OFFSET)
    roots = {forest.find(label_of(KClass.column(E, j)).node): p for j, p in enumerate(POINTS)}
    iota = tuple(roots.get(forest.find(min(members).node)) for members in classes)
    logger.debug("window %d: %d classes", window, len(classes))
    return XiPartition(window, classes, iota)


def same_class(first: CanLabel, second: CanLabel, pad=DEFAULT_PAD):
    reach = max(abs(first.n), abs(second.n))
    forest = _node_forest(-reach - pad, reach + pad)
    return forest.find(first.node) == forest.find(second.node)


def dual_class_map(label: CanLabel, partition: XiPartition = None, model: DualPairModel = None):
    """[a^m O(n)] -> [v^+-1 z^m O(n)] and [v^+-1 a^m O(n)] -> [z^m O(n)] through iota and the point duality"""
    model = model or hilb2_model()
    if partition is None or abs(label.n) > partition.window or abs(label.m) > partition.window:
        partition = xi_classes(max(abs(label.n), abs(label.m)))
    target = model.dual(partition.point_of(label))
    eps = 0 if target == P11 else 1
    return CanLabel(eps, label.m, label.n, var="z")


def check_periodicity(s, model: DualPairModel = None, suite="klcanon"):
    """E at s + 1 is O(1) (x) E at s up to a character twist of each column"""
    s = Slope.of(s)
    model = model or hilb2_model()
    started = time.perf_counter()
    E = canonical_closed_form(s)
    shifted = canonical_closed_form(s.value + 1)
    failures = []
    for j, p in enumerate(POINTS):
        twisted = [
            LaurentFraction(model.O(at, 1).to_sympy()) * E[i, j] for i, at in enumerate(POINTS)
        ]
        if _twist_to(shifted.column(j), twisted) is None:
            failures.append(f"E({p}) at {s.value + 1} is not a twist of O(1) E({p}) at {s}")
    return make_report(suite, f"periodicity s={s}", failures, started)


def check_classes(window=3, suite="klcanon"):
    """Two classes on the window, sent to [1,1] (eps = 0) and [2] (eps = +-1)"""
    started = time.perf_counter()
    partition = xi_classes(window)
    failures = []
    if len(partition.classes) != 2:
        failures.append(f"{len(partition.classes)} classes")
    for members, point in zip(partition.classes, partition.iota):
        kinds = {label.eps == 0 for label in members}
        if len(kinds) != 1:
            failures.append(f"class of {min(members)} mixes eps = 0 with eps = +-1")
        elif point != (P11 if kinds.pop() else P2):
            failures.append(f"class of {min(members)} sent to {point}")
    for label in (CanLabel(0, 0, 0), CanLabel(1, 0, 0)):
        image = dual_class_map(label, partition)
        if (image.eps == 0) == (label.eps == 0):
            failures.append(f"dual class of {label} is {image}")
    detail = {"classes": [sorted(str(x) for x in c)[:3] for c in partition.classes], "iota": list(partition.iota)}
    return make_report(suite, f"classes window={window}", failures, started, detail=detail)
