"""Floating-point oracle for the symbolic checks.

Both sides of every identity are evaluated from theta products and closed forms at seeded
random complex points. Labels prefixed "engine" put the truncated engine pieces through
eval_series instead and are held to its truncation bound. Points are kept as logarithms and x^e means exp(e log x), so formal identities with
half-integral exponents hold pointwise without branch bookkeeping.
"""
import logging
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from config.settings import DEFAULT_POINTS, DEFAULT_QMAG, DEFAULT_SEED, DEFAULT_TOL
from elliptic.checks import A_COLUMN, A_ROW, K_LIMIT_SLOPE, extract_leading, predicted_leading, v_shift_factor
from elliptic.family import FCoeffs, GMatrix, build_family, default_budgets
from geometry.model import P2, P11, POINTS, DualPairModel, hilb2_model
from geometry.stab import HILB2_STAB, qdiff_ratio
from series.lattice import VARIABLES, Monomial, Series, lattice, lattice_denominator
from series.theta import theta_tilde
from utils.reports import make_report

logger = logging.getLogger(__name__)

PRECISION = 1e-15
DEGENERATE = 1e-6
LOG_SPREAD = math.log(2)
ENGINE_MARGIN = 100.0
MAX_RESAMPLES = 50
CLASS_RADIUS = 24
JTP_RADIUS = 30
ENGINE_ORDER = 2
# z-shifts checked against the quasi-periodicity of G, besides the unit one
Z_PERIODS = (-1, 2)
# q-modulus at which the q -> 0 limits are read off
LIMIT_QMAG = 1e-16

_ROW = {name: i for i, name in enumerate(VARIABLES)}


def factor_count(qmax):
    """Smallest M with qmax^M below PRECISION, plus one"""
    if qmax <= 0:
        return 1
    return int(math.ceil(math.log(PRECISION) / math.log(qmax))) + 1


def _qmax(q):
    return float(np.max(np.abs(q)))


def euler_num(q):
    """(q;q)_inf"""
    q = np.asarray(q, dtype=complex)
    total = np.ones_like(q)
    for m in range(1, factor_count(_qmax(q)) + 1):
        total = total * (1 - q**m)
    return total


def theta_num(x, q, root=None):
    """(x^1/2 - x^-1/2) prod_m (1 - q^m x)(1 - q^m/x).

    x^1/2 is numpy's principal square root unless `root` is passed.
    """
    x = np.asarray(x, dtype=complex)
    q = np.asarray(q, dtype=complex)
    root = np.sqrt(x) if root is None else np.asarray(root, dtype=complex)
    total = root - 1 / root
    for m in range(1, factor_count(_qmax(q)) + 1):
        qm = q**m
        total = total * (1 - qm * x) * (1 - qm / x)
    return total


def _exponents(mono: Monomial):
    return np.array(mono.key, dtype=float) / mono.denominator


@dataclass(frozen=True)
class EvalPoint:
    """A batch of points (q, a, z, v), stored as logarithms of shape (4, n)"""

    logs: np.ndarray

    @classmethod
    def sample(cls, rng: np.random.Generator, n, qmag=DEFAULT_QMAG, spread=LOG_SPREAD):
        """a, z, v on the annulus exp(-spread) < |x| < exp(spread), |q| = qmag"""
        moduli = rng.uniform(-spread, spread, size=(4, n))
        phases = rng.uniform(-np.pi, np.pi, size=(4, n))
        moduli[0] = math.log(qmag)
        return cls(moduli + 1j * phases)

    def __len__(self):
        return self.logs.shape[1]

    def value(self, var):
        return np.exp(self.logs[_ROW[var]])

    @property
    def q(self):
        return self.value("q")

    @property
    def a(self):
        return self.value("a")

    @property
    def z(self):
        return self.value("z")

    @property
    def v(self):
        return self.value("v")

    def log_of(self, mono: Monomial):
        return _exponents(mono) @ self.logs

    def power(self, mono: Monomial):
        return float(mono.coeff) * np.exp(self.log_of(mono))

    def shifted(self, var, amount=1):
        """var -> q^amount var"""
        logs = self.logs.copy()
        logs[_ROW[var]] += float(amount) * logs[0]
        return EvalPoint(logs)

    def inverted(self, *names):
        logs = self.logs.copy()
        for name in names:
            logs[_ROW[name]] = -logs[_ROW[name]]
        return EvalPoint(logs)

    def swap_az(self):
        logs = self.logs.copy()
        logs[[1, 2]] = logs[[2, 1]]
        return EvalPoint(logs)

    def where(self, mask, other: "EvalPoint"):
        return EvalPoint(np.where(mask[None, :], other.logs, self.logs))


# -- theta functions at points ---------------------------------------------------------


def theta_at(pt: EvalPoint, arg: Monomial):
    log_x = pt.log_of(arg)
    return theta_num(np.exp(log_x), pt.q, np.exp(log_x / 2))


def theta_tilde_at(pt: EvalPoint, arg: Monomial):
    """sum_m (-1)^m q^((m+1/2)^2/2) x^(m+1/2) through the triple product"""
    return theta_at(pt, arg) * np.exp(pt.logs[0] / 8) * euler_num(pt.q)


def theta01_at(pt: EvalPoint, kind, arg: Monomial):
    """theta_0(x) = sum q^(l^2) x^(2l) and theta_1(x) = sum q^((l+1/2)^2) x^(2l+1) as products"""
    q = pt.q
    x = np.exp(pt.log_of(arg))
    w = x * x
    total = np.ones_like(x)
    for m in range(1, factor_count(_qmax(q)) + 1):
        if kind == 0:
            total = total * (1 - q ** (2 * m)) * (1 + q ** (2 * m - 1) * w) * (1 + q ** (2 * m - 1) / w)
        else:
            total = total * (1 - q ** (2 * m)) * (1 + q ** (2 * m) * w) * (1 + q ** (2 * m) / w)
    if kind == 1:
        total = total * np.exp(pt.logs[0] / 4) * (x + 1 / x)
    return total


def eval_series(series: Series, pt: EvalPoint, margin=ENGINE_MARGIN):
    """(values, truncation bound) by direct summation; the bound is margin |q|^order, 0 if exact"""
    n = len(pt)
    if not len(series):
        values = np.zeros(n, dtype=complex)
    else:
        keys = np.array(list(series.keys()), dtype=float) / series.denominator
        coeffs = np.array([float(c) for c in series.terms.values()])
        values = coeffs @ np.exp(keys @ pt.logs)
    if series.is_exact:
        return values, np.zeros(n)
    return values, margin * np.abs(pt.q) ** float(series.order)


@lru_cache(maxsize=None)
def _engine_family(f: FCoeffs, order, denominator):
    with lattice(denominator):
        return build_family(f, order, default_budgets())


def engine_family(f: FCoeffs, order=ENGINE_ORDER):
    """The engine family of f at `order` on the active lattice, built once"""
    return _engine_family(f, Fraction(order), lattice_denominator())


# -- closed forms ---------------------------------------------------------------------------


class ClosedForms:
    """The family, its Upsilon and the stable basis of Hilb^2 evaluated at batches of points"""

    def __init__(self, f: FCoeffs, model: DualPairModel = None, order=ENGINE_ORDER):
        self.f = f
        self.model = model or hilb2_model()
        self.gmatrix = GMatrix()
        self.order = order

    @property
    def family(self):
        """The truncated engine family the eval_series comparisons read from"""
        return engine_family(self.f, self.order)

    @property
    def eigen_applies(self):
        """f0 constant and f1, f2 theta functions of v, so every entry is a v-shift eigenvector"""
        specs = self.f.specs
        return specs[0].kind == "one" and all(specs[i].kind in ("theta0", "theta1") and not specs[i].is_zero for i in (1, 2))

    def coefficient(self, pt, i):
        spec = self.f.specs[i]
        if spec.is_zero:
            return np.zeros(len(pt), dtype=complex)
        scale = float(spec.coeff) * np.exp(float(spec.q_shift) * pt.logs[0])
        if spec.kind == "one":
            return scale
        kind = 0 if spec.kind == "theta0" else 1
        return scale * theta01_at(pt, kind, Monomial.of(v=1))

    def e11_piece(self, pt, p):
        return theta_tilde_at(pt, Monomial.of(z=1) * self.model.O(p, 1))

    def e11(self, pt, p):
        return self.coefficient(pt, 0) * self.e11_piece(pt, p)

    def e2_piece(self, pt, p, i):
        """theta_i(X) ttheta(Y) with X = a^la z v^(lv-1), Y = a^-la z v^(2-lv)"""
        line = self.model.O(p, 1)
        la, lv = line.exponent("a"), line.exponent("v")
        X = Monomial.of(a=la, z=1, v=lv - 1)
        Y = Monomial.of(a=-la, z=1, v=2 - lv)
        return theta01_at(pt, i, X) * theta_tilde_at(pt, Y)

    def e2(self, pt, p):
        """f1 piece_0 + f2 piece_1"""
        total = self.coefficient(pt, 1) * self.e2_piece(pt, p, 0) + self.coefficient(pt, 2) * self.e2_piece(pt, p, 1)
        if self.f.inject_odd:
            total = total + self.class_sum(pt, p, 1)
        return total

    def class_sum(self, pt, p, lam, radius=CLASS_RADIUS):
        """sum over L - 3M + 3 = lam (mod 8) of (-1)^(M+1) q^((L+M+1)^2/16 + (L-M)^2/8) ..."""
        eps = self.model.eps(p)
        L, M = np.meshgrid(np.arange(-radius, radius + 1), np.arange(-radius, radius + 1))
        L, M = L.ravel(), M.ravel()
        keep = (L - 3 * M + 3 - lam) % 8 == 0
        L, M = L[keep], M[keep]
        exps = np.stack(
            [
                (L + M + 1) ** 2 / 16 + (L - M) ** 2 / 8,
                -(L + 0.5) * eps,
                M + 0.5,
                (L + M + 1) / 2,
            ],
            axis=1,
        )
        signs = np.where(M % 2 == 1, 1.0, -1.0)
        return signs @ np.exp(exps @ pt.logs)

    def restriction(self, pt, mu, p):
        return self.e2(pt, p) if mu == P2 else self.e11(pt, p)

    def matrix(self, pt):
        return [[self.restriction(pt, mu, p) for mu in POINTS] for p in POINTS]

    def upsilon(self, pt):
        v = Monomial.of(v=1)
        inner = self.coefficient(pt, 1) * theta01_at(pt, 0, v) + self.coefficient(pt, 2) * theta01_at(pt, 1, v)
        return self.coefficient(pt, 0) * inner

    def upsilon_prime(self, pt):
        return self.upsilon(pt) * np.exp(pt.logs[0] / 4) * euler_num(pt.q) ** 2

    def stab(self, pt, at, p):
        """Stab(p)|_at"""
        products, dens = HILB2_STAB[(at, p)]
        total = np.zeros(len(pt), dtype=complex)
        for product in products:
            term = np.ones(len(pt), dtype=complex)
            for arg in product:
                term = term * theta_at(pt, arg)
            total = total + term
        for arg in dens:
            total = total / theta_at(pt, arg)
        return total

    def stab_flop(self, pt, at, p):
        """Stab_{-X}(p)|_at: the flop-permuted entry with a -> 1/a"""
        w = self.model.flop_point_map
        return self.stab(pt.inverted("a"), w[at], w[p])

    def normalization_args(self, at, p):
        return self.model.N_minus(at) + self.model.N_dual_minus(p)

    def denominators(self, pt):
        """Smallest |theta| among everything the checks divide by"""
        args = {arg for (_, _), (_, dens) in HILB2_STAB.items() for arg in dens}
        for at in POINTS:
            for p in POINTS:
                args.update(self.normalization_args(at, p))
        return np.min(np.abs(np.stack([theta_at(pt, arg) for arg in sorted(args, key=lambda m: m.key)])), axis=0)


# -- identities -------------------------------------------------------------------------------

# each identity maps (closed forms, points) to [(label, lhs terms, rhs terms)]


def _jtp(cf, pt):
    pairs = []
    for var in ("a", "z", "v"):
        arg = Monomial.of(**{var: 1})
        m = np.arange(-JTP_RADIUS, JTP_RADIUS + 1)[:, None]
        t = m + 0.5
        terms = np.where(m % 2 == 0, 1.0, -1.0) * np.exp(t * t / 2 * pt.logs[0] + t * pt.log_of(arg))
        pairs.append((f"theta({var})", [theta_tilde_at(pt, arg)], [terms.sum(axis=0)]))
    return pairs


def _tt(pt, *args):
    total = np.ones(len(pt), dtype=complex)
    for arg in args:
        total = total * theta_tilde_at(pt, Monomial.of(**arg))
    return total


def _theta_identity(cf, pt):
    pairs = []
    for eps in (0, 1):
        common = _tt(pt, dict(v=-1, a=1), dict(v=1, z=1), dict(z=1, a=1))
        left = [
            common * _tt(pt, dict(v=2, z=-1, a=1)) * theta01_at(pt, eps, Monomial.of(v=1, z=1, a=-1)),
            common * _tt(pt, dict(v=2, z=1, a=-1)) * theta01_at(pt, eps, Monomial.of(v=1, z=-1, a=1)),
        ]
        tail = _tt(pt, dict(v=-2)) * theta01_at(pt, eps, Monomial.of(v=1))
        right = [
            _tt(pt, dict(a=-2), dict(v=1, z=2, a=-1), dict(v=-1, z=1)) * tail,
            _tt(pt, dict(z=-2), dict(v=1, z=1, a=-2), dict(v=-1, a=-1)) * tail,
        ]
        pairs.append((f"eps={eps}", left, right))
    return pairs


def _stab_normalization(cf, pt):
    pairs = []
    for p in POINTS:
        expected = np.ones(len(pt), dtype=complex)
        for w in cf.normalization_args(p, p):
            expected = expected * theta_at(pt, w)
        pairs.append((f"Stab({p})|_{p}", [cf.stab(pt, p, p)], [expected]))
    pairs.append((f"Stab({P2})|_{P11}", [cf.stab(pt, P11, P2)], [np.zeros(len(pt))]))
    return pairs


def _normalized(cf, pt, at, p):
    total = cf.stab(pt, at, p)
    for w in cf.normalization_args(at, p):
        total = total / theta_at(pt, w)
    return total


def _stab_qdiff(cf, pt):
    pairs = []
    for var in ("a", "z", "v"):
        for p in POINTS:
            for at in POINTS:
                if not HILB2_STAB[(at, p)][0]:
                    continue
                ratio = pt.power(qdiff_ratio(cf.model, at, p, var, 1))
                lhs = _normalized(cf, pt.shifted(var), at, p)
                pairs.append((f"{var}: Stab({p})|_{at}", [lhs], [ratio * _normalized(cf, pt, at, p)]))
    return pairs


def _pairing(cf, pt, dual_pt):
    E = cf.matrix(pt)
    Ed = cf.matrix(dual_pt)
    n = len(POINTS)
    return lambda i, k: [E[i][j] * Ed[n - 1 - k][n - 1 - j] for j in range(n)]


def _duality(cf, pt):
    entry = _pairing(cf, pt, pt.swap_az())
    ups = cf.upsilon_prime(pt)
    return [
        (f"({at}, {p})", entry(i, k), [ups * cf.stab(pt, at, p)])
        for i, at in enumerate(POINTS)
        for k, p in enumerate(POINTS)
    ]


def _flop_duality(cf, pt):
    entry = _pairing(cf, pt, pt.swap_az().inverted("v"))
    ups = cf.upsilon_prime(pt)
    return [
        (f"({at}, {p})", entry(i, k), [-ups * cf.stab_flop(pt, at, p)])
        for i, at in enumerate(POINTS)
        for k, p in enumerate(POINTS)
    ]


def _qdiff_z(cf, pt):
    shifted = pt.shifted("z")
    pairs = []
    for mu in POINTS:
        for p in POINTS:
            factor = pt.power(cf.gmatrix.factor(cf.model, mu, p))
            pairs.append((f"E({mu})|_{p}", [cf.restriction(shifted, mu, p)], [factor * cf.restriction(pt, mu, p)]))
    return pairs


def _point_swap(cf, pt):
    flipped = pt.inverted("a")
    return [
        (f"E({mu})|_{p}(1/a)", [cf.restriction(flipped, mu, p)], [cf.restriction(pt, mu, other)])
        for mu in POINTS
        for p, other in ((P2, P11), (P11, P2))
    ]


def _bar_relation(cf, pt):
    bar, flipped = pt.inverted("v"), pt.inverted("a", "z")
    return [
        (f"E({mu})|_{p}", [cf.restriction(bar, mu, p)], [-cf.restriction(flipped, mu, p)])
        for mu in POINTS
        for p in POINTS
    ]


def _engine(pt, series: Series, factor=1.0):
    """(factor * series, factor * truncation bound) with the series summed by eval_series"""
    values, bound = eval_series(series, pt)
    return factor * values, np.abs(factor) * bound


def _qdiff_a(cf, pt):
    shifted = pt.shifted("a")
    fam = cf.family
    pairs = []
    for mu in POINTS:
        for p in POINTS:
            factor = pt.power(A_ROW[p] * A_COLUMN[mu])
            lhs = cf.restriction(shifted, mu, p)
            pairs.append((f"E({mu})|_{p}", [lhs], [factor * cf.restriction(pt, mu, p)]))
            rhs, bound = _engine(pt, fam.restriction(mu, p), factor)
            pairs.append((f"engine E({mu})|_{p}", [lhs], [rhs], bound))
    return pairs


def _qdiff_v(cf, pt):
    """E11 and E2 displays, then the eigen-condition and the eigenvalue x_p where they apply"""
    shifted = pt.shifted("v")
    fam = cf.family
    f = {i: cf.coefficient(shifted, i) for i in range(3)}
    pairs = []
    for p in POINTS:
        factor = pt.power(v_shift_factor(cf.model, p, -2))
        lhs = cf.e11(shifted, p)
        pairs.append((f"E11|_{p}", [lhs], [factor * f[0] * cf.e11_piece(pt, p)]))
        rhs, bound = _engine(pt, fam.piece("e11", p), factor * f[0])
        pairs.append((f"engine E11|_{p}", [lhs], [rhs], bound))

        factor = pt.power(v_shift_factor(cf.model, p, -1) * Monomial.of(v=2))
        lhs = cf.e2(shifted, p)
        pieces = [(factor * f[i + 1], i) for i in (0, 1) if not cf.f.specs[i + 1].is_zero]
        pairs.append((f"E2|_{p}", [lhs], [c * cf.e2_piece(pt, p, i) for c, i in pieces]))
        engine = [_engine(pt, fam.piece("e2", p, i), c) for c, i in pieces]
        pairs.append((f"engine E2|_{p}", [lhs], [x for x, _ in engine], sum(b for _, b in engine)))
    if not cf.eigen_applies:
        return pairs
    step = pt.power(Monomial.of(q=-1, v=-2))
    f0 = cf.coefficient(pt, 0)
    for i in (1, 2):
        pairs.append((f"eigen f{i}", [f[i] * f0], [step * cf.coefficient(pt, i) * f[0]]))
    for p in POINTS:
        x_p = pt.power(v_shift_factor(cf.model, p, -2))
        for mu in POINTS:
            pairs.append((f"x_p E({mu})|_{p}", [cf.restriction(shifted, mu, p)], [x_p * cf.restriction(pt, mu, p)]))
    return pairs


def z_shift_factor(cf, mu, p, lam):
    """delta_z^lam E(mu)|_p / E(mu)|_p = (-1)^lam q^(-G lam^2/2) z^(-G lam) O(-lam)|_p"""
    G = cf.gmatrix[mu]
    return Monomial.of(-1 if lam % 2 else 1, q=Fraction(-G * lam * lam, 2), z=-G * lam) * cf.model.O(p, -lam)


def _z_periodicity(cf, pt):
    fam = cf.family
    pairs = []
    for lam in Z_PERIODS:
        shifted = pt.shifted("z", lam)
        for mu in POINTS:
            for p in POINTS:
                factor = pt.power(z_shift_factor(cf, mu, p, lam))
                lhs = cf.restriction(shifted, mu, p)
                pairs.append((f"z^{lam}: E({mu})|_{p}", [lhs], [factor * cf.restriction(pt, mu, p)]))
                rhs, bound = _engine(pt, fam.restriction(mu, p), factor)
                pairs.append((f"engine z^{lam}: E({mu})|_{p}", [lhs], [rhs], bound))
    return pairs


def _k_limit_normalization(cf, pt, s=K_LIMIT_SLOPE):
    """q^-r delta_z^-s E(mu)|_p tends to v z^1/2 O(-1/2) for E2 and z^1/2 O(1/2) for E11"""
    fam = cf.family
    shifted = pt.shifted("z", -s)
    expected = {
        P2: lambda p: Monomial.of(v=1, z=Fraction(1, 2)) * cf.model.O(p, Fraction(-1, 2)),
        P11: lambda p: Monomial.of(z=Fraction(1, 2)) * cf.model.O(p, Fraction(1, 2)),
    }
    # the next q-order after delta_z^-s sits at least min(s, 1/2 - s) above the leading one
    bound = ENGINE_MARGIN * np.abs(pt.q) ** float(min(s, Fraction(1, 2) - s))
    table, _ = predicted_leading(fam, s)
    pairs = []
    for mu in POINTS:
        r, _ = table[mu]
        r_engine, slices = extract_leading(fam, mu, s)
        for p in POINTS:
            value = cf.restriction(shifted, mu, p)
            target = [pt.power(expected[mu](p))]
            pairs.append((f"E({mu})|_{p}", [value * np.exp(-float(r) * pt.logs[0])], target, bound))
            leading, slice_bound = eval_series(slices[p], pt)
            lhs = value * np.exp(-float(r_engine) * pt.logs[0])
            pairs.append((f"engine E({mu})|_{p}", [lhs], [leading], bound + slice_bound))
            pairs.append((f"engine slice E({mu})|_{p}", [leading], target, slice_bound))
    return pairs


def _same(pt):
    return (pt,)


@dataclass(frozen=True)
class OracleIdentity:
    evaluate: Callable
    # points the evaluation divides at, for the degeneracy guard
    guard_points: Callable = _same
    # log-modulus spread of a, z, v; 0 keeps them on the unit circle where eval_series bounds hold
    spread: float = LOG_SPREAD
    # fixed |q| overriding the requested one
    qmag: Optional[float] = None


IDENTITIES: Dict[str, OracleIdentity] = {
    "jtp": OracleIdentity(_jtp),
    "theta-identity": OracleIdentity(_theta_identity),
    "stab-normalization": OracleIdentity(_stab_normalization),
    "stab-qdiff": OracleIdentity(_stab_qdiff, lambda pt: (pt, pt.shifted("a"), pt.shifted("z"), pt.shifted("v"))),
    "duality": OracleIdentity(_duality),
    "qdiff-z": OracleIdentity(_qdiff_z),
    "point-swap": OracleIdentity(_point_swap),
    "bar-relation": OracleIdentity(_bar_relation),
    "flop-duality": OracleIdentity(_flop_duality, lambda pt: (pt, pt.inverted("a"))),
    "qdiff-a": OracleIdentity(_qdiff_a, spread=0.0),
    "qdiff-v": OracleIdentity(_qdiff_v, spread=0.0),
    "z-periodicity": OracleIdentity(_z_periodicity, spread=0.0),
    "k-limit-normalization": OracleIdentity(_k_limit_normalization, spread=0.0, qmag=LIMIT_QMAG),
}

ORACLE_IDENTITIES = tuple(IDENTITIES) + ("engine",)


def relative_error(lhs_terms, rhs_terms, n, bound=0.0):
    """|lhs - rhs| beyond `bound`, relative to the sum of the absolute values of all summands"""
    lhs = sum(np.broadcast_to(t, (n,)) for t in lhs_terms)
    rhs = sum(np.broadcast_to(t, (n,)) for t in rhs_terms)
    scale = sum(np.abs(np.broadcast_to(t, (n,))) for t in list(lhs_terms) + list(rhs_terms))
    diff = np.maximum(np.abs(lhs - rhs) - bound, 0.0)
    return np.where(scale > 0, diff / np.where(scale > 0, scale, 1.0), 0.0)


def sample_points(rng, n, qmag, guard, spread=LOG_SPREAD):
    """Sample n points, resampling those where guard(points) is below DEGENERATE"""
    pt = EvalPoint.sample(rng, n, qmag, spread)
    resampled = 0
    for _ in range(MAX_RESAMPLES):
        bad = guard(pt) < DEGENERATE
        if not bad.any():
            break
        count = int(bad.sum())
        resampled += count
        logger.warning("resampling %d degenerate points", count)
        pt = pt.where(bad, EvalPoint.sample(rng, n, qmag, spread))
    return pt, resampled


def _rng(seed, name):
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return np.random.default_rng([seed, ORACLE_IDENTITIES.index(name)])


def check_identity(cf: ClosedForms, name, points=DEFAULT_POINTS, qmag=DEFAULT_QMAG, tol=DEFAULT_TOL, seed=DEFAULT_SEED, suite="numeric"):
    started = time.perf_counter()
    identity = IDENTITIES[name]

    def guard(pt):
        return np.min(np.stack([cf.denominators(x) for x in identity.guard_points(pt)]), axis=0)

    qmag = identity.qmag or qmag
    pt, resampled = sample_points(_rng(seed, name), points, qmag, guard, identity.spread)
    failures = []
    worst = 0.0
    # engine labels carry the truncation bound of their eval_series side
    for label, lhs, rhs, *bound in identity.evaluate(cf, pt):
        error = float(np.max(relative_error(lhs, rhs, len(pt), *bound)))
        worst = max(worst, error)
        if not error < tol:
            failures.append(f"{label}: max relative error {error:.3g}")
    detail = {"seed": seed, "points": points, "qmag": qmag, "max_error": worst, "resampled": resampled}
    return make_report(suite, name, failures, started, detail=detail)


def check_engine_agreement(f: FCoeffs, order=2, points=DEFAULT_POINTS, qmag=DEFAULT_QMAG, seed=DEFAULT_SEED, suite="numeric"):
    """Truncated engine series against the closed forms at unit-modulus a, z, v"""
    started = time.perf_counter()
    cf = ClosedForms(f)
    pt = EvalPoint.sample(_rng(seed, "engine"), points, qmag, spread=0.0)
    fam = engine_family(f, order)
    cases = [("ttheta(a)", theta_tilde(Monomial.of(a=1), order + 1), theta_tilde_at(pt, Monomial.of(a=1)))]
    for mu in POINTS:
        for p in POINTS:
            cases.append((f"E({mu})|_{p}", fam.restriction(mu, p), cf.restriction(pt, mu, p)))
    failures = []
    fitted = 0.0
    for label, series, expected in cases:
        values, bound = eval_series(series, pt)
        error = np.abs(values - expected)
        fitted = max(fitted, float(np.max(error * ENGINE_MARGIN / bound)))
        if np.any(error > bound):
            failures.append(f"{label}: error {float(np.max(error)):.3g} above {float(np.min(bound)):.3g}")
    detail = {"seed": seed, "points": points, "qmag": qmag, "fitted_constant": fitted}
    return make_report(suite, "engine", failures, started, order=order, detail=detail)


def oracle_suite(
    f: FCoeffs,
    names: Tuple[str, ...] = ORACLE_IDENTITIES,
    points=DEFAULT_POINTS,
    qmag=DEFAULT_QMAG,
    tol=DEFAULT_TOL,
    seed=DEFAULT_SEED,
    order=2,
):
    """One report per named identity; a fixed seed gives identical reports apart from timings"""
    cf = ClosedForms(f, order=order)
    reports = []
    for name in names:
        if name == "engine":
            reports.append(check_engine_agreement(f, order, points, qmag, seed))
        elif name in IDENTITIES:
            reports.append(check_identity(cf, name, points, qmag, tol, seed))
        else:
            raise ValueError(f"unknown oracle identity '{name}'")
    return reports
