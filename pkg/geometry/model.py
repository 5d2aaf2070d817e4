"""Fixed-point data of a dual pair and the Hilbert scheme of 2 points.

Each side of a dual pair is written in its own equivariant variable `a`
(with `v` the conical parameter).  Data of the dual side is moved into
the global variables by the a <-> z identification.
"""
import logging
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, Tuple

from series.lattice import Monomial, Series
from utils.reports import make_report

logger = logging.getLogger(__name__)

P2 = "[2]"
P11 = "[1,1]"
POINTS = (P2, P11)

_LAMBDA_WINDOW = range(-2, 3)


def mono(coeff=1, q=0, a=0, z=0, v=0):
    return Monomial.of(coeff, q, a, z, v)


@dataclass(frozen=True)
class FixedPoint:
    id: str
    tangent: Tuple[Monomial, ...]
    tautological: Tuple[Monomial, ...]
    line_bundle: Monomial
    eps: int = 1
    ind_rank: int = 1
    ind_dual_rank: int = 1


@dataclass(frozen=True)
class Side:
    """One conical symplectic resolution with its (H, K, L, xi, eta, kappa) data"""

    name: str
    points: Tuple[FixedPoint, ...]
    kappa: Tuple[int, int]
    xi: int = 1
    eta: int = 1
    dim: int = 2
    line_sign: int = 1

    def point(self, pid):
        for p in self.points:
            if p.id == pid:
                return p
        raise KeyError(pid)

    def N_minus(self, pid):
        return tuple(w for w in self.point(pid).tangent if self.xi * w.a < 0)

    def N_plus(self, pid):
        return tuple(w for w in self.point(pid).tangent if self.xi * w.a > 0)

    def L(self, pid, lam, alpha=0):
        """a^alpha L(lam)|_p in this side's own variables"""
        return self.point(pid).line_bundle ** (self.line_sign * Fraction(lam)) * mono(a=alpha)

    def polarization(self, pid):
        """T^1/2|_p = V + (v^-1 a - 1) V^dual V - v^-1 a"""
        taut = sum((m.to_series() for m in self.point(pid).tautological), Series.zero())
        dual = taut.invert("a").invert("v")
        return taut + (mono(a=1, v=-1).to_series() - 1) * dual * taut - mono(a=1, v=-1).to_series()

    def det_polarization(self, pid):
        det = mono()
        for key, coeff in self.polarization(pid).items():
            m = Monomial(1, *key)
            for _ in range(abs(coeff)):
                det = det * (m if coeff > 0 else m.inverse())
        return det

    def opposite(self):
        return replace(self, name=f"-{self.name}", xi=-self.xi)


def _det(weights):
    det = mono()
    for w in weights:
        det = det * w
    return det


@dataclass(frozen=True)
class DualPairModel:
    """A side X, its dual X^!, and the identifications between them"""

    X: Side
    X_dual: Side
    dual_point_map: Dict[str, str]
    flop_point_map: Dict[str, str] = field(default_factory=dict)
    sigma: Dict[str, int] = field(default_factory=dict)

    @property
    def point_ids(self):
        return tuple(p.id for p in self.X.points)

    @property
    def dim_X(self):
        return self.X.dim

    @property
    def kappa(self):
        return self.X.kappa

    def index(self, pid):
        return self.point_ids.index(pid)

    def eps(self, pid):
        return self.X.point(pid).eps

    def dual(self, pid):
        return self.dual_point_map[pid]

    def N_minus(self, pid):
        return self.X.N_minus(pid)

    def N_plus(self, pid):
        return self.X.N_plus(pid)

    def N_dual_minus(self, pid):
        """N_{p^!,-} in the global variables (its equivariant variable is z)"""
        return tuple(w.swap_az() for w in self.X_dual.N_minus(self.dual(pid)))

    def det_N_minus(self, pid):
        return _det(self.N_minus(pid))

    def det_N_dual_minus(self, pid):
        return _det(self.N_dual_minus(pid))

    def L(self, pid, lam, alpha=0):
        return self.X.L(pid, lam, alpha)

    def O(self, pid, power):
        """O(power)|_p for rational power"""
        return self.X.point(pid).line_bundle ** Fraction(power)

    def L_dual(self, pid, lam, alpha=0):
        """L^!(lam)|_{p^!} in the global variables"""
        return self.X_dual.L(self.dual(pid), lam, alpha).swap_az()

    def sqrt_L_kappa(self, pid, sign=1):
        """sqrt(L(+-kappa))|_p"""
        lam, alpha = self.X.kappa
        return self.L(pid, sign * lam, sign * alpha).sqrt()

    def sigma_sign(self, pid):
        return self.sigma.get(pid, 1)


def _hilb2_points():
    # V|_[2] = 1 + v a^-1, V|_[1,1] = 1 + v a, O(1) = v det V
    return (
        FixedPoint(
            P2,
            tangent=(mono(a=-2), mono(a=2, v=-2)),
            tautological=(mono(), mono(a=-1, v=1)),
            line_bundle=mono(a=-1, v=2),
            eps=1,
        ),
        FixedPoint(
            P11,
            tangent=(mono(a=-2, v=-2), mono(a=2)),
            tautological=(mono(), mono(a=1, v=1)),
            line_bundle=mono(a=1, v=2),
            eps=-1,
        ),
    )


def hilb2_side(kappa=(1, 3)):
    return Side("Hilb2", _hilb2_points(), kappa=tuple(kappa), xi=1, eta=1)


def flop_side():
    """X_flop with L_flop(lam) = L(-lam), kappa_flop = (-1, 3), points relabelled"""
    base = {p.id: p for p in _hilb2_points()}
    relabelled = (replace(base[P11], id=P2), replace(base[P2], id=P11))
    return Side("Hilb2-flop", relabelled, kappa=(-1, 3), xi=1, eta=-1, line_sign=-1)


def hilb2_model(kappa=(1, 3)):
    """The self-dual Hilbert scheme of 2 points with a^! = z, z^! = a, [2]^! = [1,1]"""
    side = hilb2_side(kappa)
    return DualPairModel(
        X=side,
        X_dual=side,
        dual_point_map={P2: P11, P11: P2},
        flop_point_map={P2: P11, P11: P2},
        sigma={P2: 1, P11: 1},
    )


def flop_pair_model():
    """The pair (-X, X_flop) with [2]^! = [1,1]_flop and [1,1]^! = [2]_flop"""
    return DualPairModel(
        X=hilb2_side().opposite(),
        X_dual=flop_side(),
        dual_point_map={P2: P11, P11: P2},
        flop_point_map={P2: P11, P11: P2},
        sigma={P2: -1, P11: -1},
    )


# -- dual pair axioms -------------------------------------------------------


def _weights_equal(series, weights):
    target = Series.zero()
    for w in weights:
        target = target + w.to_series()
    ok, _ = series.equal_up_to(target)
    return ok


def _axiom(name, failures, started, suite):
    return make_report(suite, name, failures, started)


def check_dual_pair_axioms(model: DualPairModel, suite="dual-pair"):
    """Evaluate each bullet of the dual-pair definition on a finite generating set"""
    X, Xd = model.X, model.X_dual
    reports = []

    started = time.perf_counter()
    failures = []
    if X.xi != Xd.eta:
        failures.append(f"xi={X.xi} but eta^!={Xd.eta}")
    if X.eta != Xd.xi:
        failures.append(f"eta={X.eta} but xi^!={Xd.xi}")
    reports.append(_axiom("cocharacters", failures, started, suite))

    started = time.perf_counter()
    failures = []
    for pid in model.point_ids:
        for lam in _LAMBDA_WINDOW:
            for lam_d in _LAMBDA_WINDOW:
                lhs = X.L(pid, lam).exponent("a") * lam_d
                rhs = -Xd.L(model.dual(pid), lam_d).exponent("a") * lam
                if lhs != rhs:
                    failures.append(f"{pid} lam={lam} lam!={lam_d}: {lhs} != {rhs}")
    reports.append(_axiom("weight-pairing", failures, started, suite))

    started = time.perf_counter()
    failures = []
    for pid in model.point_ids:
        det_dual = _det(Xd.N_minus(model.dual(pid)))
        det_own = _det(X.N_minus(pid))
        for lam in _LAMBDA_WINDOW:
            if X.L(pid, lam).exponent("v") != -det_dual.exponent("a") * lam:
                failures.append(f"wt_S L({lam})|_{pid}")
            if Xd.L(model.dual(pid), lam).exponent("v") != -det_own.exponent("a") * lam:
                failures.append(f"wt_S L^!({lam})|_{pid}^!")
    reports.append(_axiom("s-weights", failures, started, suite))

    started = time.perf_counter()
    failures = []
    for pid in model.point_ids:
        own = _det(X.N_minus(pid)).exponent("v") + Fraction(X.dim, 2)
        dual = _det(Xd.N_minus(model.dual(pid))).exponent("v") + Fraction(Xd.dim, 2)
        if own != -dual:
            failures.append(f"{pid}: {own} != -({dual})")
    reports.append(_axiom("dimension", failures, started, suite))

    started = time.perf_counter()
    failures = []
    for pid in model.point_ids:
        for w in X.N_minus(pid):
            m, alpha = w.exponent("v"), w.exponent("a")
            if (m - alpha * Xd.kappa[0]) % 2 != 0:
                failures.append(f"{w} in N_{pid},-")
    reports.append(_axiom("parity", failures, started, suite))

    started = time.perf_counter()
    failures = []
    for pid in model.point_ids:
        for w in Xd.N_minus(model.dual(pid)):
            m, beta = w.exponent("v"), w.exponent("a")
            if (m - beta * X.kappa[0]) % 2 != 0:
                failures.append(f"{w.swap_az()} in N_{pid}^!,-")
    reports.append(_axiom("parity-dual", failures, started, suite))

    for side, label in ((X, "polarization"), (Xd, "polarization-dual")):
        started = time.perf_counter()
        failures = []
        for p in side.points:
            half = side.polarization(p.id)
            full = half + half.invert("a").invert("v") * mono(v=-2).to_series()
            if not _weights_equal(full, p.tangent):
                failures.append(f"T|_{p.id} = {full.render()}")
        reports.append(_axiom(label, failures, started, suite))

    for side, label in ((X, "kappa"), (Xd, "kappa-dual")):
        started = time.perf_counter()
        failures = []
        for p in side.points:
            lam, alpha = side.kappa
            # det T^1/2 = L(kappa) in Pic^H: compare H-weights
            if side.det_polarization(p.id).exponent("a") != side.L(p.id, lam, alpha).exponent("a"):
                failures.append(f"det T^1/2|_{p.id} = {side.det_polarization(p.id)} vs L(kappa) = {side.L(p.id, lam, alpha)}")
        reports.append(_axiom(label, failures, started, suite))

    logger.debug("dual pair axioms for %s: %s", X.name, [(r.check, r.status) for r in reports])
    return reports
