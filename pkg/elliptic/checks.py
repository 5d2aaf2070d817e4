"""Checks of the elliptic canonical family: duality, q-difference equations, bar
invariance, equivalent expansions and the leading terms after delta_z^-s."""
import logging
import time
from fractions import Fraction
from functools import partial

from geometry.limits import Slope
from geometry.model import P2, P11, POINTS
from geometry.stab import stab_ell, stab_ell_flop
from klcanon.closed_forms import canonical_closed_form
from klcanon.walls import WALL_OFFSET, label_of, xi_classes
from elliptic.family import (
    HALF,
    EllCanonicalFamily,
    GMatrix,
    build_family,
    default_budgets,
)
from series.lattice import INF, Budgets, Monomial, Series, product_to_order
from series.theta import ThetaFraction, tf_equal, theta01, theta_tilde
from utils.reports import make_report, residual_terms, shortfall

logger = logging.getLogger(__name__)

RESIDUAL_LIMIT = 3


def _bare(x: Series):
    """Drop the shift budgets; the series stays exact below its watermark"""
    return x.restrict_budgets(a=0, z=0, v=0)


def _strip_q(m: Monomial):
    return Monomial(m.coeff, 0, m.a, m.z, m.v, m.denominator)


def _match(lhs: Series, rhs: Series, factor: Monomial):
    """lhs == factor * rhs, with the q-power of factor moved onto lhs"""
    left = _bare(lhs).shift_q(-factor.exponent("q"))
    right = _bare(rhs) * _strip_q(factor)
    ok, residual = left.equal_up_to(right)
    return ok, residual, min(left.order, right.order)


def _shift_match(x: Series, var, amount, factor: Monomial, rhs: Series = None):
    """delta_var^amount(x) == factor * rhs (rhs defaults to x)"""
    return _match(x.shift(var, amount), x if rhs is None else rhs, factor)


def _record(failures, orders, label, outcome):
    ok, residual, order = outcome
    orders.append(order)
    if not ok:
        failures.append(f"{label}: " + " ".join(residual_terms(residual, RESIDUAL_LIMIT)))


def _low(orders):
    finite = [o for o in orders if o != INF]
    return min(finite) if finite else None


def _mu_name(mu):
    return "E2" if mu == P2 else "E11"


def upsilon_prime(fam: EllCanonicalFamily):
    """Upsilon with the q^(1/4) (q;q)^2 bookkeeping of theta-normalized stable-basis entries"""
    return ThetaFraction(_bare(fam.upsilon), (), 2, Fraction(1, 4))


def _pairing(fam: EllCanonicalFamily, conjugate=None):
    """(E tE^!)[i][k] = sum_j E[i][j] E^![k][j], optionally conjugating the E^! factor"""
    E = [[_bare(x) for x in row] for row in fam.matrix()]
    Ed = [[_bare(x) for x in row] for row in fam.dual_matrix()]
    if conjugate is not None:
        Ed = [[conjugate(x) for x in row] for row in Ed]
    n = len(POINTS)
    return [[sum((E[i][j] * Ed[k][j] for j in range(n)), Series.zero()) for k in range(n)] for i in range(n)]


# -- duality -------------------------------------------------------------------


def check_duality(fam: EllCanonicalFamily, stab=None, order=None, suite="duality"):
    """Upsilon Stab = E tE^! entrywise, E^! by the a <-> z swap with flipped indices"""
    started = time.perf_counter()
    order = fam.order if order is None else Fraction(order)
    stab = stab or stab_ell(fam.model, order, Budgets())
    product = _pairing(fam)
    ups = upsilon_prime(fam)
    failures = []
    orders = []
    for i, at in enumerate(POINTS):
        for k, p in enumerate(POINTS):
            lhs = ThetaFraction(product[i][k])
            rhs = ups * stab.restriction(p, at)
            result = tf_equal(lhs, rhs, order)
            orders.append(result.order)
            if not result.equal:
                failures.append(f"({at}, {p}): " + " ".join(residual_terms(result.residual, RESIDUAL_LIMIT)))
    detail = {"preset": fam.f.name, "upsilon": fam.upsilon.render(limit=6)}
    reached = _low(orders)
    return make_report(suite, "duality", failures, started, order=reached, detail=detail, skip=shortfall(reached, order))


# -- q-difference equations ----------------------------------------------------


def check_qdiff_z(fam: EllCanonicalFamily, gmatrix: GMatrix = None, suite="qdiff-z"):
    """delta_z E(mu)|_p = -q^(-G_mu/2) z^(-G_mu) O(-1)|_p E(mu)|_p"""
    started = time.perf_counter()
    gmatrix = gmatrix or GMatrix()
    failures = []
    orders = []
    for mu in POINTS:
        for p in POINTS:
            factor = gmatrix.factor(fam.model, mu, p)
            _record(failures, orders, f"{_mu_name(mu)}|_{p}", _shift_match(fam.restriction(mu, p), "z", 1, factor))
    detail = {"G": {mu: gmatrix[mu] for mu in POINTS}}
    return make_report(suite, "qdiff-z", failures, started, order=_low(orders), detail=detail)


# row factors diag(v^2 z, v^-2 z^-1) and column factors diag(-q^-3/2 a^-3, -q^-1/2 a^-1)
A_ROW = {P2: Monomial.of(z=1, v=2), P11: Monomial.of(z=-1, v=-2)}
A_COLUMN = {P2: Monomial.of(-1, q=Fraction(-3, 2), a=-3), P11: Monomial.of(-1, q=-HALF, a=-1)}

E2_LAMBDAS = (HALF, Fraction(1, 6), Fraction(-1, 6))
G_LAMBDAS = (Fraction(0), Fraction(1, 4), HALF, Fraction(3, 4))


def _aux_shift_reports(fam: EllCanonicalFamily, suite):
    started = time.perf_counter()
    failures = []
    orders = []
    for p in POINTS:
        eps = fam.model.eps(p)
        third = Fraction(eps, 3)
        for lam in E2_LAMBDAS:
            factor = Monomial.of(q=Fraction(-1, 6), z=eps, v=2 * third, a=Fraction(-1, 3))
            outcome = _shift_match(
                fam.piece("e2-lambda", p, lam), "a", 1, factor, fam.piece("e2-lambda", p, lam - third)
            )
            _record(failures, orders, f"E2-lambda({lam})|_{p}", outcome)
        factor = Monomial.of(-1, q=-HALF, v=2 * eps, a=-1, z=eps)
        _record(failures, orders, f"E11-piece|_{p}", _shift_match(fam.piece("e11", p), "a", 1, factor))
        for lam in G_LAMBDAS:
            factor = Monomial.of(q=Fraction(-4, 3), v=4 * third, a=Fraction(-8, 3))
            outcome = _shift_match(fam.piece("g", p, lam), "a", 1, factor, fam.piece("g", p, lam - third))
            _record(failures, orders, f"g({lam})|_{p}", outcome)
    return make_report(suite, "a-shift-pieces", failures, started, order=_low(orders))


def _recursion_report(fam: EllCanonicalFamily, suite):
    """delta_a F(k) = q^-4/3 v^(4eps/3) a^-8/3 F(k+1), F(k+3) = F(k) and the cube relation"""
    started = time.perf_counter()
    failures = []
    orders = []
    wide = fam.budgets.with_value("a", 3)
    for p in POINTS:
        eps = fam.model.eps(p)
        step = Monomial.of(q=Fraction(-4, 3), v=Fraction(4 * eps, 3), a=Fraction(-8, 3))
        F = {k: fam.F(k, p) for k in range(4)}
        for k in range(3):
            _record(failures, orders, f"F({k})|_{p}", _shift_match(F[k], "a", 1, step, F[k + 1]))
        ok, residual = _bare(F[3]).equal_up_to(_bare(F[0]))
        _record(failures, orders, f"F(3) = F(0) at {p}", (ok, residual, F[0].order))
        cube = Monomial.of(q=-12, v=4 * eps, a=-8)
        _record(failures, orders, f"F(0) cubed shift at {p}", _shift_match(fam.F(0, p, budgets=wide), "a", 3, cube))
    for i in range(3):
        f = fam.f.series(i, fam.order, fam.budgets)
        if not f.is_free_of("a", "z"):
            failures.append(f"f{i} depends on a or z")
    return make_report(suite, "F-recursion", failures, started, order=_low(orders))


def check_qdiff_a(fam: EllCanonicalFamily, suite="qdiff-a"):
    """delta_a E = diag(v^2 z, v^-2 z^-1) E diag(-q^-3/2 a^-3, -q^-1/2 a^-1) plus the piece recursions"""
    started = time.perf_counter()
    failures = []
    orders = []
    for mu in POINTS:
        for p in POINTS:
            factor = A_ROW[p] * A_COLUMN[mu]
            _record(failures, orders, f"{_mu_name(mu)}|_{p}", _shift_match(fam.restriction(mu, p), "a", 1, factor))
    reports = [make_report(suite, "matrix-equation", failures, started, order=_low(orders))]
    reports.append(_aux_shift_reports(fam, suite))
    reports.append(_recursion_report(fam, suite))
    return reports


def v_shift_factor(model, p, q_power):
    return Monomial.of(q=q_power, z=-2) * model.O(p, -2)


def eigen_condition(fam: EllCanonicalFamily):
    """delta_v(f_i) f0 == q^-1 v^-2 f_i delta_v(f0) for i = 1, 2; returns (holds, notes)"""
    f0 = fam.f.series(0, fam.order, fam.budgets)
    d0 = f0.shift("v", 1)
    notes = []
    for i in (1, 2):
        if fam.f.specs[i].is_zero:
            notes.append(f"f{i} = 0 is a degenerate eigenvector")
            continue
        fi = fam.f.series(i, fam.order, fam.budgets)
        ok, residual, _ = _match(_bare(fi.shift("v", 1)) * _bare(f0), _bare(fi) * _bare(d0), Monomial.of(q=-1, v=-2))
        if not ok:
            notes.append(f"f{i} fails the v-shift eigen-condition: " + " ".join(residual_terms(residual, RESIDUAL_LIMIT)))
            return False, notes
    return True, notes


def check_qdiff_v(fam: EllCanonicalFamily, suite="qdiff-v"):
    """The v-shift displays of E11 and E2 and, under the eigen-condition, the common eigenvalue x_p"""
    started = time.perf_counter()
    budgets = fam.budgets
    failures = []
    orders = []
    shifted = {i: fam.f.series(i, fam.order, budgets).shift("v", 1) for i in range(3)}
    for p in POINTS:
        rhs = _bare(shifted[0]) * _bare(fam.piece("e11", p))
        outcome = _match(fam.restriction(P11, p).shift("v", 1), rhs, v_shift_factor(fam.model, p, -2))
        _record(failures, orders, f"E11|_{p}", outcome)
        rhs = Series.zero()
        for i in (0, 1):
            if not fam.f.specs[i + 1].is_zero:
                rhs = rhs + _bare(shifted[i + 1]) * _bare(fam.piece("e2", p, i))
        factor = v_shift_factor(fam.model, p, -1) * Monomial.of(v=2)
        _record(failures, orders, f"E2|_{p}", _match(fam.restriction(P2, p).shift("v", 1), rhs, factor))
    reports = [make_report(suite, "v-shift", failures, started, order=_low(orders))]

    started = time.perf_counter()
    holds, notes = eigen_condition(fam)
    detail = {"notes": notes}
    if not holds:
        logger.warning("eigenvalue check skipped for preset %s: %s", fam.f.name, notes[-1])
        reports.append(make_report(suite, "eigenvalue", [], started, detail=detail, skip=notes[-1]))
        return reports
    f0 = fam.f.series(0, fam.order, budgets)
    if not (f0.is_exact and len(f0) == 1):
        reason = "f0 is not a single monomial, x_p is not a monomial"
        reports.append(make_report(suite, "eigenvalue", [], started, detail=detail, skip=reason))
        return reports
    ratio = Monomial.of(q=f0.monomials()[0].exponent("v"))
    failures = []
    orders = []
    values = {}
    for p in POINTS:
        x_p = v_shift_factor(fam.model, p, -2) * ratio
        values[p] = str(x_p)
        for mu in POINTS:
            _record(failures, orders, f"{_mu_name(mu)}|_{p}", _shift_match(fam.restriction(mu, p), "v", 1, x_p))
    detail["x_p"] = values
    reports.append(make_report(suite, "eigenvalue", failures, started, order=_low(orders), detail=detail))
    return reports


# -- bar invariance ----------------------------------------------------------------


def check_bar_invariance(fam: EllCanonicalFamily, stab_flop=None, suite="bar"):
    """a-inversion swaps the fixed points, bar(E) = -E(1/a, 1/z), and -Upsilon Stab_-X = E t(bar E^!)"""
    started = time.perf_counter()
    if not fam.f.is_v_symmetric():
        reason = f"coefficients of preset {fam.f.name} are not symmetric under v -> 1/v"
        logger.warning("bar checks skipped: %s", reason)
        return [make_report(suite, "bar", [], started, skip=reason)]
    reports = []

    failures = []
    for mu in POINTS:
        for p, other in ((P2, P11), (P11, P2)):
            ok, residual = _bare(fam.restriction(mu, p)).invert("a").equal_up_to(_bare(fam.restriction(mu, other)))
            if not ok:
                failures.append(f"{_mu_name(mu)}|_{p}(1/a): " + " ".join(residual_terms(residual, RESIDUAL_LIMIT)))
    reports.append(make_report(suite, "point-swap", failures, started, order=fam.order))

    started = time.perf_counter()
    failures = []
    for mu in POINTS:
        for p in POINTS:
            x = _bare(fam.restriction(mu, p))
            ok, residual = x.bar_v().equal_up_to(-x.invert("a").invert("z"))
            if not ok:
                failures.append(f"{_mu_name(mu)}|_{p}: " + " ".join(residual_terms(residual, RESIDUAL_LIMIT)))
    reports.append(make_report(suite, "bar-relation", failures, started, order=fam.order))

    started = time.perf_counter()
    stab_flop = stab_flop or stab_ell_flop(fam.model, fam.order, Budgets())
    product = _pairing(fam, conjugate=Series.bar_v)
    ups = upsilon_prime(fam).scale(-1)
    failures = []
    orders = []
    for i, at in enumerate(POINTS):
        for k, p in enumerate(POINTS):
            result = tf_equal(ThetaFraction(product[i][k]), ups * stab_flop.restriction(p, at), fam.order)
            orders.append(result.order)
            if not result.equal:
                failures.append(f"({at}, {p}): " + " ".join(residual_terms(result.residual, RESIDUAL_LIMIT)))
    reached = _low(orders)
    reports.append(make_report(suite, "flop-duality", failures, started, order=reached, skip=shortfall(reached, fam.order)))
    return reports


# -- equivalent expansions -------------------------------------------------------------


def _series_product(*builders, order):
    return product_to_order(list(builders), order)


def check_family_structure(fam: EllCanonicalFamily, suite="family"):
    """Product form, the h-form, the (L, M) class form and the F form reproduce E, which is single-valued"""
    started = time.perf_counter()
    order = fam.order
    zero = Budgets()
    f = fam.f
    h = f.h_builders(zero)
    failures = []
    orders = []

    def compare(label, expected, mu, p):
        actual = _bare(fam.restriction(mu, p))
        ok, residual = actual.equal_up_to(expected)
        orders.append(min(actual.order, expected.order))
        if not ok:
            failures.append(f"{label} {_mu_name(mu)}|_{p}: " + " ".join(residual_terms(residual, RESIDUAL_LIMIT)))

    for p in POINTS:
        eps = fam.model.eps(p)
        odd = _bare(fam.piece("class", p, 1)) if f.inject_odd else Series.zero()

        arg = Monomial.of(z=1, v=2, a=-eps)
        expected = _series_product(f.builder(0, zero), partial(theta_tilde, arg, budgets=zero), order=order)
        compare("product form", expected, P11, p)

        outer = partial(theta_tilde, Monomial.of(z=1, a=eps), budgets=zero)
        inner = Monomial.of(v=1, z=1, a=-eps)
        expected = odd
        for i, kind in ((1, 0), (2, 1)):
            if not f.specs[i].is_zero:
                expected = expected + _series_product(
                    f.builder(i, zero), outer, partial(theta01, kind, inner, budgets=zero), order=order
                )
        compare("product form", expected, P2, p)

        expected = odd
        if 0 in h:
            expected = expected + _series_product(h[0], partial(fam._piece_at, "h", p, 1, budgets=zero), order=order)
        expected = expected - _series_product(h[2], partial(fam._piece_at, "h", p, 0, budgets=zero), order=order)
        compare("h-form", expected, P2, p)

        expected = Series.zero()
        for lam, builder in sorted(h.items()):
            expected = expected + _series_product(builder, partial(fam._piece_at, "class", p, lam, budgets=zero), order=order)
        compare("class form", expected, P2, p)

        expected = Series.zero()
        for k in range(3):
            lam = HALF - Fraction(k * eps, 3)
            F = partial(fam.F, k, p, budgets=zero)
            term = _series_product(F, partial(fam._piece_at, "e2-lambda", p, lam, budgets=zero), order=order)
            expected = expected + (term if k % 2 == 0 else -term)
        compare("F form", expected, P2, p)

    reports = [make_report(suite, "expansions", failures, started, order=_low(orders))]

    started = time.perf_counter()
    failures = []
    for mu in POINTS:
        for p in POINTS:
            twist = Monomial.of(z=-HALF) * fam.model.O(p, -HALF)
            for term in (_bare(fam.restriction(mu, p)) * twist).monomials():
                if any(e % term.denominator for e in term.key[1:]):
                    failures.append(f"{_mu_name(mu)}|_{p}: {term}")
                    break
    reports.append(make_report(suite, "single-valued", failures, started))
    return reports


# -- leading terms after delta_z^-s ------------------------------------------------------


def _sign(k):
    return -1 if k % 2 else 1


def _slice(model, terms, lead: Series):
    """{p: lead * sum coeff v^e_v z^e_z O(e_O)|_p}"""
    result = {}
    for p in POINTS:
        total = Series.zero()
        for coeff, e_v, e_z, e_O in terms:
            total = total + (Monomial.of(coeff, v=e_v, z=e_z) * model.O(p, e_O)).to_series()
        result[p] = total * lead
    return result


def e11_leading(s: Slope, c0):
    """(q-order, sign, terms) of delta_z^-s E11 with terms (coeff, e_v, e_z, e_O)"""
    s, fl = s.value, s.m
    if s.denominator == 1:
        order = c0 - HALF * (s + HALF) * (s - HALF)
        return order, _sign(s), [(1, 0, s + HALF, s + HALF), (-1, 0, s - HALF, s - HALF)]
    order = c0 + HALF * (fl + HALF) * (-2 * s + fl + HALF)
    return order, _sign(fl), [(1, 0, fl + HALF, fl + HALF)]


def e2_f1_leading(s: Slope, c1):
    s, fl = s.value, s.m
    if s.denominator == 1:
        order = c1 - Fraction(3, 2) * s * s + Fraction(1, 8)
        return order, _sign(s), [(1, 1, 3 * s + HALF, s - HALF), (-1, -1, 3 * s - HALF, s + HALF)]
    if s - fl < HALF:
        order = c1 + Fraction(3, 2) * fl * fl - 3 * s * fl + Fraction(fl, 2) - s / 2 + Fraction(1, 8)
        return order, _sign(fl), [(1, 1, 3 * fl + HALF, fl - HALF)]
    if s - fl == HALF:
        order = c1 - Fraction(3, 2) * s * s + Fraction(1, 4)
        return order, _sign(fl), [(1, -1, 3 * s + 1, s + 1), (1, 1, 3 * s - 1, s - 1)]
    order = c1 + Fraction(3, 2) * fl * fl - 3 * s * fl + Fraction(5, 2) * fl - Fraction(5, 2) * s + Fraction(9, 8)
    return order, _sign(fl), [(1, -1, 3 * fl + Fraction(5, 2), fl + Fraction(3, 2))]


def e2_f2_leading(s: Slope, c2):
    s, fl = s.value, s.m
    if s.denominator == 1:
        order = c2 - Fraction(3, 2) * s * s + Fraction(3, 8)
        terms = [
            (1, 0, 3 * s + Fraction(3, 2), s + HALF),
            (-1, -2, 3 * s + HALF, s + Fraction(3, 2)),
            (1, 2, 3 * s - HALF, s - Fraction(3, 2)),
            (-1, 0, 3 * s - Fraction(3, 2), s - HALF),
        ]
        return order, _sign(s), terms
    order = c2 + Fraction(3, 2) * fl * fl - 3 * s * fl + Fraction(3, 2) * fl - Fraction(3, 2) * s + Fraction(3, 8)
    return order, _sign(fl), [(1, 0, 3 * fl + Fraction(3, 2), fl + HALF)]


def predicted_leading(fam: EllCanonicalFamily, s):
    """{mu: (order, {p: slice})} from the case tables, and the E2 term orders (f1, f2)"""
    s = Slope.of(s)
    model = fam.model
    c0, f00 = fam.f.leading(0)
    order, sign, terms = e11_leading(s, c0)
    table = {P11: (order, _slice(model, terms, f00.scale(sign)))}

    pieces = []
    for i, rule in ((1, e2_f1_leading), (2, e2_f2_leading)):
        c, lead = fam.f.leading(i)
        if c == INF:
            continue
        order, sign, terms = rule(s, c)
        pieces.append((order, _slice(model, terms, lead.scale(sign))))
    low = min(order for order, _ in pieces)
    combined = {p: Series.zero() for p in POINTS}
    for order, slices in pieces:
        if order == low:
            combined = {p: combined[p] + slices[p] for p in POINTS}
    table[P2] = (low, combined)
    term_orders = tuple(order for order, _ in pieces)
    return table, term_orders


def extract_leading(fam: EllCanonicalFamily, mu, s):
    """(r, {p: slice}) of delta_z^-s E(mu) at the least q-order r over both points"""
    s = Slope.of(s)
    shifted = {p: _bare(fam.restriction(mu, p).shift("z", -s.value)) for p in POINTS}
    orders = []
    for p, x in shifted.items():
        r, _ = x.leading()
        if r is None:
            raise ValueError(f"{_mu_name(mu)}|_{p} has no determined terms below q^{x.order} after the z-shift")
        orders.append(r)
    r = min(orders)
    return r, {p: shifted[p].coefficient_slice(r) for p in POINTS}


def _normalized(vector):
    """(m, vector / m) with m the first monomial (coefficient included) of the first nonzero entry"""
    for x in vector:
        if len(x):
            m = x.monomials()[0]
            return m, tuple(y * m.inverse() for y in vector)
    raise ValueError("zero vector")


def _same(xs, ys):
    return all(x.equal_up_to(y)[0] for x, y in zip(xs, ys))


def canonical_columns(s):
    E = canonical_closed_form(s)
    return [tuple(Series.from_sympy(E[i, j].cancel().expr) for i in range(E.size)) for j in range(E.size)]


def match_canonical(vector, s):
    """(column index, twist) with vector = twist * column of the canonical basis at s, or None"""
    m, normal = _normalized(vector)
    for j, column in enumerate(canonical_columns(s)):
        mc, normal_c = _normalized(column)
        if _same(normal, normal_c):
            return j, m / mc
    return None


def canonical_label(s, j):
    """Label of column j; on a wall, of the same column just above it"""
    s = Slope.of(s)
    trial = s.value if s.is_generic else s.value + WALL_OFFSET
    return label_of(canonical_closed_form(trial).column(j))


def check_property_a(fam: EllCanonicalFamily, s, suite="property-a"):
    """Leading slices of delta_z^-s E against the case tables and the canonical classes"""
    s = Slope.of(s)
    started = time.perf_counter()
    table, term_orders = predicted_leading(fam, s)
    failures = []
    detail = {"kind": s.classification, "r": {}, "twist": {}, "label": {}}
    for mu in POINTS:
        name = _mu_name(mu)
        r, slices = extract_leading(fam, mu, s)
        detail["r"][mu] = str(r)
        order, expected = table[mu]
        if r != order:
            failures.append(f"{name}: leading order {r}, table gives {order}")
        for p in POINTS:
            ok, residual = slices[p].equal_up_to(expected[p])
            if not ok:
                failures.append(f"{name}|_{p}: " + " ".join(residual_terms(residual, RESIDUAL_LIMIT)))
        vector = tuple(slices[p] for p in POINTS)
        found = match_canonical(vector, s)
        if found is None:
            failures.append(f"{name}: leading slice is not a twist of a canonical basis vector at s={s}")
            continue
        j, twist = found
        detail["twist"][mu] = str(twist)
        if twist.v:
            failures.append(f"{name}: twist {twist} involves v")
        label = canonical_label(s, j)
        detail["label"][mu] = str(label)
        partition = xi_classes(max(3, abs(label.m), abs(label.n)))
        if partition.point_of(label) != mu:
            failures.append(f"{name}: leading class {label} belongs to {partition.point_of(label)}")
    if len(term_orders) == 2 and term_orders[1] <= term_orders[0]:
        failures.append(
            f"dominance: f2 term at q^{term_orders[1]} does not lie above the f1 term at q^{term_orders[0]}"
        )
    return make_report(suite, f"s={s}", failures, started, detail=detail)


K_LIMIT_SLOPE = Fraction(1, 4)


def check_k_limit_normalization(fam: EllCanonicalFamily, s=K_LIMIT_SLOPE, suite="property-a"):
    """For 0 < s < 1/2 the leading slices are v z^(1/2) O(-1/2) for E2 and z^(1/2) O(1/2) for E11"""
    s = Slope.of(s)
    if not 0 < s.value < HALF:
        raise ValueError(f"normalization is read on 0 < s < 1/2, got {s}")
    started = time.perf_counter()
    model = fam.model
    expected = {
        P2: {p: (Monomial.of(v=1, z=HALF) * model.O(p, -HALF)).to_series() for p in POINTS},
        P11: {p: (Monomial.of(z=HALF) * model.O(p, HALF)).to_series() for p in POINTS},
    }
    failures = []
    detail = {}
    for mu in POINTS:
        r, slices = extract_leading(fam, mu, s)
        detail[_mu_name(mu)] = str(r)
        for p in POINTS:
            ok, residual = slices[p].equal_up_to(expected[mu][p])
            if not ok:
                failures.append(f"{_mu_name(mu)}|_{p}: " + " ".join(residual_terms(residual, RESIDUAL_LIMIT)))
    return make_report(suite, f"k-limit-normalization s={s}", failures, started, detail=detail)


# -- suites --------------------------------------------------------------------------------

ELLIPTIC_CHECKS = ("duality", "qdiff-z", "qdiff-a", "qdiff-v", "bar", "family", "property-a")

DEFAULT_SLOPES = (Fraction(0), Fraction(1, 4), HALF, Fraction(3, 4), Fraction(1))


def _as_list(result):
    return result if isinstance(result, list) else [result]


def run_elliptic_check(fam: EllCanonicalFamily, name, slopes=()):
    """Reports of one elliptic suite on an already built family"""
    if name == "duality":
        return [check_duality(fam)]
    if name == "qdiff-z":
        return [check_qdiff_z(fam)]
    if name == "qdiff-a":
        return check_qdiff_a(fam)
    if name == "qdiff-v":
        return check_qdiff_v(fam)
    if name == "bar":
        return check_bar_invariance(fam)
    if name == "family":
        return check_family_structure(fam)
    if name == "property-a":
        reports = [check_property_a(fam, s) for s in (slopes or DEFAULT_SLOPES)]
        reports.append(check_k_limit_normalization(fam))
        return reports
    raise ValueError(f"'{name}' is not an elliptic check")


def elliptic_suite(f, order, slopes=(), names=ELLIPTIC_CHECKS):
    """Build the family for coefficient triple f once and run the named checks on it"""
    slopes = tuple(slopes) or DEFAULT_SLOPES
    fam = build_family(f, order, default_budgets(slopes))
    reports = []
    for name in names:
        reports += _as_list(run_elliptic_check(fam, name, slopes))
    return reports
