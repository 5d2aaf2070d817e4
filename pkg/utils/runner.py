"""Parallel execution of verification suites."""
import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable, List, NamedTuple

from config.settings import RunConfig
from config.suites import DEFAULT_SLOPES, SUITES, resolve_suites
from elliptic.checks import run_elliptic_check
from elliptic.family import FCoeffs, build_family, default_budgets
from elliptic.identities import check_cancelation, check_fab_symmetry, check_h_constraints, check_r_matching, check_theta_identity
from geometry.limits import Slope, check_k_limits, check_opposite_limits
from geometry.model import check_dual_pair_axioms, flop_pair_model, hilb2_model
from geometry.stab import stab_suite
from klcanon.bar import check_canonical, check_engine_canonical
from klcanon.walls import check_classes, check_periodicity, check_wall
from numeric.oracle import oracle_suite
from series.lattice import lattice
from utils.errors import VerificationError
from utils.reports import FAIL, CheckReport, ReportManager, make_report

logger = logging.getLogger(__name__)


class Task(NamedTuple):
    suite: str
    label: str
    run: Callable[[], List[CheckReport]]


def _as_list(result):
    return list(result) if isinstance(result, (list, tuple)) else [result]


class SuiteRunner:
    """Turns a RunConfig into tasks, runs them on a thread pool and collects the reports"""

    def __init__(self, config: RunConfig):
        self.config = config.validate()
        with lattice(self.config.denominator):
            self.model = hilb2_model()
            self.flop_model = flop_pair_model()
        self._family = None
        self._family_lock = threading.Lock()

    def slopes_for(self, suite):
        slopes = self.config.slopes or DEFAULT_SLOPES.get(suite, ())
        slopes = tuple(Slope.of(s) for s in slopes)
        if suite in ("k-canonical", "k-canonical-engine"):
            return tuple(s for s in slopes if s.is_generic)
        if suite == "wall":
            return tuple(s for s in slopes if not s.is_generic)
        return slopes

    def family(self):
        """The elliptic family of the configured preset, built once"""
        with self._family_lock:
            if self._family is None:
                f = FCoeffs.from_preset(self.config.preset)
                slopes = self.slopes_for("property-a")
                self._family = build_family(f, self.config.order, default_budgets([s.value for s in slopes]), self.model)
            return self._family

    # -- task lists ------------------------------------------------------------

    def tasks(self, names):
        tasks = []
        for name in resolve_suites(names):
            tasks.extend(self._suite_tasks(name))
        return tasks

    def _suite_tasks(self, name):
        cfg = self.config
        group = SUITES[name]["group"]
        if group == "elliptic":
            return [Task(name, name, lambda: run_elliptic_check(self.family(), name, self.slopes_for(name)))]
        if name == "dual-pair":
            return [
                Task(name, "hilb2", lambda: check_dual_pair_axioms(self.model, name)),
                Task(name, "flop", lambda: check_dual_pair_axioms(self.flop_model, name)),
            ]
        if name == "stab-ell":
            return [Task(name, "stab", lambda: stab_suite(self.model, cfg.order, name))]
        if name == "numeric":
            f = cfg.preset
            return [
                Task(
                    name,
                    "oracle",
                    lambda: oracle_suite(
                        FCoeffs.from_preset(f), points=cfg.points, qmag=cfg.qmag, tol=cfg.tol, seed=cfg.seed, order=min(cfg.order, Fraction(2))
                    ),
                )
            ]
        if name == "theta-id":
            return [Task(name, f"eps={eps}", lambda eps=eps: check_theta_identity(eps, min(cfg.order, Fraction(2)), name)) for eps in (0, 1)]
        if name == "h-constraints":
            return [Task(name, "h", lambda: check_h_constraints(suite=name, f=FCoeffs.from_preset(cfg.preset)))]
        if name == "lattice-identities":
            return [
                Task(name, "fab", lambda: check_fab_symmetry(suite=name)),
                Task(name, "cancelation", lambda: check_cancelation(suite=name)),
                Task(name, "r-matching", lambda: check_r_matching(suite=name)),
            ]
        if name == "classes":
            tasks = [Task(name, "classes", lambda: check_classes(suite=name))]
            tasks += [Task(name, f"s={s}", lambda s=s: check_periodicity(s, self.model, name)) for s in self.slopes_for(name)]
            return tasks
        return self._slope_tasks(name)

    def _slope_tasks(self, name):
        slopes = self.slopes_for(name)
        if not slopes:
            reason = f"no applicable slopes for {name}"
            return [Task(name, "skip", lambda: make_report(name, "slopes", [], time.perf_counter(), skip=reason))]
        runs = {
            "k-limit": lambda s: check_k_limits(self.model, [s], name) + check_opposite_limits(self.model, self.flop_model, [s], name),
            "k-canonical": lambda s: check_canonical(s, suite=name),
            "k-canonical-engine": lambda s: check_engine_canonical(s, self.model, name),
            "wall": lambda s: check_wall(s, suite=name),
        }
        return [Task(name, f"s={s}", lambda s=s: runs[name](s)) for s in slopes]

    # -- execution -----------------------------------------------------------------

    def _execute(self, task: Task):
        started = time.perf_counter()
        logger.info("starting %s/%s", task.suite, task.label)
        try:
            reports = _as_list(task.run())
        except VerificationError as exc:
            logger.error("%s/%s raised %s", task.suite, task.label, exc)
            reports = [make_report(task.suite, task.label, [str(exc)], started)]
        except Exception as exc:  # keep the run going; the failure lands in the report
            logger.warning("unexpected error in %s/%s", task.suite, task.label, exc_info=True)
            reports = [make_report(task.suite, task.label, [f"{type(exc).__name__}: {exc}"], started)]
        status = FAIL if any(r.failed for r in reports) else "ok"
        logger.info("finished %s/%s in %.1f ms: %s", task.suite, task.label, (time.perf_counter() - started) * 1000, status)
        return reports

    def run(self, names):
        """Run the named suites (or groups, or 'all') on the configured lattice and return a ReportManager"""
        tasks = self.tasks(names)
        manager = ReportManager()
        with lattice(self.config.denominator), ThreadPoolExecutor(max_workers=self.config.threads) as pool:
            for reports in pool.map(self._execute, tasks):
                manager.extend(reports)
        return manager
