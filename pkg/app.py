"""
Elliptic canonical basis verifier - command-line application
"""
import logging
import os
import sys

import click

from config.presets import PRESETS
from config.settings import (
    DB_PATH,
    DEFAULT_POINTS,
    DEFAULT_QMAG,
    DEFAULT_SEED,
    DEFAULT_TOL,
    DENOMINATOR,
    LOG_FORMAT,
    LOG_LEVEL,
    ORDER,
    REPORT_DIR,
    THREADS,
    RunConfig,
    parse_rational,
)
from config.suites import GROUPS, SUITES, resolve_suites
from geometry.limits import Slope, k_stab, k_stab_closed_form
from geometry.model import POINTS, hilb2_model
from klcanon.bar import bar_data, canonical_solve, default_degree_bound, transition_matrices
from klcanon.closed_forms import canonical_closed_form
from klcanon.walls import xi_classes
from series.lattice import lattice
from utils.database import DatabaseManager
from utils.errors import ConfigError, VerificationError
from utils.excel_manager import ExcelManager
from utils.runner import SuiteRunner

logger = logging.getLogger(__name__)


def render_matrix(matrix, title):
    """Entries by (restriction point, basis element)"""
    lines = [title]
    for i, at in enumerate(POINTS):
        for j, p in enumerate(POINTS):
            lines.append(f"  [{at}, {p}] = {matrix[i, j].render()}")
    return "\n".join(lines)


class VerifierApp:
    def __init__(self, config: RunConfig = None, db_path=DB_PATH):
        """Initialize the application"""
        self.config = config or RunConfig()
        self.db_path = db_path
        self._db = None

    @property
    def db(self):
        if self._db is None:
            self._db = DatabaseManager(self.db_path)
        return self._db

    def close(self):
        if self._db is not None:
            self._db.close()
            self._db = None

    @staticmethod
    def report_path(path):
        """Bare file names go to the report directory"""
        return path if os.path.dirname(path) else os.path.join(REPORT_DIR, path)

    def verify(self, names, record=False):
        """Run suites; returns (ReportManager, run id or None)"""
        manager = SuiteRunner(self.config).run(names)
        if self.config.json_path:
            manager.save_json(self.report_path(self.config.json_path), self.config.to_dict())
        run_id = None
        if record:
            config = dict(self.config.to_dict(), suites=resolve_suites(names))
            run_id = self.db.save_run(config, manager.sorted())
        return manager, run_id

    def limits(self, s):
        s = Slope.of(s)
        with lattice(self.config.denominator):
            computed = k_stab(hilb2_model(), s)
        lines = [f"s = {s.value} ({s.classification}), m = {s.m}", render_matrix(computed, "K-theoretic stable basis:")]
        mismatches = computed.mismatches(k_stab_closed_form(s))
        lines.append("matches the closed form" if not mismatches else f"differs from the closed form at {mismatches}")
        return "\n".join(lines), not mismatches

    def canonical(self, s):
        s = Slope.of(s)
        if s.is_generic:
            bd = bar_data(s)
            E = canonical_solve(bd, default_degree_bound(s))
            T, _ = transition_matrices(E, bd)
            return "\n".join([render_matrix(E, f"canonical basis at s = {s.value}:"), render_matrix(T, "transition to the stable basis:")])
        return render_matrix(canonical_closed_form(s), f"canonical basis on the wall s = {s.value}:")

    def classes(self, window):
        partition = xi_classes(window)
        lines = []
        for members, point in zip(partition.classes, partition.iota):
            sample = ", ".join(str(x) for x in sorted(members, key=lambda x: (x.eps, x.n, x.m))[:4])
            lines.append(f"{point}: {len(members)} labels ({sample}, ...)")
        return "\n".join(lines)

    def history(self, limit=10):
        return self.db.get_recent_runs(limit)

    def export(self, run_id, path):
        run = self.db.get_run(run_id)
        if run is None:
            raise ConfigError(f"no run with id {run_id}")
        return ExcelManager(path).save_results(self.db.get_run_results(run_id), run_id)


# -- command line ---------------------------------------------------------------


class Rational(click.ParamType):
    name = "rational"

    def convert(self, value, param, ctx):
        try:
            return parse_rational(value)
        except ConfigError as exc:
            self.fail(str(exc), param, ctx)


RATIONAL = Rational()


def _slope_config(denominator, slope):
    config = RunConfig(denominator=denominator, slopes=(slope,))
    try:
        return config.validate()
    except ConfigError as exc:
        raise click.UsageError(str(exc))


def _list_suites(ctx, param, value):
    if not value or ctx.resilient_parsing:
        return
    for group in GROUPS:
        click.echo(f"{group}:")
        for name, suite in SUITES.items():
            if suite["group"] == group:
                click.echo(f"  {name:<20} {suite['description']}")
    ctx.exit(0)


@click.group()
@click.option("--log-level", default=LOG_LEVEL, show_default=True, help="Logging level")
def cli(log_level):
    """Exact verification of elliptic canonical bases of the Hilbert scheme of 2 points"""
    logging.basicConfig(level=log_level.upper(), format=LOG_FORMAT, stream=sys.stderr)


@cli.command()
@click.argument("suites", nargs=-1)
@click.option("--list-suites", is_flag=True, expose_value=False, is_eager=True, callback=_list_suites, help="List suites and exit")
@click.option("--denominator", type=int, default=DENOMINATOR, show_default=True, help="Exponent lattice denominator")
@click.option("--order", type=RATIONAL, default=ORDER, show_default=True, help="q-order, e.g. 2 or 97/48")
@click.option("--preset", type=click.Choice(sorted(PRESETS)), default="theta", show_default=True)
@click.option("--slope", "slopes", type=RATIONAL, multiple=True, help="Slope p/q (repeatable)")
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.option("--points", type=int, default=DEFAULT_POINTS, show_default=True)
@click.option("--qmag", type=float, default=DEFAULT_QMAG, show_default=True)
@click.option("--tol", type=float, default=DEFAULT_TOL, show_default=True)
@click.option("--threads", type=int, default=THREADS, show_default=True)
@click.option("--json", "json_path", type=click.Path(dir_okay=False), default=None, help="Write the JSON report here (bare names go to ELLCAN_REPORT_DIR)")
@click.option("--record", is_flag=True, help="Store the run in the history database")
@click.option("--db", "db_path", default=DB_PATH, show_default=True, help="History database")
def verify(suites, denominator, order, preset, slopes, seed, points, qmag, tol, threads, json_path, record, db_path):
    """Run SUITES (names, groups or 'all'); exit 0 iff every non-skipped check passes"""
    config = RunConfig(
        denominator=denominator,
        order=order,
        preset=preset,
        slopes=tuple(slopes),
        seed=seed,
        points=points,
        qmag=qmag,
        tol=tol,
        json_path=json_path,
        threads=threads,
    )
    try:
        config.validate()
        resolve_suites(suites or ("all",))
    except ConfigError as exc:
        raise click.UsageError(str(exc))
    app = VerifierApp(config, db_path)
    try:
        manager, run_id = app.verify(suites or ("all",), record=record)
    finally:
        app.close()
    click.echo(manager.render_table())
    counts = manager.counts()
    click.echo(f"\n{counts['pass']} passed, {counts['fail']} failed, {counts['skip']} skipped")
    if run_id is not None:
        click.echo(f"recorded as run {run_id}")
    sys.exit(0 if manager.all_passed else 1)


@cli.command()
@click.option("--slope", type=RATIONAL, required=True, help="Slope p/q")
@click.option("--denominator", type=int, default=DENOMINATOR, show_default=True, help="Exponent lattice denominator")
def limits(slope, denominator):
    """Print the K-theory limit of the stable basis at a slope"""
    text, ok = VerifierApp(_slope_config(denominator, slope)).limits(slope)
    click.echo(text)
    sys.exit(0 if ok else 1)


@cli.command()
@click.option("--slope", type=RATIONAL, required=True, help="Slope p/q")
@click.option("--denominator", type=int, default=DENOMINATOR, show_default=True, help="Exponent lattice denominator")
def canonical(slope, denominator):
    """Print the K-theoretic canonical basis at a slope"""
    app = VerifierApp(_slope_config(denominator, slope))
    try:
        click.echo(app.canonical(slope))
    except VerificationError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


@cli.command()
@click.option("--window", type=click.IntRange(min=0), default=3, show_default=True)
def classes(window):
    """Print the equivalence classes of canonical labels"""
    click.echo(VerifierApp().classes(window))


@cli.command()
@click.option("--limit", type=click.IntRange(min=1), default=10, show_default=True)
@click.option("--db", "db_path", default=DB_PATH, show_default=True, help="History database")
def history(limit, db_path):
    """List recorded runs"""
    app = VerifierApp(db_path=db_path)
    try:
        runs = app.history(limit)
        if not runs:
            click.echo("no recorded runs")
        for run in runs:
            status = "ok" if run.ok else "FAILED"
            click.echo(
                f"{run.id:>4}  {run.created_at:%Y-%m-%d %H:%M:%S}  {run.preset or '-':<10} order {run.order:<6} "
                f"{run.passed} passed, {run.failed} failed, {run.skipped} skipped  {status}"
            )
    finally:
        app.close()


@cli.command()
@click.argument("run_id", type=int)
@click.option("--output", type=click.Path(dir_okay=False), default="verification_runs.xlsx", show_default=True)
@click.option("--db", "db_path", default=DB_PATH, show_default=True, help="History database")
def export(run_id, output, db_path):
    """Export a recorded run to a spreadsheet"""
    app = VerifierApp(db_path=db_path)
    try:
        path = app.export(run_id, output)
    except ConfigError as exc:
        raise click.UsageError(str(exc))
    finally:
        app.close()
    click.echo(f"exported run {run_id} to {path}")


if __name__ == "__main__":
    cli()
