"""Check reports and their JSON / text rendering."""
import json
import logging
import os
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

from series.lattice import lattice_denominator

logger = logging.getLogger(__name__)

PASS = "pass"
FAIL = "fail"
SKIP = "skip"
STATUSES = (PASS, FAIL, SKIP)

MAX_RESIDUAL_TERMS = 10


def order_label(order, denominator=None):
    """Render a q-order as "k/D" on the lattice"""
    if order is None:
        return None
    if order == float("inf"):
        return "inf"
    order = Fraction(order)
    denominator = lattice_denominator() if denominator is None else denominator
    return f"{int(order * denominator)}/{denominator}"


def _plain(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, float) and value == float("inf"):
        return "inf"
    return value


@dataclass
class CheckReport:
    suite: str
    check: str
    status: str = PASS
    order: Optional[str] = None
    residual_sample: List[str] = field(default_factory=list)
    elapsed_ms: float = 0.0
    detail: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        self.residual_sample = [str(x) for x in self.residual_sample][:MAX_RESIDUAL_TERMS]

    @property
    def passed(self):
        return self.status == PASS

    @property
    def failed(self):
        return self.status == FAIL

    def to_dict(self):
        data = asdict(self)
        data["detail"] = _plain(self.detail)
        data["elapsed_ms"] = round(self.elapsed_ms, 3)
        return data


def make_report(suite, check, failures, started, order=None, detail=None, skip=None):
    """Build a report from a list of failure strings; `skip` gives a reason to skip when nothing failed"""
    status = FAIL if failures else (SKIP if skip else PASS)
    sample = list(failures) if failures or not skip else [skip]
    return CheckReport(
        suite=suite,
        check=check,
        status=status,
        order=order_label(order) if not isinstance(order, str) else order,
        residual_sample=sample,
        elapsed_ms=(time.perf_counter() - started) * 1000,
        detail=detail or {},
    )


def shortfall(achieved, requested):
    """Skip reason when a comparison stopped below the requested q-order"""
    if requested is None or achieved is None or achieved >= requested:
        return None
    return f"compared only below q^{achieved}, q^{requested} was requested"


def residual_terms(series, limit=MAX_RESIDUAL_TERMS):
    return series.render_terms(limit)


class ReportManager:
    def __init__(self, reports=None):
        self.reports = list(reports or [])

    def add(self, report):
        self.reports.append(report)

    def extend(self, reports):
        self.reports.extend(reports)

    def sorted(self):
        return sorted(self.reports, key=lambda r: (r.suite, r.check))

    @property
    def all_passed(self):
        return all(not r.failed for r in self.reports)

    def counts(self):
        counts = {status: 0 for status in STATUSES}
        for report in self.reports:
            counts[report.status] += 1
        return counts

    def to_dict(self, config=None):
        data = {
            "summary": self.counts(),
            "passed": self.all_passed,
            "reports": [r.to_dict() for r in self.sorted()],
        }
        if config is not None:
            data["config"] = _plain(config)
        return data

    def to_json(self, config=None):
        return json.dumps(self.to_dict(config), indent=2, sort_keys=True)

    def save_json(self, path, config=None):
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(self.to_json(config))
            handle.write("\n")
        logger.info("wrote %d reports to %s", len(self.reports), path)
        return path

    def render_table(self):
        rows = [("suite", "check", "status", "order", "ms")]
        for r in self.sorted():
            rows.append((r.suite, r.check, r.status, r.order or "-", f"{r.elapsed_ms:.1f}"))
        widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)) for row in rows]
        for r in self.sorted():
            if r.failed:
                lines.append(f"{r.suite}/{r.check}:")
                lines.extend(f"    {term}" for term in r.residual_sample)
        return "\n".join(lines)
