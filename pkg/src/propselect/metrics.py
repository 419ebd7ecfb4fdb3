"""Evaluation metrics and the benchmark harness."""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .axioms import check_ejr_plus_up_to_one
from .election import Election
from .errors import InputError, PropselectError
from .outcome import Outcome

BUCKETS = (("<=10", 0, 10), ("11-30", 11, 30), (">30", 31, None))

CSV_COLUMNS = [
    "instance_id",
    "rule",
    "n_voters",
    "n_projects",
    "budget",
    "cost_sat_norm",
    "exclusion_ratio",
    "ejrplus_violations",
    "runtime_s",
]


def cost_satisfaction(
    election: Election,
    selected: Iterable[str],
    normalize_against: Outcome | None = None,
) -> float:
    """Average voter utility from the selection, optionally divided by the
    reference outcome's raw value."""
    selected = list(selected)
    raw = (
        sum(election.utility_of_set(v, selected) for v in election.voters)
        / election.n
    )
    if normalize_against is None:
        return raw
    ref = (
        sum(
            election.utility_of_set(v, normalize_against.selected)
            for v in election.voters
        )
        / election.n
    )
    if ref == 0:
        raise InputError("normalization reference has zero satisfaction")
    return raw / ref


def exclusion_ratio(election: Election, selected: Iterable[str]) -> float:
    """Fraction of voters with zero utility from the selection."""
    selected = list(selected)
    excluded = sum(
        1 for v in election.voters if election.utility_of_set(v, selected) == 0
    )
    return excluded / election.n


@dataclass(frozen=True)
class MetricRow:
    instance_id: str
    rule: str
    n_voters: int
    n_projects: int
    budget: int
    cost_sat_norm: float
    exclusion_ratio: float
    ejrplus_violations: int
    runtime_s: float


@dataclass(frozen=True)
class BenchmarkReport:
    rows: tuple[MetricRow, ...]
    failures: tuple[tuple[str, str, str], ...]  # (instance, rule, error)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(CSV_COLUMNS)
        for r in self.rows:
            writer.writerow([
                r.instance_id, r.rule, r.n_voters, r.n_projects, r.budget,
                f"{r.cost_sat_norm:.6f}", f"{r.exclusion_ratio:.6f}",
                r.ejrplus_violations, f"{r.runtime_s:.4f}",
            ])
        return buf.getvalue()

    def bucket_table(self) -> str:
        """Bucket averages by project count, one line per rule and bucket."""
        rules = sorted({r.rule for r in self.rows})
        lines = [
            f"{'rule':<22} {'bucket':<7} {'#':>4} {'cost-sat':>9} "
            f"{'excl-ratio':>11} {'ejr+':>7}"
        ]
        for rule in rules:
            for label, lo, hi in BUCKETS:
                got = [
                    r for r in self.rows
                    if r.rule == rule and r.n_projects >= lo
                    and (hi is None or r.n_projects <= hi)
                ]
                if not got:
                    continue
                k = len(got)
                lines.append(
                    f"{rule:<22} {label:<7} {k:>4} "
                    f"{sum(r.cost_sat_norm for r in got) / k:>9.3f} "
                    f"{sum(r.exclusion_ratio for r in got) / k:>11.3f} "
                    f"{sum(r.ejrplus_violations for r in got) / k:>7.3f}"
                )
        return "\n".join(lines)


def benchmark(
    corpus: Sequence[tuple[str, Election, int]],
    rules: Mapping[str, Callable[[Election, int], Outcome]],
    reference_rule: str = "greedy",
) -> BenchmarkReport:
    """Run every rule on every (id, election, budget) instance.

    Cost satisfaction is normalized against the reference rule's outcome on
    the same instance; EJR+ counts distinct violating candidates. Rule
    failures are recorded and the harness continues.
    """
    if reference_rule not in rules:
        raise InputError(f"reference rule {reference_rule!r} not in rules")
    rows = []
    failures = []
    for instance_id, election, budget in sorted(corpus, key=lambda t: t[0]):
        try:
            ref_outcome = rules[reference_rule](election, budget)
        except PropselectError as exc:
            failures.append((instance_id, reference_rule, str(exc)))
            continue
        for rule_name in sorted(rules):
            started = time.perf_counter()
            try:
                outcome = rules[rule_name](election, budget)
            except PropselectError as exc:
                failures.append((instance_id, rule_name, str(exc)))
                continue
            elapsed = time.perf_counter() - started
            report = check_ejr_plus_up_to_one(election, budget, outcome.selected)
            rows.append(
                MetricRow(
                    instance_id=instance_id,
                    rule=rule_name,
                    n_voters=election.n,
                    n_projects=election.m,
                    budget=budget,
                    cost_sat_norm=cost_satisfaction(
                        election, outcome.selected, normalize_against=ref_outcome
                    ),
                    exclusion_ratio=exclusion_ratio(election, outcome.selected),
                    ejrplus_violations=len(report.violations),
                    runtime_s=elapsed,
                )
            )
    return BenchmarkReport(tuple(rows), tuple(failures))
