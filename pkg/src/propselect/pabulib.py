"""PabuLib .pb file parsing and outcome serialization.

The format is three sections, each introduced by a bare keyword line and
followed by a semicolon-separated header row plus data rows:

    META        key;value rows (budget, num_projects, num_votes required)
    PROJECTS    project_id;cost;... rows
    VOTES       voter_id;vote;... rows, vote = comma-separated project ids,
                optional points column with matching comma-separated integers
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .constraints import Budget
from .election import Election, derive_cost_utilities
from .errors import InputError, ParseError
from .outcome import Outcome

REQUIRED_META = ("budget", "num_projects", "num_votes")


@dataclass
class PabulibInstance:
    meta: dict[str, str]
    projects: dict[str, dict]          # id -> {"cost": int, "name": str | None}
    votes: dict[str, list[str]]        # voter id -> approved project ids
    points: dict[str, dict[str, int]] = field(default_factory=dict)

    @property
    def budget(self) -> int:
        return int(float(self.meta["budget"]))


def _parse_number(text: str, what: str, line_no: int) -> int:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"non-numeric {what}: {text!r}", line=line_no) from None
    if value != int(value):
        raise ParseError(f"non-integer {what}: {text!r}", line=line_no)
    return int(value)


def parse_pabulib(data: bytes | str) -> PabulibInstance:
    """Parse one .pb file; raises ParseError with a line number on bad input."""
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"not UTF-8: {exc}") from None
    else:
        text = data
    lines = text.replace("\r\n", "\n").split("\n")

    section = None
    header: list[str] = []
    meta: dict[str, str] = {}
    projects: dict[str, dict] = {}
    votes: dict[str, list[str]] = {}
    points: dict[str, dict[str, int]] = {}
    seen_sections = set()

    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip("﻿").rstrip()
        if not line:
            continue
        if line.upper() in ("META", "PROJECTS", "VOTES"):
            section = line.upper()
            seen_sections.add(section)
            header = []
            continue
        if section is None:
            raise ParseError(f"content before any section: {line!r}", line=line_no)
        cells = line.split(";")
        if not header:
            header = [c.strip().lower() for c in cells]
            if section == "PROJECTS" and "project_id" not in header:
                raise ParseError("PROJECTS header needs project_id", line=line_no)
            if section == "PROJECTS" and "cost" not in header:
                raise ParseError("PROJECTS header needs cost", line=line_no)
            if section == "VOTES" and "voter_id" not in header:
                raise ParseError("VOTES header needs voter_id", line=line_no)
            if section == "VOTES" and "vote" not in header:
                raise ParseError("VOTES header needs vote", line=line_no)
            continue
        row = dict(zip(header, (c.strip() for c in cells)))
        if section == "META":
            key = row.get("key", "")
            meta[key] = row.get("value", "")
        elif section == "PROJECTS":
            pid = row["project_id"]
            if pid in projects:
                raise ParseError(f"duplicate project id {pid!r}", line=line_no)
            cost = _parse_number(row["cost"], "cost", line_no)
            if cost <= 0:
                raise ParseError(f"nonpositive cost for project {pid!r}", line=line_no)
            projects[pid] = {"cost": cost, "name": row.get("name")}
        elif section == "VOTES":
            vid = row["voter_id"]
            if vid in votes:
                raise ParseError(f"duplicate voter id {vid!r}", line=line_no)
            ballot = [p for p in row.get("vote", "").split(",") if p]
            for p in ballot:
                if p not in projects:
                    raise ParseError(
                        f"vote references unknown project {p!r}", line=line_no
                    )
            votes[vid] = ballot
            if row.get("points"):
                values = [x for x in row["points"].split(",") if x]
                if len(values) != len(ballot):
                    raise ParseError(
                        "points column does not match the vote length", line=line_no
                    )
                points[vid] = {
                    p: _parse_number(x, "points", line_no)
                    for p, x in zip(ballot, values)
                }

    for name in ("META", "PROJECTS", "VOTES"):
        if name not in seen_sections:
            raise ParseError(f"missing section {name}")
    for key in REQUIRED_META:
        if key not in meta:
            raise ParseError(f"META lacks required key {key!r}")
    budget = _parse_number(meta["budget"], "budget", 0)
    if budget <= 0:
        raise ParseError("budget must be positive")
    declared = _parse_number(meta["num_votes"], "num_votes", 0)
    if declared != len(votes):
        raise ParseError(
            f"num_votes declares {declared} but file has {len(votes)} votes"
        )
    declared_p = _parse_number(meta["num_projects"], "num_projects", 0)
    if declared_p != len(projects):
        raise ParseError(
            f"num_projects declares {declared_p} but file has {len(projects)} projects"
        )
    return PabulibInstance(meta, projects, votes, points)


def to_election(
    instance: PabulibInstance, utility_mode: str = "cost_utility"
) -> tuple[Election, Budget]:
    """Build the election and Budget constraint from a parsed instance.

    Modes: "cost_utility" (approving a project is worth its cost), "unit"
    (worth 1), "points" (cardinal scores; zero entries dropped).
    """
    cost = {pid: info["cost"] for pid, info in instance.projects.items()}
    if utility_mode == "cost_utility":
        utilities = derive_cost_utilities(instance.votes, cost)
    elif utility_mode == "unit":
        utilities = {
            v: {c: 1.0 for c in ballot} for v, ballot in instance.votes.items()
        }
    elif utility_mode == "points":
        if not instance.points:
            raise InputError("points mode requires a points column")
        utilities = {
            v: {c: float(x) for c, x in row.items() if x > 0}
            for v, row in instance.points.items()
        }
    else:
        raise InputError(f"unknown utility mode {utility_mode!r}")
    election = Election(
        voters=instance.votes.keys(),
        candidates=cost.keys(),
        cost=cost,
        utilities=utilities,
    )
    return election, Budget(instance.budget)


def write_outcome(outcome: Outcome, election: Election, fmt: str = "json") -> bytes:
    """Stable serialization of a run result.

    JSON keeps full float precision and round-trips payments exactly; CSV is
    one row per selected candidate.
    """
    if fmt == "json":
        doc = {
            "selected": list(outcome.selected),
            "total_cost": sum(election.cost[c] for c in outcome.selected),
            "ledger": [
                {
                    "candidate": rec.candidate,
                    "cost": election.cost[rec.candidate],
                    "time": rec.time,
                    "rho": rec.rho,
                    "alpha": rec.alpha,
                    "payments": rec.payments,
                }
                for rec in outcome.ledger
            ],
            "removed": [{"candidate": c, "time": t} for c, t in outcome.removed],
            "unspent": outcome.unspent,
        }
        return (json.dumps(doc, indent=2, sort_keys=False) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["candidate", "cost", "time", "rho", "alpha", "total_paid"])
        for rec in outcome.ledger:
            writer.writerow([
                rec.candidate,
                election.cost[rec.candidate],
                repr(rec.time),
                repr(rec.rho),
                repr(rec.alpha),
                repr(rec.total_paid),
            ])
        return buf.getvalue().encode()
    raise InputError(f"unknown outcome format {fmt!r}")
