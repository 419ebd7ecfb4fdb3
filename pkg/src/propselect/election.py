"""Election data model: voters, candidates, integer costs, sparse utilities.

Candidate and voter ids are strings externally and dense integer indices
internally; the internal index order is the lexicographic id order, which is
also the deterministic tie-break order used by every rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import ContractError, InputError


@dataclass(frozen=True)
class Violation:
    kind: str
    subject: str
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass
class _Core:
    """Dense array view of an election, shared by the compiled kernels.

    Supporters of each candidate are stored CSR-style, sorted by utility
    ascending (the order the scaling-factor loop consumes them in).
    """

    n: int
    m: int
    cost: np.ndarray        # float64[m]
    indptr: np.ndarray      # int64[m+1]
    sup: np.ndarray         # int32[nnz], voter index
    uts: np.ndarray         # float64[nnz]
    total_u: np.ndarray     # float64[m]
    u_max: float


class Election:
    """An election (N, C, cost, {u_i}) with sparse nonnegative utilities.

    ``utilities`` maps voter id -> {candidate id -> utility}; absent entries
    mean utility zero. Exact zeros are dropped on construction, negative
    entries are kept so that ``validate_election`` can report them.
    """

    def __init__(
        self,
        voters: Iterable[str],
        candidates: Iterable[str],
        cost: Mapping[str, int],
        utilities: Mapping[str, Mapping[str, float]],
    ):
        self.voters = tuple(sorted(voters))
        self.candidates = tuple(sorted(candidates))
        if len(set(self.voters)) != len(self.voters):
            raise InputError("duplicate voter ids")
        if len(set(self.candidates)) != len(self.candidates):
            raise InputError("duplicate candidate ids")
        cand_set = set(self.candidates)
        voter_set = set(self.voters)
        for c in cost:
            if c not in cand_set:
                raise InputError(f"cost given for unknown candidate {c!r}")
        missing = cand_set - set(cost)
        if missing:
            raise InputError(f"no cost for candidates {sorted(missing)}")
        self.cost = {c: cost[c] for c in self.candidates}

        self.utilities: dict[str, dict[str, float]] = {}
        for v, row in utilities.items():
            if v not in voter_set:
                raise InputError(f"utilities given for unknown voter {v!r}")
            kept = {}
            for c, u in row.items():
                if c not in cand_set:
                    raise InputError(f"voter {v!r} values unknown candidate {c!r}")
                if u != 0:
                    kept[c] = float(u)
            if kept:
                self.utilities[v] = kept

        self.voter_index = {v: i for i, v in enumerate(self.voters)}
        self.cand_index = {c: j for j, c in enumerate(self.candidates)}
        self.n = len(self.voters)
        self.m = len(self.candidates)

        self.supporters: dict[str, list[str]] = {c: [] for c in self.candidates}
        self.approvals: dict[str, list[str]] = {v: [] for v in self.voters}
        u_max = 0.0
        for v in self.voters:
            for c, u in self.utilities.get(v, {}).items():
                if u > 0:
                    self.supporters[c].append(v)
                    self.approvals[v].append(c)
                    u_max = max(u_max, u)
        for c in self.candidates:
            self.supporters[c].sort()
        for v in self.voters:
            self.approvals[v].sort()
        self.u_max = u_max
        self._core: _Core | None = None

    def utility(self, voter: str, cand: str) -> float:
        return self.utilities.get(voter, {}).get(cand, 0.0)

    def utility_of_set(self, voter: str, cands: Iterable[str]) -> float:
        row = self.utilities.get(voter, {})
        return sum(row.get(c, 0.0) for c in cands)

    def total_utility(self, cand: str) -> float:
        return sum(self.utility(v, cand) for v in self.supporters[cand])

    def is_approval(self) -> bool:
        """True iff all stored utilities are exactly 1 (0/1 ballots)."""
        return all(u == 1.0 for row in self.utilities.values() for u in row.values())

    def core(self) -> _Core:
        if self._core is None:
            sup_rows = []
            indptr = np.zeros(self.m + 1, dtype=np.int64)
            for j, c in enumerate(self.candidates):
                entries = sorted(
                    ((self.utility(v, c), self.voter_index[v]) for v in self.supporters[c]),
                )
                sup_rows.append(entries)
                indptr[j + 1] = indptr[j] + len(entries)
            nnz = int(indptr[-1])
            sup = np.zeros(nnz, dtype=np.int32)
            uts = np.zeros(nnz, dtype=np.float64)
            k = 0
            for entries in sup_rows:
                for u, vi in entries:
                    sup[k] = vi
                    uts[k] = u
                    k += 1
            total_u = np.zeros(self.m, dtype=np.float64)
            for j in range(self.m):
                total_u[j] = uts[indptr[j]:indptr[j + 1]].sum()
            cost = np.array([float(self.cost[c]) for c in self.candidates])
            self._core = _Core(self.n, self.m, cost, indptr, sup, uts, total_u, self.u_max)
        return self._core

    def __repr__(self):
        return f"Election(n={self.n}, m={self.m})"


def validate_election(election: Election) -> ValidationReport:
    """Report-style validation of the model assumptions.

    Checks: every candidate has a supporter, costs are positive integers,
    stored utilities are strictly positive.
    """
    out = []
    for c in election.candidates:
        cost = election.cost[c]
        if not isinstance(cost, (int, np.integer)) or isinstance(cost, bool):
            out.append(Violation("nonpositive cost", c, f"cost {cost!r} is not an integer"))
        elif cost <= 0:
            out.append(Violation("nonpositive cost", c, f"cost {cost}"))
        if not election.supporters[c]:
            out.append(Violation("unsupported candidate", c, "no voter assigns positive utility"))
    for v, row in election.utilities.items():
        for c, u in row.items():
            if u < 0:
                out.append(Violation("negative utility", v, f"u({c}) = {u}"))
    return ValidationReport(tuple(out))


def ensure_valid(election: Election) -> None:
    """Raise ContractError unless the election passes validation."""
    report = validate_election(election)
    if not report.ok:
        first = report.violations[0]
        raise ContractError(
            f"invalid election ({len(report.violations)} violations; "
            f"first: {first.kind} for {first.subject}: {first.detail})"
        )


def derive_cost_utilities(
    approvals: Mapping[str, Iterable[str]], cost: Mapping[str, int]
) -> dict[str, dict[str, float]]:
    """Cost-utility profile: u_i(c) = cost(c) for approved c, absent otherwise."""
    profile: dict[str, dict[str, float]] = {}
    for v, ballot in approvals.items():
        row = {}
        for c in ballot:
            if c not in cost:
                raise InputError(f"approval of unknown candidate {c!r} by voter {v!r}")
            row[c] = float(cost[c])
        profile[v] = row
    return profile
