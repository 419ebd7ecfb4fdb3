"""Downward-closed feasibility constraints and their evaluation oracles.

A ``ConstraintSpec`` holds parameters only; pairing it with an election (via
``bind``) produces an oracle working over internal candidate indices. All
variants induce downward-closed families containing the empty set: Budget,
Cardinality and PartitionMatroid by construction, ExclusionPairs trivially,
ExplicitFamily by exhaustive validation at construction, Conjunction because
intersections of downward-closed families are downward closed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .election import Election
from .errors import ContractError, InputError


class ConstraintSpec:
    """Base class; subclasses are immutable parameter holders."""

    def bind(self, election: Election) -> "BoundConstraint":
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Budget(ConstraintSpec):
    """Participatory-budgeting constraint: total cost of W at most ``budget``."""

    budget: int

    def __post_init__(self):
        if self.budget < 0:
            raise InputError("budget must be nonnegative")

    def bind(self, election):
        return _BudgetOracle(self, election)

    def describe(self):
        return f"Budget({self.budget})"


@dataclass(frozen=True)
class Cardinality(ConstraintSpec):
    """Committee-size constraint |W| <= k. Matroid kind: requires unit costs."""

    k: int

    def __post_init__(self):
        if self.k < 0:
            raise InputError("k must be nonnegative")

    def bind(self, election):
        _require_unit_costs(election, "Cardinality")
        return _CardinalityOracle(self, election)

    def describe(self):
        return f"Cardinality({self.k})"


@dataclass(frozen=True)
class PartitionMatroid(ConstraintSpec):
    """At most ``caps[g]`` candidates from each group; groups partition C.

    Matroid kind: requires unit costs.
    """

    groups: tuple[frozenset[str], ...]
    caps: tuple[int, ...]

    def __init__(self, groups: Sequence[Iterable[str]], caps: Sequence[int]):
        object.__setattr__(self, "groups", tuple(frozenset(g) for g in groups))
        object.__setattr__(self, "caps", tuple(int(k) for k in caps))
        if len(self.groups) != len(self.caps):
            raise InputError("groups and caps must have equal length")
        if any(k < 0 for k in self.caps):
            raise InputError("caps must be nonnegative")
        seen: set[str] = set()
        for g in self.groups:
            if seen & g:
                raise InputError("groups must be disjoint")
            seen |= g

    def bind(self, election):
        _require_unit_costs(election, "PartitionMatroid")
        covered = set().union(*self.groups) if self.groups else set()
        if covered != set(election.candidates):
            raise InputError("groups must partition the candidate set")
        return _PartitionOracle(self, election)

    def describe(self):
        return f"PartitionMatroid({len(self.groups)} groups)"


@dataclass(frozen=True)
class ExclusionPairs(ConstraintSpec):
    """Forbid selecting both members of any listed pair."""

    pairs: frozenset[frozenset[str]]

    def __init__(self, pairs: Iterable[Iterable[str]]):
        norm = set()
        for p in pairs:
            p = frozenset(p)
            if len(p) != 2:
                raise InputError("exclusion pairs must contain two distinct candidates")
            norm.add(p)
        object.__setattr__(self, "pairs", frozenset(norm))

    def bind(self, election):
        for p in self.pairs:
            for c in p:
                if c not in election.cand_index:
                    raise InputError(f"exclusion pair references unknown candidate {c!r}")
        return _ExclusionOracle(self, election)

    def describe(self):
        return f"ExclusionPairs({len(self.pairs)} pairs)"


@dataclass(frozen=True)
class ExplicitFamily(ConstraintSpec):
    """The feasible family given in extension, as a downward-closed set system.

    Construction validates closure exhaustively and requires the empty set;
    use ``downward_closure`` to complete a family given by its maximal sets.
    """

    family: frozenset[frozenset[str]]

    def __init__(self, family: Iterable[Iterable[str]]):
        fam = frozenset(frozenset(s) for s in family)
        if frozenset() not in fam:
            raise InputError("explicit family must contain the empty set")
        for s in fam:
            for c in s:
                if s - {c} not in fam:
                    raise InputError(
                        f"family is not downward closed: {sorted(s)} is feasible "
                        f"but {sorted(s - {c})} is not"
                    )
        object.__setattr__(self, "family", fam)

    def bind(self, election):
        for s in self.family:
            for c in s:
                if c not in election.cand_index:
                    raise InputError(f"family references unknown candidate {c!r}")
        return _ExplicitOracle(self, election)

    def describe(self):
        return f"ExplicitFamily({len(self.family)} sets)"


@dataclass(frozen=True)
class Conjunction(ConstraintSpec):
    """Logical AND of several constraints."""

    parts: tuple[ConstraintSpec, ...]

    def __init__(self, parts: Iterable[ConstraintSpec]):
        object.__setattr__(self, "parts", tuple(parts))
        if not self.parts:
            raise InputError("conjunction needs at least one part")

    def bind(self, election):
        return _ConjunctionOracle(self, election)

    def describe(self):
        return "Conjunction(" + ", ".join(p.describe() for p in self.parts) + ")"


@dataclass(frozen=True)
class Unconstrained(ConstraintSpec):
    """Every subset feasible; used by the ranking mode."""

    def bind(self, election):
        return _UnconstrainedOracle(self, election)

    def describe(self):
        return "Unconstrained()"


def downward_closure(sets: Iterable[Iterable[str]]) -> set[frozenset[str]]:
    """Complete a family to its downward closure (helper for ExplicitFamily)."""
    out = {frozenset()}
    for s in sets:
        s = tuple(sorted(set(s)))
        for r in range(1, len(s) + 1):
            out.update(frozenset(comb) for comb in itertools.combinations(s, r))
    return out


def _require_unit_costs(election, kind):
    bad = [c for c in election.candidates if election.cost[c] != 1]
    if bad:
        raise ContractError(
            f"{kind} constraints assume unit costs; offending candidates: {bad[:5]}"
        )


class BoundConstraint:
    """Feasibility oracle over internal candidate indices of one election."""

    def __init__(self, spec, election):
        self.spec = spec
        self.election = election

    def feasible(self, idx_set: frozenset[int]) -> bool:
        raise NotImplementedError

    def feasible_with(self, idx_set: frozenset[int], extra: int) -> bool:
        return self.feasible(idx_set | {extra})

    def available(self, selected: frozenset[int], pool: Iterable[int]) -> list[int]:
        return [j for j in pool if j not in selected and self.feasible_with(selected, j)]


class _BudgetOracle(BoundConstraint):
    def __init__(self, spec, election):
        super().__init__(spec, election)
        self._cost = [election.cost[c] for c in election.candidates]

    def _total(self, idx_set):
        return sum(self._cost[j] for j in idx_set)

    def feasible(self, idx_set):
        return self._total(idx_set) <= self.spec.budget

    def feasible_with(self, idx_set, extra):
        if extra in idx_set:
            return self.feasible(idx_set)
        return self._total(idx_set) + self._cost[extra] <= self.spec.budget


class _CardinalityOracle(BoundConstraint):
    def feasible(self, idx_set):
        return len(idx_set) <= self.spec.k

    def feasible_with(self, idx_set, extra):
        return len(idx_set | {extra}) <= self.spec.k


class _PartitionOracle(BoundConstraint):
    def __init__(self, spec, election):
        super().__init__(spec, election)
        self._group_of = {}
        for g, members in enumerate(spec.groups):
            for c in members:
                self._group_of[election.cand_index[c]] = g

    def feasible(self, idx_set):
        counts: dict[int, int] = {}
        for j in idx_set:
            g = self._group_of[j]
            counts[g] = counts.get(g, 0) + 1
            if counts[g] > self.spec.caps[g]:
                return False
        return True


class _ExclusionOracle(BoundConstraint):
    def __init__(self, spec, election):
        super().__init__(spec, election)
        self._pairs = [
            tuple(sorted(election.cand_index[c] for c in p)) for p in spec.pairs
        ]

    def feasible(self, idx_set):
        return not any(a in idx_set and b in idx_set for a, b in self._pairs)

    def feasible_with(self, idx_set, extra):
        if extra in idx_set:
            return self.feasible(idx_set)
        for a, b in self._pairs:
            if (a == extra and b in idx_set) or (b == extra and a in idx_set):
                return False
        return self.feasible(idx_set)


class _ExplicitOracle(BoundConstraint):
    def __init__(self, spec, election):
        super().__init__(spec, election)
        self._family = {
            frozenset(election.cand_index[c] for c in s) for s in spec.family
        }

    def feasible(self, idx_set):
        return frozenset(idx_set) in self._family


class _ConjunctionOracle(BoundConstraint):
    def __init__(self, spec, election):
        super().__init__(spec, election)
        self._parts = [p.bind(election) for p in spec.parts]

    def feasible(self, idx_set):
        return all(p.feasible(idx_set) for p in self._parts)

    def feasible_with(self, idx_set, extra):
        return all(p.feasible_with(idx_set, extra) for p in self._parts)


class _UnconstrainedOracle(BoundConstraint):
    def feasible(self, idx_set):
        return True

    def feasible_with(self, idx_set, extra):
        return True


def _to_indices(election, subset):
    out = set()
    for c in subset:
        if c not in election.cand_index:
            raise InputError(f"unknown candidate id {c!r}")
        out.add(election.cand_index[c])
    return frozenset(out)


def is_feasible(spec: ConstraintSpec, election: Election, subset: Iterable[str]) -> bool:
    """True iff ``subset`` belongs to the family induced by ``spec``."""
    return spec.bind(election).feasible(_to_indices(election, subset))


def available_candidates(
    spec: ConstraintSpec,
    election: Election,
    selected: Iterable[str],
    pool: Iterable[str],
) -> set[str]:
    """Candidates from ``pool`` (outside ``selected``) that keep W feasible."""
    oracle = spec.bind(election)
    sel = _to_indices(election, selected)
    if not oracle.feasible(sel):
        raise ContractError("selected set is itself infeasible")
    pool_idx = sorted(_to_indices(election, pool))
    return {election.candidates[j] for j in oracle.available(sel, pool_idx)}
