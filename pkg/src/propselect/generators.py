"""Seeded random elections and constraint specs for fuzz and property suites."""

from __future__ import annotations

import random

from .constraints import (
    Budget,
    Cardinality,
    ConstraintSpec,
    ExclusionPairs,
    PartitionMatroid,
)
from .election import Election

MATROID_KINDS = ("cardinality", "partition")


def random_election(
    seed: int,
    n: int,
    m: int,
    utilities: str = "approval",
    u_max: int = 3,
    cost_max: int = 4,
    approval_p: float = 0.4,
    unit_costs: bool = False,
) -> Election:
    """Random election; every candidate is guaranteed a supporter.

    ``utilities``: "approval" (0/1 ballots, each candidate approved with
    probability ``approval_p``) or "uniform_int" (integer utilities in
    1..u_max on approved candidates).
    """
    rng = random.Random(seed)
    voters = [f"v{i:03d}" for i in range(n)]
    cands = [f"c{j:03d}" for j in range(m)]
    cost = {c: 1 if unit_costs else rng.randint(1, cost_max) for c in cands}
    utils: dict[str, dict[str, float]] = {}
    for v in voters:
        row = {}
        for c in cands:
            if rng.random() < approval_p:
                if utilities == "approval":
                    row[c] = 1.0
                elif utilities == "uniform_int":
                    row[c] = float(rng.randint(1, u_max))
                else:
                    raise ValueError(f"unknown utility model {utilities!r}")
        if row:
            utils[v] = row
    for c in cands:
        if not any(c in row for row in utils.values()):
            v = rng.choice(voters)
            value = 1.0 if utilities == "approval" else float(rng.randint(1, u_max))
            utils.setdefault(v, {})[c] = value
    return Election(voters, cands, cost, utils)


def random_spec(seed: int, election: Election, kind: str | None = None) -> ConstraintSpec:
    """Random constraint of the requested kind (or a random kind).

    Matroid kinds presume the election has unit costs; pass
    ``unit_costs=True`` to :func:`random_election` when mixing them in.
    """
    rng = random.Random(seed)
    if kind is None:
        kind = rng.choice(["budget", "cardinality", "partition", "exclusion"])
    cands = list(election.candidates)
    if kind == "budget":
        total = sum(election.cost.values())
        return Budget(rng.randint(0, total))
    if kind == "cardinality":
        return Cardinality(rng.randint(0, len(cands)))
    if kind == "partition":
        shuffled = cands[:]
        rng.shuffle(shuffled)
        cuts = sorted(rng.sample(range(1, len(shuffled)), min(len(shuffled) - 1, rng.randint(0, 2)))) if len(shuffled) > 1 else []
        groups, prev = [], 0
        for cut in cuts + [len(shuffled)]:
            groups.append(shuffled[prev:cut])
            prev = cut
        caps = [rng.randint(1, max(1, len(g))) for g in groups]
        return PartitionMatroid(groups, caps)
    if kind == "exclusion":
        pairs = []
        if len(cands) >= 2:
            for _ in range(rng.randint(0, len(cands))):
                pairs.append(rng.sample(cands, 2))
        return ExclusionPairs(pairs) if pairs else ExclusionPairs([])
    raise ValueError(f"unknown constraint kind {kind!r}")
