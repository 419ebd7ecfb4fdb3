"""Cohesiveness oracles, brute-force axiom verifiers, and bound functions.

The general cohesiveness level of a voter group S at entitlement beta is

    alpha(S, beta) = min over feasible adversarial T with |T| < beta(n-|S|)/|S|
                     of max over X with |X| <= beta, X u T feasible
                     of sum_{c in X} min_{i in S} u_i(c)

computed by exhaustive enumeration over candidate subsets (with a scale
refusal beyond ``max_m``), or in closed form for one-per-group partition
constraints where blocked groups carry no value (the public-decisions shape
of the hard counterexample instances). When the size bound admits no
adversary at all the empty T alone is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _kernels as K
from .constraints import Budget, ConstraintSpec, PartitionMatroid
from .election import Election
from .errors import ContractError, ScaleRefusal
from .outcome import Ranking

EPS = 1e-9

DEFAULT_MAX_N = 10
DEFAULT_MAX_M = 12


@dataclass(frozen=True)
class CohesionWitness:
    """Certificate that S is (alpha, beta)-cohesive: one X per adversary T."""

    group: tuple[str, ...]
    beta: int | None
    alpha: float
    witness_sets: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...]


@dataclass(frozen=True)
class DegreeViolation:
    group: tuple[str, ...]
    beta: int | None
    alpha: float
    satisfaction: float
    required: float


@dataclass(frozen=True)
class EjrPlusViolation:
    candidate: str
    group: tuple[str, ...]
    share: float


@dataclass(frozen=True)
class PrefixViolation:
    prefix_length: int
    budget: int
    inner: object


@dataclass(frozen=True)
class AxiomReport:
    axiom: str
    violations: tuple
    checked_groups: int

    @property
    def ok(self) -> bool:
        return not self.violations


# -- subset tables -----------------------------------------------------------


class _Tables:
    """Feasibility and popcount over all candidate subsets of one election."""

    def __init__(self, election: Election, spec: ConstraintSpec, max_m: int):
        m = election.m
        if m > max_m:
            raise ScaleRefusal(
                f"brute-force enumeration needs m <= {max_m}, got {m}"
            )
        oracle = spec.bind(election)
        nsub = 1 << m
        feas = np.zeros(nsub, dtype=np.uint8)
        for mask in range(nsub):
            idx = frozenset(j for j in range(m) if mask >> j & 1)
            feas[mask] = oracle.feasible(idx)
        pop = np.zeros(nsub, dtype=np.uint8)
        for mask in range(1, nsub):
            pop[mask] = pop[mask >> 1] + (mask & 1)
        self.nsub = nsub
        self.feas = feas
        self.pop = pop


def _alpha_vector(election: Election, group: Sequence[str]) -> np.ndarray:
    """alpha(c) = min_{i in S} u_i(c) per candidate (0 without unanimity)."""
    vals = np.zeros(election.m)
    for j, c in enumerate(election.candidates):
        vals[j] = min(election.utility(v, c) for v in group)
    return vals


def _subset_sums(vals: np.ndarray) -> np.ndarray:
    m = len(vals)
    out = np.zeros(1 << m)
    for mask in range(1, 1 << m):
        low = mask & -mask
        out[mask] = out[mask ^ low] + vals[low.bit_length() - 1]
    return out


def _subset_mins(vals: np.ndarray) -> np.ndarray:
    m = len(vals)
    out = np.full(1 << m, math.inf)
    for mask in range(1, 1 << m):
        low = mask & -mask
        out[mask] = min(out[mask ^ low], vals[low.bit_length() - 1])
    return out


def _size_bound(beta: int, n: int, s: int) -> tuple[int, int]:
    """Exact rational form of the adversary bound |T| < beta*(n-s)/s."""
    return beta * (n - s), s


# -- fast path for one-per-group partitions ----------------------------------


def _pairs_fast_values(election, spec, alpha_c) -> list[float] | None:
    """Per-group best values when the closed form applies, else None.

    Applies to PartitionMatroid with all caps 1, every group of size >= 2 and
    at most one positive-alpha member per group: an adversary then blocks a
    group by occupying a zero-value member, so min-max reduces to blocking the
    top-value groups.
    """
    if not isinstance(spec, PartitionMatroid):
        return None
    if any(cap != 1 for cap in spec.caps):
        return None
    values = []
    for members in spec.groups:
        if len(members) < 2:
            return None
        vals = sorted(
            (alpha_c[election.cand_index[c]] for c in members), reverse=True
        )
        if vals[1] > 0:
            return None
        values.append(vals[0])
    return values


def _fast_alpha(values: list[float], beta: int, num: int, den: int, strong: bool) -> float:
    if num <= 0:
        blocked = 0
    else:
        blocked = min((num - 1) // den, len(values))
    rest = sorted(values, reverse=True)[blocked:]
    if strong:
        if len(rest) < beta:
            return 0.0
        return beta * min(rest[:beta])
    return float(sum(rest[:beta]))


# -- cohesiveness oracles ----------------------------------------------------


def _general_alpha(
    election, spec, group, beta, strong, max_m, _cache
) -> float:
    key = (tuple(group), strong)
    if key not in _cache:
        alpha_c = _alpha_vector(election, group)
        fast = _pairs_fast_values(election, spec, alpha_c)
        if fast is not None:
            _cache[key] = ("fast", fast)
        else:
            tables = _cache.get("tables")
            if tables is None:
                tables = _Tables(election, spec, max_m)
                _cache["tables"] = tables
            score_sum = _subset_sums(alpha_c)
            score_min = _subset_mins(alpha_c)
            _cache[key] = ("enum", tables, score_sum, score_min)
    entry = _cache[key]
    num, den = _size_bound(beta, election.n, len(group))
    if entry[0] == "fast":
        return _fast_alpha(entry[1], beta, num, den, strong)
    _, tables, score_sum, score_min = entry
    if strong:
        score = beta * np.where(np.isfinite(score_min), score_min, 0.0)
    else:
        score = score_sum
    return float(
        K.cohesive_value(
            tables.feas, tables.pop, score, tables.nsub, beta, num, den,
            1 if strong else 0,
        )
    )


def max_cohesive_alpha(
    election: Election,
    spec: ConstraintSpec,
    group: Iterable[str],
    beta: int,
    max_m: int = DEFAULT_MAX_M,
) -> float:
    """Largest alpha such that ``group`` is (alpha, beta)-cohesive."""
    group = sorted(set(group))
    if not group:
        raise ContractError("group must be non-empty")
    if beta < 1:
        raise ContractError("beta must be at least 1")
    return _general_alpha(election, spec, group, beta, False, max_m, {})


def max_strong_cohesive_alpha(
    election: Election,
    spec: ConstraintSpec,
    group: Iterable[str],
    beta: int,
    max_m: int = DEFAULT_MAX_M,
) -> float:
    """Strong variant: X has exactly beta members, scored by beta * min u."""
    group = sorted(set(group))
    if not group:
        raise ContractError("group must be non-empty")
    if beta < 1:
        raise ContractError("beta must be at least 1")
    return _general_alpha(election, spec, group, beta, True, max_m, {})


def max_cohesive_alpha_pb(
    election: Election,
    budget: int,
    group: Iterable[str],
    max_m: int = 20,
) -> float:
    """PB cohesiveness: best unanimity value affordable from the group's
    proportional budget share, max over X with n * cost(X) <= b * |S|."""
    group = sorted(set(group))
    if not group:
        raise ContractError("group must be non-empty")
    m = election.m
    if m > max_m:
        raise ScaleRefusal(f"knapsack enumeration needs m <= {max_m}, got {m}")
    alpha_c = _alpha_vector(election, group)
    sums = _subset_sums(alpha_c)
    costs = np.array([election.cost[c] for c in election.candidates], dtype=np.int64)
    cost_sums = np.zeros(1 << m, dtype=np.int64)
    for mask in range(1, 1 << m):
        low = mask & -mask
        cost_sums[mask] = cost_sums[mask ^ low] + costs[low.bit_length() - 1]
    ok = cost_sums * election.n <= budget * len(group)
    return float(sums[ok].max())


def cohesion_witness(
    election: Election,
    spec: ConstraintSpec,
    group: Iterable[str],
    beta: int,
    max_m: int = DEFAULT_MAX_M,
) -> CohesionWitness:
    """Explicit (alpha, beta) certificate: the best X for every adversary T."""
    group = sorted(set(group))
    alpha = max_cohesive_alpha(election, spec, group, beta, max_m)
    tables = _Tables(election, spec, max_m)
    alpha_c = _alpha_vector(election, group)
    sums = _subset_sums(alpha_c)
    num, den = _size_bound(beta, election.n, len(group))
    names = election.candidates
    witnesses = []
    ts = [
        t for t in range(tables.nsub)
        if tables.feas[t] and int(tables.pop[t]) * den < num
    ] or [0]
    for t in ts:
        best_x, best_val = 0, -1.0
        for x in range(tables.nsub):
            if int(tables.pop[x]) <= beta and tables.feas[x | t] and sums[x] > best_val:
                best_x, best_val = x, sums[x]
        witnesses.append((
            tuple(names[j] for j in range(election.m) if t >> j & 1),
            tuple(names[j] for j in range(election.m) if best_x >> j & 1),
        ))
    return CohesionWitness(tuple(group), beta, alpha, tuple(witnesses))


# -- group enumeration helpers ------------------------------------------------


def _nonempty_groups(election: Election, max_n: int):
    n = election.n
    if n > max_n:
        raise ScaleRefusal(f"group enumeration needs n <= {max_n}, got {n}")
    voters = election.voters
    for mask in range(1, 1 << n):
        yield [voters[i] for i in range(n) if mask >> i & 1]


def _pb_cohesion_requested(spec, cohesion):
    if cohesion == "general":
        return None
    if cohesion == "pb" or (cohesion == "auto" and isinstance(spec, Budget)):
        if not isinstance(spec, Budget):
            raise ContractError("PB cohesiveness needs a Budget constraint")
        return spec.budget
    return None


# -- axiom checkers -----------------------------------------------------------


def check_ejr(
    election: Election,
    spec: ConstraintSpec,
    selected: Iterable[str],
    mode: str = "ordinary",
    max_n: int = DEFAULT_MAX_N,
    max_m: int = DEFAULT_MAX_M,
) -> AxiomReport:
    """Extended justified representation, brute force over all groups.

    ``mode`` "ordinary" uses cohesiveness, "weak" strong cohesiveness; a
    group violates when its cohesion level exceeds every member's utility
    from the selection.
    """
    if mode not in ("ordinary", "weak"):
        raise ContractError(f"unknown EJR mode {mode!r}")
    strong = mode == "weak"
    selected = list(selected)
    cache: dict = {}
    violations = []
    checked = 0
    for group in _nonempty_groups(election, max_n):
        checked += 1
        best_u = max(election.utility_of_set(v, selected) for v in group)
        for beta in range(1, election.m + 1):
            alpha = _general_alpha(election, spec, group, beta, strong, max_m, cache)
            if alpha > best_u + EPS:
                violations.append(
                    DegreeViolation(tuple(group), beta, alpha, best_u, alpha)
                )
                break
    name = "WeakEJR" if strong else "EJR"
    return AxiomReport(name, tuple(violations), checked)


def check_prop_degree(
    election: Election,
    spec: ConstraintSpec,
    selected: Iterable[str],
    bound: Callable[[float, float, float], float],
    cohesion: str = "auto",
    max_n: int = DEFAULT_MAX_N,
    max_m: int = DEFAULT_MAX_M,
) -> AxiomReport:
    """Proportionality degree: every cohesive group's average utility must
    reach bound(alpha, gamma, u_max) up to numerical epsilon.

    ``cohesion`` "pb" (Budget specs) checks the single knapsack alpha per
    group; "general" checks every (alpha, beta) certificate.
    """
    selected = list(selected)
    budget = _pb_cohesion_requested(spec, cohesion)
    cache: dict = {}
    violations = []
    checked = 0
    u_max = election.u_max
    n = election.n
    for group in _nonempty_groups(election, max_n):
        checked += 1
        avg = sum(election.utility_of_set(v, selected) for v in group) / len(group)
        gamma = n / len(group)
        if budget is not None:
            alphas = [(max_cohesive_alpha_pb(election, budget, group), None)]
        else:
            alphas = [
                (_general_alpha(election, spec, group, beta, False, max_m, cache), beta)
                for beta in range(1, election.m + 1)
            ]
        for alpha, beta in alphas:
            required = bound(alpha, gamma, u_max)
            if avg < required - EPS:
                violations.append(
                    DegreeViolation(tuple(group), beta, alpha, avg, required)
                )
                break
    return AxiomReport("PropDegree", tuple(violations), checked)


def check_pjr_degree(
    election: Election,
    spec: ConstraintSpec,
    selected: Iterable[str],
    kappa: float,
    cohesion: str = "auto",
    max_n: int = DEFAULT_MAX_N,
    max_m: int = DEFAULT_MAX_M,
) -> AxiomReport:
    """PJR degree with the rule-dependent bound (alpha - u_max)/(kappa + 1).

    The group's satisfaction is sum over selected candidates of the group's
    best utility for the candidate.
    """
    selected = list(selected)
    budget = _pb_cohesion_requested(spec, cohesion)
    cache: dict = {}
    violations = []
    checked = 0
    u_max = election.u_max
    for group in _nonempty_groups(election, max_n):
        checked += 1
        coverage = sum(
            max(election.utility(v, c) for v in group) for c in selected
        ) if selected else 0.0
        if budget is not None:
            alphas = [(max_cohesive_alpha_pb(election, budget, group), None)]
        else:
            alphas = [
                (_general_alpha(election, spec, group, beta, False, max_m, cache), beta)
                for beta in range(1, election.m + 1)
            ]
        for alpha, beta in alphas:
            required = (alpha - u_max) / (kappa + 1.0)
            if coverage < required - EPS:
                violations.append(
                    DegreeViolation(tuple(group), beta, alpha, coverage, required)
                )
                break
    return AxiomReport("PJRDegree", tuple(violations), checked)


def check_ejr_plus_up_to_one(
    election: Election,
    budget: int,
    selected: Iterable[str],
) -> AxiomReport:
    """EJR+ up to one, cost-utility variant (polynomial).

    A candidate c outside W witnesses a violation with a supporter group S
    when n * cost(c) <= |S| * b and every i in S has
    u_i(W) + u_i(c) < |S| * b / n. Checked by sorting supporters by
    u_i(W) + u_i(c) and scanning group sizes; one witness per candidate.
    """
    selected = list(selected)
    w_set = set(selected)
    n = election.n
    violations = []
    checked = 0
    for c in election.candidates:
        if c in w_set:
            continue
        sup = election.supporters[c]
        if not sup:
            continue
        checked += 1
        scored = sorted(
            (election.utility_of_set(v, selected) + election.utility(v, c), v)
            for v in sup
        )
        for s in range(1, len(scored) + 1):
            if n * election.cost[c] <= s * budget and scored[s - 1][0] < s * budget / n:
                violations.append(
                    EjrPlusViolation(
                        c,
                        tuple(v for _, v in scored[:s]),
                        s * budget / n,
                    )
                )
                break
    return AxiomReport("EJRPlusUpToOne", tuple(violations), checked)


def check_ranking_ejr(
    election: Election,
    ranking: Ranking,
    checker: Callable[[Election, int, Sequence[str]], AxiomReport],
) -> AxiomReport:
    """Run a PB checker on every ranking prefix with the prefix's own cost
    as budget; aggregates all prefix violations."""
    violations = []
    checked = 0
    for plen in range(len(ranking.order) + 1):
        prefix = list(ranking.prefix(plen))
        b = sum(election.cost[c] for c in prefix)
        inner = checker(election, b, prefix)
        checked += inner.checked_groups
        for v in inner.violations:
            violations.append(PrefixViolation(plen, b, v))
    return AxiomReport("RankingEJR", tuple(violations), checked)


# -- bound functions -----------------------------------------------------------


def prop_degree_bound(alpha: float, gamma: float, u_max: float, kind: str) -> float:
    """Closed-form degree bounds.

    pb_half and matroid_weak: (alpha - u_max)/2. general_gamma (gamma > 1):
    alpha * (gamma - 1) * (gamma * log(gamma/(gamma - 1)) - 1) - u_max.
    """
    if kind in ("pb_half", "matroid_weak"):
        return (alpha - u_max) / 2.0
    if kind == "general_gamma":
        if gamma <= 1.0:
            raise ContractError("general_gamma bound needs gamma > 1")
        coeff = (gamma - 1.0) * (gamma * math.log(gamma / (gamma - 1.0)) - 1.0)
        return alpha * coeff - u_max
    raise ContractError(f"unknown bound kind {kind!r}")


# -- the hard instance family ---------------------------------------------------


def build_counterexample(z: int):
    """Public-decisions family where EJR fails the half proportionality degree.

    2z candidate pairs {a_i, b_i} with at most one per pair selectable, z
    voters valuing a_i at (z-i)^2 unanimously (i <= z) plus a personal
    candidate a_{z+i} worth w_i, where w_s is the exact cohesion level of
    size-s groups. Returns (election, spec, selection, avg_ratio) with
    avg_ratio the group's average utility relative to its cohesion level.
    """
    if z < 2:
        raise ContractError("z must be at least 2")
    # prefix[i] = sum of (z-j)^2 for j in 1..i
    prefix = [0.0] * (z + 1)
    for j in range(1, z + 1):
        prefix[j] = prefix[j - 1] + float((z - j) ** 2)

    def window(lo: int, hi: int) -> float:
        # sum over i in lo..hi of (z-i)^2, clipped to 1..z
        lo = max(lo, 1)
        hi = min(hi, z)
        if lo > hi:
            return 0.0
        return prefix[hi] - prefix[lo - 1]

    w = [0.0] * (z + 1)
    for s in range(1, z + 1):
        best = 0.0
        for beta in range(1, z + 1):
            num = beta * (z - s)
            blocked = 0 if num <= 0 else (num - 1) // s
            best = max(best, window(blocked + 1, blocked + beta))
        w[s] = best

    width = len(str(2 * z))
    a = [f"a{i:0{width}d}" for i in range(1, 2 * z + 1)]
    b = [f"b{i:0{width}d}" for i in range(1, 2 * z + 1)]
    voters = [f"v{i:0{len(str(z))}d}" for i in range(1, z + 1)]
    cost = {c: 1 for c in a + b}
    utilities: dict[str, dict[str, float]] = {}
    for vi, v in enumerate(voters, start=1):
        row = {}
        for i in range(1, z + 1):
            val = float((z - i) ** 2)
            if val > 0:
                row[a[i - 1]] = val
        if w[vi] > 0:
            row[a[z + vi - 1]] = w[vi]
        utilities[v] = row
    election = Election(voters, a + b, cost, utilities)
    spec = PartitionMatroid(
        groups=[[a[i], b[i]] for i in range(2 * z)],
        caps=[1] * (2 * z),
    )
    selection = tuple(b[:z]) + tuple(a[z:])
    alpha_full = prefix[z]
    avg_ratio = (sum(w[1:]) / z) / alpha_full
    return election, spec, selection, avg_ratio
