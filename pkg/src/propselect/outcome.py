"""Run results: purchase ledgers, outcomes, rankings."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class PurchaseRecord:
    """One purchase: when, at what payment-per-utility ratio, who paid what.

    ``alpha`` is the funded fraction (1.0 except for bounded-overspending,
    where partial funding is allowed).
    """

    candidate: str
    time: float
    rho: float
    payments: dict[str, float]
    alpha: float = 1.0

    @property
    def total_paid(self) -> float:
        return sum(self.payments.values())


@dataclass(frozen=True)
class Outcome:
    selected: tuple[str, ...]
    ledger: tuple[PurchaseRecord, ...]
    removed: tuple[tuple[str, float], ...]
    unspent: dict[str, float]
    max_scaling: float = 0.0

    @property
    def selected_set(self) -> frozenset[str]:
        return frozenset(self.selected)

    def record_for(self, candidate: str) -> PurchaseRecord:
        for rec in self.ledger:
            if rec.candidate == candidate:
                return rec
        raise KeyError(candidate)


@dataclass(frozen=True)
class Ranking:
    """All candidates ordered by purchase timestamp (ties keep purchase order)."""

    order: tuple[str, ...]
    timestamps: dict[str, float]

    def prefix(self, length: int) -> tuple[str, ...]:
        return self.order[:length]
