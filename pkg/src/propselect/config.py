"""Numeric configuration shared by the purchasing rules."""

from __future__ import annotations

from dataclasses import dataclass

DEFAULT_KAPPA = 1.0
DEFAULT_SIGMA = 2


@dataclass(frozen=True)
class RuleConfig:
    """Knobs of the continuous-time machinery.

    tolerance        relative tolerance of the event-time bisection (scaled by
                     max(1, t) when applied);
    grid_checks      number of spot probes used to assert that affordability is
                     monotone on a bracketing interval;
    scan_steps       resolution of the fine-stepping fallback when the
                     monotonicity assertion fails;
    max_doublings    cap on the bracket-growing loop (a termination guard).
    """

    tolerance: float = 1e-9
    grid_checks: int = 8
    scan_steps: int = 1024
    max_doublings: int = 300


DEFAULT_CONFIG = RuleConfig()


def tol_abs(config: RuleConfig, scale: float) -> float:
    return config.tolerance * max(1.0, scale)
