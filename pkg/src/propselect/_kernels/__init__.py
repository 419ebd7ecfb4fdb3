"""Kernel backend selection.

The compiled Cython core is used when available; setting PROPSELECT_PURE=1
forces the pure-Python mirror. Both expose the same functions and produce
bit-identical results.
"""

import os

if os.environ.get("PROPSELECT_PURE"):
    from . import _pycore as _impl

    BACKEND = "python"
else:
    try:
        from . import _fastcore as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from . import _pycore as _impl

        BACKEND = "python"

scalings = _impl.scalings
candidate_caps = _impl.candidate_caps
sweep_rho = _impl.sweep_rho
rule_rhos = _impl.rule_rhos
min_rho = _impl.min_rho
bos_scan = _impl.bos_scan
cohesive_value = _impl.cohesive_value

__all__ = [
    "BACKEND",
    "scalings",
    "candidate_caps",
    "sweep_rho",
    "rule_rhos",
    "min_rho",
    "bos_scan",
    "cohesive_value",
]
