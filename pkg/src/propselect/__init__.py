"""Proportional candidate selection with additive utilities under
downward-closed feasibility constraints.

Rules: PropRank (selection and ranking modes), PropRankRem and
PropRankBacktrack, the Method of Equal Shares and its Bounded Overspending
variant for general constraints, plus Greedy-PB, MES-PB (ADD1) and sequential
Phragmén baselines. Axiom verifiers cover EJR, weak EJR, proportionality and
PJR degrees, EJR+ up-to-one, and proportional-ranking prefixes.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .baselines import run_greedy_pb, run_mes_pb_add1, run_phragmen_approval
from .bos import bos_subroutine, run_bos_general
from .config import DEFAULT_CONFIG, RuleConfig
from .constraints import (
    Budget,
    Cardinality,
    Conjunction,
    ConstraintSpec,
    ExclusionPairs,
    ExplicitFamily,
    PartitionMatroid,
    Unconstrained,
    available_candidates,
    downward_closure,
    is_feasible,
)
from .election import (
    Election,
    ValidationReport,
    derive_cost_utilities,
    validate_election,
)
from .errors import (
    ContractError,
    InputError,
    InternalError,
    ParseError,
    PropselectError,
    ScaleRefusal,
)
from .heuristics import run_proprank_backtrack, run_proprank_rem
from .mes import equal_shares_subroutine, mes_cap, rho_best, run_mes_general
from .metrics import benchmark, cost_satisfaction, exclusion_ratio
from .outcome import Outcome, PurchaseRecord, Ranking
from .pabulib import PabulibInstance, parse_pabulib, to_election, write_outcome
from .proprank import (
    compute_local_scalings,
    minimal_rho,
    next_event,
    run_proprank,
    run_proprank_ranking,
    spending_cap,
    start_run,
)
from .registry import RULE_NAMES, run_rule

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
