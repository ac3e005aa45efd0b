"""Bike-assisted evacuation of two communication-faulty robots on a line.

An exact event-driven simulator, the closed-form analysis of three
online search strategies and their competitive ratios, a lower bound,
and a verification harness that cross-checks simulation against
formulas everywhere.
"""

from .analysis import (
    CrCurvePoint,
    bike_share_time,
    cr_alg1,
    cr_alg2,
    cr_alg3_ub,
    drop_off_distance,
    ensemble_speed,
    evac_time_case1,
    evac_time_case2,
    find_crossover,
    handoff_point,
    lower_bound,
    opt_u1,
    opt_u2,
    select_algorithm,
    worst_case_formula,
)
from .engine import next_meet_time, run
from .harness import (
    SweepScale,
    SweepSpec,
    cross_validate,
    lemma1_bruteforce,
    sweep,
    worst_case_cr,
)
from .model import (
    AlgorithmId,
    EvacuationResult,
    ExitSide,
    Role,
    Scenario,
    check_result,
    validate_scenario,
)
from .strategies import StrategyParams, make_strategy, simulate

__version__ = "0.1.0"

__all__ = [
    "AlgorithmId",
    "CrCurvePoint",
    "EvacuationResult",
    "ExitSide",
    "Role",
    "Scenario",
    "StrategyParams",
    "SweepScale",
    "SweepSpec",
    "bike_share_time",
    "check_result",
    "cr_alg1",
    "cr_alg2",
    "cr_alg3_ub",
    "cross_validate",
    "drop_off_distance",
    "ensemble_speed",
    "evac_time_case1",
    "evac_time_case2",
    "find_crossover",
    "handoff_point",
    "lemma1_bruteforce",
    "lower_bound",
    "make_strategy",
    "next_meet_time",
    "opt_u1",
    "opt_u2",
    "run",
    "select_algorithm",
    "simulate",
    "sweep",
    "validate_scenario",
    "worst_case_cr",
    "worst_case_formula",
]
