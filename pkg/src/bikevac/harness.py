"""Verification harness: oracles, adversarial worst cases, and sweeps.

Everything here cross-checks the two independent routes to the same
quantity: the event-driven simulator on one side and the closed-form
expressions on the other.  A brute-force grid search additionally
verifies the ride-share optimum from first principles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

from . import analysis
from .model import (
    AlgorithmId,
    EvacuationError,
    ExitSide,
    InfeasibleSpeed,
    Scenario,
    check_result,
)
from .strategies import StrategyParams, simulate


class ValidationFailure(EvacuationError):
    """A simulation disagreed with its closed-form oracle."""

    def __init__(self, message: str, scenario: Scenario | None = None) -> None:
        super().__init__(message)
        self.scenario = scenario


class SweepScale(Enum):
    LINEAR = "linear"
    LOG = "log"


@dataclass(frozen=True)
class SweepSpec:
    """Speed grid for regenerating the performance curves."""

    v_min: float
    v_max: float
    steps: int
    d_grid: tuple[float, ...] = (1.0,)
    scale: SweepScale = SweepScale.LINEAR

    def __post_init__(self) -> None:
        if not self.v_min > 1.0:
            raise ValueError(f"v_min must exceed 1, got {self.v_min}")
        if self.v_max < self.v_min:
            raise ValueError("v_max must be >= v_min")
        if self.steps < 1 or (self.steps < 2 and self.v_max != self.v_min):
            raise ValueError("need steps >= 2 (or steps == 1 with v_min == v_max)")
        if any(d < 1.0 for d in self.d_grid):
            raise ValueError("d_grid values must be >= 1")

    def speeds(self) -> list[float]:
        if self.steps == 1:
            return [self.v_min]
        if self.scale is SweepScale.LOG:
            lo, hi = math.log(self.v_min), math.log(self.v_max)
            vs = [
                math.exp(lo + i * (hi - lo) / (self.steps - 1))
                for i in range(self.steps)
            ]
        else:
            vs = [
                self.v_min + i * (self.v_max - self.v_min) / (self.steps - 1)
                for i in range(self.steps)
            ]
        vs[0], vs[-1] = self.v_min, self.v_max
        return vs


@dataclass(frozen=True)
class WorstCaseReport:
    """Worst exit placement found by exhaustive simulation."""

    algorithm: AlgorithmId
    v: float
    worst_d: float
    worst_side: ExitSide
    sim_cr: float
    formula_cr: float
    gap: float


def rideshare_max_arrival(x: float, d: float, v: float) -> float:
    """Later arrival when the bike is handed off x from the start:
    max(x/v + (d - x), x + (d - x)/v)."""
    return max(x / v + (d - x), x + (d - x) / v)


def lemma1_bruteforce(d: float, v: float, grid_size: int) -> tuple[float, float]:
    """Grid-search the ride-share hand-off point; returns (best_x, best_time).

    Independent oracle for the closed form d(v+1)/(2v) at x = d/2:
    plain enumeration, no shared algebra.
    """
    if grid_size < 3:
        raise ValueError(f"grid_size must be >= 3, got {grid_size}")
    best_x, best_time = 0.0, rideshare_max_arrival(0.0, d, v)
    for i in range(1, grid_size):
        x = d * i / (grid_size - 1)
        t = rideshare_max_arrival(x, d, v)
        if t < best_time:
            best_x, best_time = x, t
    return best_x, best_time


def _dyadic_augment(d_grid: Sequence[float]) -> list[float]:
    """Add near-boundary points 2^(k-2)*(1+1e-6) and exact powers 2^k.

    The doubling strategy's ratio is piecewise in the iteration index,
    spiking just past each dyadic boundary; a plain grid can miss them.
    """
    d_max = max(d_grid)
    points = set(d_grid)
    k = 0
    while 2.0**k <= d_max:
        points.add(2.0**k)
        boundary = 2.0 ** (k - 2) * (1.0 + 1e-6)
        if 1.0 <= boundary <= d_max:
            points.add(boundary)
        k += 1
    return sorted(points)


_FORMULA_CR: dict[AlgorithmId, Callable[[float], float]] = {
    AlgorithmId.ALG1: analysis.cr_alg1,
    AlgorithmId.ALG2: analysis.cr_alg2,
    AlgorithmId.ALG3: analysis.cr_alg3_ub,
    AlgorithmId.OFFLINE_BASELINE: lambda v: 1.0,
}


def worst_case_cr(
    algorithm: AlgorithmId,
    v: float,
    d_grid: Sequence[float],
    params: StrategyParams | None = None,
) -> WorstCaseReport:
    """Simulate every (d, side) in the grid and report the worst ratio.

    For the doubling strategy the grid is augmented with dyadic
    boundary points, where its ratio peaks.
    """
    ds = list(d_grid)
    if algorithm is AlgorithmId.ALG3:
        ds = _dyadic_augment(ds)
    worst: tuple[float, float, ExitSide] | None = None
    for d in ds:
        for side in (ExitSide.LEFT, ExitSide.RIGHT):
            scenario = Scenario(v, d, side, algorithm)
            result = simulate(scenario, params)
            cr = result.evacuation_time / analysis.bike_share_time(d, v)
            if worst is None or cr > worst[0]:
                worst = (cr, d, side)
    sim_cr, worst_d, worst_side = worst
    formula_cr = _FORMULA_CR[algorithm](v)
    return WorstCaseReport(
        algorithm=algorithm,
        v=v,
        worst_d=worst_d,
        worst_side=worst_side,
        sim_cr=sim_cr,
        formula_cr=formula_cr,
        gap=formula_cr - sim_cr,
    )


@dataclass(frozen=True)
class CrossValidationReport:
    """Outcome of a simulator-vs-formula sweep."""

    algorithm: AlgorithmId
    runs: int
    max_rel_deviation: float
    worst_scenario: Scenario | None
    passed: bool


def _rel_dev(actual: float, expected: float) -> float:
    return abs(actual - expected) / max(abs(expected), 1e-300)


def cross_validate(
    algorithm: AlgorithmId,
    v_grid: Sequence[float],
    d_grid: Sequence[float],
    params_fn: Callable[[float], StrategyParams] | None = None,
) -> CrossValidationReport:
    """Bind the simulator to the closed forms over a grid.

    For the opposite-direction strategies each exit side must reproduce
    its case formula (at the optimal speeds) within relative 1e-9; for
    the doubling strategy the simulated ratio must respect the upper
    bound and the lower bound, with simultaneous arrivals.

    `params_fn` injects non-default speeds while the expectations keep
    using the optimal ones, so corrupted strategies are detected.
    Raises ValidationFailure on the first disagreement.
    """
    runs = 0
    max_dev = 0.0
    worst: Scenario | None = None
    # The lower bound constrains the adversary's best placement, not
    # every instance, so compare it against the per-speed maximum.
    worst_cr: dict[float, float] = {}

    def note(dev: float, scenario: Scenario) -> None:
        nonlocal max_dev, worst
        if dev > max_dev:
            max_dev, worst = dev, scenario

    for v in v_grid:
        params = params_fn(v) if params_fn is not None else None
        for d in d_grid:
            if algorithm in (AlgorithmId.ALG1, AlgorithmId.ALG2):
                if algorithm is AlgorithmId.ALG1:
                    u1, u2 = analysis.opt_u1(v).speed, v
                else:
                    u1, u2 = 1.0, analysis.opt_u2(v).speed
                expected = {
                    ExitSide.LEFT: analysis.evac_time_case1(u1, u2, v, d),
                    ExitSide.RIGHT: analysis.evac_time_case2(u1, u2, v, d),
                }
                for side, exp_time in expected.items():
                    scenario = Scenario(v, d, side, algorithm)
                    result = simulate(scenario, params)
                    check_result(scenario, result)
                    runs += 1
                    dev = _rel_dev(result.evacuation_time, exp_time)
                    note(dev, scenario)
                    if dev > 1e-9:
                        raise ValidationFailure(
                            f"{algorithm.value} v={v} d={d} {side.value}: "
                            f"simulated {result.evacuation_time} vs "
                            f"formula {exp_time} (rel dev {dev:.3g})",
                            scenario,
                        )
            elif algorithm is AlgorithmId.ALG3:
                bound = analysis.cr_alg3_ub(v)
                for side in (ExitSide.LEFT, ExitSide.RIGHT):
                    scenario = Scenario(v, d, side, algorithm)
                    result = simulate(scenario, params)
                    check_result(scenario, result)
                    runs += 1
                    cr = result.evacuation_time / analysis.bike_share_time(d, v)
                    arr = sorted(result.arrival.values())
                    skew = (arr[1] - arr[0]) / arr[1]
                    note(skew, scenario)
                    worst_cr[v] = max(worst_cr.get(v, 1.0), cr)
                    if cr > bound + 1e-9:
                        raise ValidationFailure(
                            f"alg3 v={v} d={d} {side.value}: ratio {cr} "
                            f"exceeds bound {bound}",
                            scenario,
                        )
                    if cr < 1.0 - 1e-9:
                        raise ValidationFailure(
                            f"alg3 v={v} d={d} {side.value}: ratio {cr} "
                            f"beats the exit-known optimum",
                            scenario,
                        )
                    if skew > 1e-9:
                        raise ValidationFailure(
                            f"alg3 v={v} d={d} {side.value}: arrivals differ "
                            f"by {skew:.3g} relative",
                            scenario,
                        )
            else:
                expected_time = analysis.bike_share_time(d, v)
                for side in (ExitSide.LEFT, ExitSide.RIGHT):
                    scenario = Scenario(v, d, side, algorithm)
                    result = simulate(scenario, params)
                    check_result(scenario, result)
                    runs += 1
                    dev = _rel_dev(result.evacuation_time, expected_time)
                    note(dev, scenario)
                    if dev > 1e-9:
                        raise ValidationFailure(
                            f"baseline v={v} d={d}: simulated "
                            f"{result.evacuation_time} vs {expected_time}",
                            scenario,
                        )
    for v, cr in worst_cr.items():
        floor = analysis.lower_bound(v)
        if cr < floor - 1e-9:
            raise ValidationFailure(
                f"alg3 worst observed ratio {cr} at v={v} falls below the "
                f"lower bound {floor}; the d grid is too coarse to be "
                "adversarial"
            )
    return CrossValidationReport(algorithm, runs, max_dev, worst, True)


def sweep(spec: SweepSpec) -> list[analysis.CrCurvePoint]:
    """One performance-curve row per speed, ascending in v.

    Rows are pure functions of v; any execution order must produce
    this exact list.
    """
    rows = []
    for v in spec.speeds():
        try:
            cr2 = analysis.cr_alg2(v)
        except InfeasibleSpeed:
            cr2 = None
        rows.append(
            analysis.CrCurvePoint(
                v=v,
                cr_alg1=analysis.cr_alg1(v),
                cr_alg2=cr2,
                cr_alg3_ub=analysis.cr_alg3_ub(v),
                lower_bound=analysis.lower_bound(v),
                selected=analysis.select_algorithm(v),
            )
        )
    return rows
