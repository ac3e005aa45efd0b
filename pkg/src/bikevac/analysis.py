"""Closed-form performance analysis of the evacuation strategies.

Covers the exit-known ride-share optimum, the two evacuation-time cases
for the opposite-direction strategies, the optimal search speeds (roots
of quadratics in u1 and u2), the competitive ratios of all three online
strategies, the lower bound, the speed-regime selector, and a bisection
helper for locating curve crossings.

Conventions: v > 1 is the bike speed, d > 0 the exit distance, u1 the
sender's walking speed during search, u2 the receiver's biking speed
during search.  Competitive ratios always divide by the exit-known
optimum d(v+1)/(2v).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

from .model import (
    AlgorithmId,
    EvacuationError,
    InfeasibleSpeed,
    InvariantViolation,
    NonPositiveDistance,
    SpeedOutOfRange,
)


class DegenerateChase(EvacuationError):
    """Catch-up is impossible: the chased robot is at least as fast."""


class NoPositiveRoot(EvacuationError):
    """The quadratic has no usable positive root (defensive)."""


class NoSignChange(EvacuationError):
    """Bisection bracket does not straddle a crossing."""


def _require_speed(v: float, minimum: float = 1.0, strict: bool = True) -> None:
    ok = v > minimum if strict else v >= minimum
    if not ok:
        op = ">" if strict else ">="
        raise SpeedOutOfRange(f"bike speed must satisfy v {op} {minimum}, got {v}")


def ensemble_speed(v: float) -> float:
    """Speed of two robots ride-sharing one bike: 2v/(v+1)."""
    _require_speed(v)
    return 2.0 * v / (v + 1.0)


def bike_share_time(d: float, v: float) -> float:
    """Optimal time for both robots to cover distance d with one bike.

    One rides ahead to the midpoint, parks the bike and walks on; the
    other walks to the midpoint and rides.  Both arrive at d(v+1)/(2v).
    """
    _require_speed(v)
    if d < 0.0:
        raise NonPositiveDistance(f"distance must be non-negative, got {d}")
    return d * (v + 1.0) / (2.0 * v)


def handoff_point(d: float) -> float:
    """Bike hand-off distance that equalizes the two arrivals: d/2."""
    if d < 0.0:
        raise NonPositiveDistance(f"distance must be non-negative, got {d}")
    return d / 2.0


def _check_u1_case1(u1: float) -> None:
    if not 0.0 < u1 <= 1.0:
        raise InfeasibleSpeed(f"sender speed must lie in (0, 1], got {u1}")


def evac_time_case1(u1: float, u2: float, v: float, d: float) -> float:
    """Evacuation time when the sender's side holds the exit.

    The sender walks d at u1 and transmits; the receiver, then at
    distance d*u2/u1 on the far side, rides back at full speed v:

        d/u1 + d*u2/(v*u1) + d/v
    """
    _require_speed(v)
    if d <= 0.0:
        raise NonPositiveDistance(f"distance must be positive, got {d}")
    _check_u1_case1(u1)
    if not 0.0 <= u2 <= v:
        raise InfeasibleSpeed(f"receiver speed must lie in [0, v], got {u2}")
    return d / u1 + d * u2 / (v * u1) + d / v


def evac_time_case2(u1: float, u2: float, v: float, d: float) -> float:
    """Evacuation time when the receiver's side holds the exit.

    The receiver cannot transmit, so it rides back at speed v, catches
    the still-outbound sender, informs it face-to-face, and the pair
    ride-shares to the exit:

        (2dv^2 + 2d*u2*v + d*u1*v^2 + d*u1*v + d*u2*v^2 + d*u2*v)
        / (2*u2*v*(v - u1))
    """
    _require_speed(v)
    if d <= 0.0:
        raise NonPositiveDistance(f"distance must be positive, got {d}")
    if u1 >= v:
        raise DegenerateChase(f"no catch-up possible with u1={u1} >= v={v}")
    if u1 < 0.0:
        raise InfeasibleSpeed(f"sender speed must be non-negative, got {u1}")
    if not 0.0 < u2 <= v:
        raise InfeasibleSpeed(f"receiver speed must lie in (0, v], got {u2}")
    num = d * (
        2.0 * v * v
        + 2.0 * u2 * v
        + u1 * v * v
        + u1 * v
        + u2 * v * v
        + u2 * v
    )
    return num / (2.0 * u2 * v * (v - u1))


def worst_case_formula(u1: float, u2: float, v: float, d: float) -> float:
    """Adversarial evacuation time: the worse of the two exit sides."""
    return max(evac_time_case1(u1, u2, v, d), evac_time_case2(u1, u2, v, d))


def _positive_quadratic_root(a: float, b: float, c: float) -> float:
    """The unique positive root of a*x^2 + b*x + c = 0.

    Uses the cancellation-free form: the larger-magnitude root comes
    from q = -(b + sign(b)*sqrt(disc))/2, the other from c/q.
    """
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        raise NoPositiveRoot(f"negative discriminant {disc}")
    q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    roots = []
    if a != 0.0:
        roots.append(q / a)
    if q != 0.0:
        roots.append(c / q)
    positive = [r for r in roots if r > 0.0]
    if len(positive) != 1:
        raise NoPositiveRoot(f"expected one positive root, got {positive}")
    return positive[0]


class SpeedChoice(NamedTuple):
    """An optimal search speed plus whether it is physically usable."""

    speed: float
    feasible: bool


def opt_u1(v: float) -> SpeedChoice:
    """Optimal sender walking speed: positive root of

        (3 + v)*u1^2 + (7v + v^2)*u1 - 4v^2 = 0,

    obtained by equating the two case times with u2 = v.  Walkable
    (u1 <= 1) exactly when v <= 3.
    """
    _require_speed(v, strict=False)
    root = _positive_quadratic_root(3.0 + v, 7.0 * v + v * v, -4.0 * v * v)
    return SpeedChoice(root, root <= 1.0)


def opt_u2(v: float) -> SpeedChoice:
    """Optimal receiver biking speed with the sender at unit speed.

    Positive root of

        2(v - 1)*u2^2 + (v^2 - 3v - 2)*u2 - (3v^2 + v) = 0.

    The discriminant expands to v^4 + 18v^3 - 11v^2 + 4v + 4; the -11v^2
    coefficient is pinned by continuity (only it yields u2 = 3 at v = 3,
    where this strategy must match the walker-optimal one).  The root is
    re-verified by substitution before being returned.  Feasible when
    1 <= u2 <= v, i.e. from v = 3 on.
    """
    _require_speed(v)
    a = 2.0 * (v - 1.0)
    b = v * v - 3.0 * v - 2.0
    c = -(3.0 * v * v + v)
    root = _positive_quadratic_root(a, b, c)
    residual = (a * root + b) * root + c
    scale = max(abs(a) * root * root, abs(b) * root, abs(c))
    if abs(residual) > 1e-9 * scale:
        raise NoPositiveRoot(f"root {root} fails residual check: {residual}")
    return SpeedChoice(root, 1.0 <= root <= v)


def cr_alg1(v: float) -> float:
    """Competitive ratio of the biker-at-max-speed strategy at its
    optimal u1:  (2v/(v+1)) * (2v + u1) / (v*u1).

    Meaningful as an achievable ratio only while opt_u1(v) <= 1
    (v <= 3); computable for any v >= 1.
    """
    u1 = opt_u1(v).speed
    return 2.0 * (2.0 * v + u1) / (u1 * (v + 1.0))


def cr_alg2(v: float) -> float:
    """Competitive ratio of the walker-at-max-speed strategy at its
    optimal u2:  (2v/(v+1)) * (1 + 1/v + u2/v).

    Raises InfeasibleSpeed where the optimal u2 exceeds v (v < 3).
    """
    choice = opt_u2(v)
    if not choice.feasible:
        raise InfeasibleSpeed(
            f"optimal receiver speed {choice.speed} infeasible at v={v}"
        )
    return 2.0 * (v + 1.0 + choice.speed) / (v + 1.0)


def cr_alg3_ub(v: float) -> float:
    """Upper bound on the doubling strategy's competitive ratio:

        (2v/(v+1)) * (9/v + 1/2 - 1/(2v^2)).

    Strictly decreasing for large v, with limit 1.
    """
    _require_speed(v)
    return (2.0 * v / (v + 1.0)) * (9.0 / v + 0.5 - 1.0 / (2.0 * v * v))


def drop_off_distance(d: float, v: float) -> float:
    """How far back from the exit the doubling-strategy sender parks the
    bike so that both robots arrive together:  d/2 - d/(2v)."""
    _require_speed(v)
    if d <= 0.0:
        raise NonPositiveDistance(f"distance must be positive, got {d}")
    return d / 2.0 - d / (2.0 * v)


def lower_bound_slow_bike(v: float) -> float:
    """Lower-bound branch for v <= 3: 6/(v+1).

    With a slow bike the rider cannot reach the far endpoint before the
    walker; no schedule beats total effort 3d/v against optimum
    d(v+1)/(2v)."""
    return 6.0 / (v + 1.0)


def lower_bound_fast_bike(v: float) -> float:
    """Lower-bound branch for v >= 3: (v^2 + 2v - 3)/(v^2 - 1), i.e.
    (v+3)/(v+1), from the catch-up-and-ride-share schedule."""
    return (v + 3.0) / (v + 1.0)


def lower_bound(v: float) -> float:
    """Lower bound on any strategy's competitive ratio.

    6/(v+1) for v <= 3 and (v+3)/(v+1) above; the branches agree (1.5)
    at v = 3.
    """
    _require_speed(v)
    if v <= 3.0:
        return lower_bound_slow_bike(v)
    return lower_bound_fast_bike(v)


def select_algorithm(v: float) -> AlgorithmId:
    """Best strategy for a given bike speed.

    Regime boundaries at v = 3 and v = 10; ties go to the lower-indexed
    strategy, whose ratio is equal or better there.
    """
    _require_speed(v)
    if v <= 3.0:
        return AlgorithmId.ALG1
    if v <= 10.0:
        return AlgorithmId.ALG2
    return AlgorithmId.ALG3


def find_crossover(
    f: Callable[[float], float],
    g: Callable[[float], float],
    v_lo: float,
    v_hi: float,
    tol: float = 1e-9,
) -> float:
    """Bisect for the speed where curves f and g cross.

    Requires f - g to change sign between the endpoints; narrows the
    bracket to `tol` and returns its midpoint.
    """
    if not v_lo < v_hi:
        raise ValueError(f"need v_lo < v_hi, got [{v_lo}, {v_hi}]")
    h_lo = f(v_lo) - g(v_lo)
    h_hi = f(v_hi) - g(v_hi)
    if h_lo == 0.0:
        return v_lo
    if h_hi == 0.0:
        return v_hi
    if (h_lo > 0.0) == (h_hi > 0.0):
        raise NoSignChange(f"f - g has equal signs at {v_lo} and {v_hi}")
    lo, hi = v_lo, v_hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        h_mid = f(mid) - g(mid)
        if h_mid == 0.0:
            return mid
        if (h_mid > 0.0) == (h_lo > 0.0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class CrCurvePoint:
    """One row of the performance sweep at bike speed v.

    cr_alg2 is None where the optimal u2 is infeasible (v < 3).
    """

    v: float
    cr_alg1: float
    cr_alg2: float | None
    cr_alg3_ub: float
    lower_bound: float
    selected: AlgorithmId

    def __post_init__(self) -> None:
        ratios = [self.cr_alg1, self.cr_alg3_ub]
        if self.cr_alg2 is not None:
            ratios.append(self.cr_alg2)
        if any(r < 1.0 - 1e-12 for r in ratios) or self.lower_bound < 1.0 - 1e-12:
            raise InvariantViolation(f"competitive ratio below 1 at v={self.v}")
        if self.lower_bound > min(ratios) * (1 + 1e-9) + 1e-12:
            raise InvariantViolation(f"lower bound exceeds a ratio at v={self.v}")
