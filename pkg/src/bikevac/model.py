"""Domain types for two-robot, bike-assisted evacuation on a line.

Two unit-speed robots and a non-autonomous bike of speed v > 1 start at
the origin of an infinite line; an exit sits at an unknown signed
distance.  Communication is asymmetric: the sender transmits wirelessly
at any distance but receives only face-to-face, the receiver is the
mirror image, and the bike carries no radio at all.

Everything here is an immutable value object.  The physical rules (speed
caps, single rider, parked bike never moves, channel legality) are
encoded as invariants that `check_result` verifies structurally on any
trace, including hand-built or corrupted ones.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from enum import Enum

# Exact closed-form event times keep errors near machine precision, so
# equality checks can be tight: relative 1e-9, absolute 1e-12 near zero.
REL_TOL = 1e-9
ABS_TOL = 1e-12


def is_close(a: float, b: float) -> bool:
    """Equality up to the package-wide tolerance."""
    return math.isclose(a, b, rel_tol=REL_TOL, abs_tol=ABS_TOL)


class EvacuationError(Exception):
    """Base class for all domain errors raised by this package."""


class SpeedOutOfRange(EvacuationError):
    """Bike speed must exceed walking speed (v > 1)."""


class NonPositiveDistance(EvacuationError):
    """Exit distance must be strictly positive."""


class Alg3DistanceTooSmall(EvacuationError):
    """The doubling strategy requires d >= 1 for a bounded ratio."""


class InfeasibleSpeed(EvacuationError):
    """A commanded or derived speed lies outside its legal range."""


class InvariantViolation(EvacuationError):
    """A trace or result breaks a model invariant."""


class ExitSide(Enum):
    LEFT = "left"
    RIGHT = "right"

    @property
    def sign(self) -> int:
        return -1 if self is ExitSide.LEFT else 1


class AlgorithmId(Enum):
    ALG1 = "alg1"
    ALG2 = "alg2"
    ALG3 = "alg3"
    OFFLINE_BASELINE = "baseline"


class Role(Enum):
    SENDER = "sender"
    RECEIVER = "receiver"

    @property
    def other(self) -> Role:
        return Role.RECEIVER if self is Role.SENDER else Role.SENDER


class Mode(Enum):
    WALKING = "walking"
    BIKING = "biking"


class Channel(Enum):
    WIRELESS = "wireless"
    F2F = "f2f"


@dataclass(frozen=True)
class Scenario:
    """One evacuation instance: bike speed, exit placement, algorithm."""

    v: float
    d: float
    side: ExitSide
    algorithm: AlgorithmId

    @property
    def exit_position(self) -> float:
        return self.side.sign * self.d


def validate_scenario(s: Scenario) -> None:
    """Raise unless the scenario lies in the supported domain.

    v must strictly exceed walking speed, d must be positive, and the
    doubling strategy additionally needs d >= 1 (its ratio is unbounded
    as d -> 0).
    """
    if not s.v > 1.0:
        raise SpeedOutOfRange(f"bike speed must satisfy v > 1, got {s.v}")
    if not s.d > 0.0:
        raise NonPositiveDistance(f"exit distance must be positive, got {s.d}")
    if s.algorithm is AlgorithmId.ALG3 and s.d < 1.0:
        raise Alg3DistanceTooSmall(
            f"doubling strategy requires d >= 1, got {s.d}"
        )


@dataclass(frozen=True)
class AgentState:
    """Snapshot of one robot: where it is and how it is moving."""

    role: Role
    position: float
    mode: Mode
    velocity: float

    def speed_cap(self, v: float) -> float:
        return v if self.mode is Mode.BIKING else 1.0


@dataclass(frozen=True)
class BikeState:
    """The bike: carried by at most one robot, parked otherwise."""

    position: float
    carrier: Role | None = None


@dataclass(frozen=True)
class Message:
    """One communication: who sent it, over which channel, and the
    exit coordinate it carries."""

    sender_role: Role
    channel: Channel
    payload: float
    timestamp: float


@dataclass(frozen=True)
class TrajectorySegment:
    """Linear motion from (t0, x0) to (t1, x1).

    `mode` is "walking"/"biking" for robots; for the bike it is "parked"
    or the carrier's role name.
    """

    t0: float
    t1: float
    x0: float
    x1: float
    mode: str

    @property
    def speed(self) -> float:
        if self.t1 == self.t0:
            return 0.0
        return abs(self.x1 - self.x0) / (self.t1 - self.t0)


@dataclass(frozen=True)
class Trajectory:
    """Piecewise-linear position record, contiguous in time and space."""

    segments: tuple[TrajectorySegment, ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "_starts", tuple(s.t0 for s in self.segments)
        )

    @property
    def end_time(self) -> float:
        return self.segments[-1].t1 if self.segments else 0.0

    @property
    def final_position(self) -> float:
        return self.segments[-1].x1 if self.segments else 0.0

    def position_at(self, t: float) -> float:
        """Interpolated position at time t (t within the recorded span)."""
        if not self.segments:
            raise ValueError("empty trajectory")
        idx = bisect.bisect_right(self._starts, t) - 1
        idx = max(idx, 0)
        seg = self.segments[idx]
        if t < seg.t0 - ABS_TOL or t > self.end_time * (1 + REL_TOL) + ABS_TOL:
            raise ValueError(f"time {t} outside trajectory span")
        if t >= seg.t1:
            return seg.x1
        if seg.t1 == seg.t0:
            return seg.x1
        frac = (t - seg.t0) / (seg.t1 - seg.t0)
        return seg.x0 + frac * (seg.x1 - seg.x0)


@dataclass(frozen=True)
class EventRecord:
    """One line of the simulation event log."""

    time: float
    kind: str
    detail: str


@dataclass(frozen=True)
class EvacuationResult:
    """Outcome of one run: arrivals, trajectories, and the comm log."""

    arrival: dict[Role, float]
    evacuation_time: float
    trajectories: dict[Role, Trajectory]
    bike_trajectory: Trajectory
    messages: tuple[Message, ...] = ()
    events: tuple[EventRecord, ...] = field(default=())


def _check_trajectory(name: str, traj: Trajectory) -> None:
    if not traj.segments:
        raise InvariantViolation(f"{name}: empty trajectory")
    prev = None
    for i, seg in enumerate(traj.segments):
        if seg.t1 < seg.t0:
            raise InvariantViolation(f"{name}: segment {i} runs backwards")
        if prev is not None:
            if prev.t1 != seg.t0 and not is_close(prev.t1, seg.t0):
                raise InvariantViolation(
                    f"{name}: time gap between segments {i - 1} and {i}"
                )
            if not is_close(prev.x1, seg.x0):
                raise InvariantViolation(
                    f"{name}: spatial jump between segments {i - 1} and {i}"
                )
        prev = seg


def _check_segment_speeds(name: str, traj: Trajectory, caps: dict[str, float]) -> None:
    for i, seg in enumerate(traj.segments):
        cap = caps.get(seg.mode)
        if cap is None:
            raise InvariantViolation(f"{name}: segment {i} has unknown mode {seg.mode!r}")
        if seg.speed > cap * (1 + REL_TOL) + ABS_TOL:
            raise InvariantViolation(
                f"{name}: segment {i} speed {seg.speed} exceeds cap {cap}"
            )


def _biking_intervals(traj: Trajectory) -> list[tuple[float, float]]:
    return [
        (s.t0, s.t1)
        for s in traj.segments
        if s.mode == Mode.BIKING.value and s.t1 > s.t0
    ]


def check_result(scenario: Scenario, result: EvacuationResult) -> None:
    """Assert every model invariant on a finished trace.

    Raises InvariantViolation on the first breach; deliberately works
    from the recorded data alone so corrupted traces are caught.
    """
    v = scenario.v
    exit_x = scenario.exit_position

    for role in Role:
        if role not in result.arrival:
            raise InvariantViolation(f"missing arrival time for {role.value}")
    worst = max(result.arrival.values())
    if not is_close(result.evacuation_time, worst):
        raise InvariantViolation(
            f"evacuation_time {result.evacuation_time} != max arrival {worst}"
        )

    for role in Role:
        traj = result.trajectories[role]
        _check_trajectory(role.value, traj)
        _check_segment_speeds(
            role.value, traj, {Mode.WALKING.value: 1.0, Mode.BIKING.value: v}
        )
        if not is_close(traj.final_position, exit_x):
            raise InvariantViolation(
                f"{role.value} ends at {traj.final_position}, exit at {exit_x}"
            )

    _check_trajectory("bike", result.bike_trajectory)
    _check_segment_speeds(
        "bike",
        result.bike_trajectory,
        {"parked": 0.0, Role.SENDER.value: v, Role.RECEIVER.value: v},
    )

    # Only one rider at a time: biking intervals of the two robots may
    # touch at endpoints (instantaneous switch) but never overlap.
    ints_s = _biking_intervals(result.trajectories[Role.SENDER])
    ints_r = _biking_intervals(result.trajectories[Role.RECEIVER])
    for a0, a1 in ints_s:
        for b0, b1 in ints_r:
            overlap = min(a1, b1) - max(a0, b0)
            if overlap > ABS_TOL + REL_TOL * max(a1, b1):
                raise InvariantViolation(
                    f"both robots ride the bike on [{max(a0, b0)}, {min(a1, b1)}]"
                )

    # Carried bike tracks its carrier; parked bike never moves.
    for i, seg in enumerate(result.bike_trajectory.segments):
        if seg.mode == "parked":
            if not is_close(seg.x0, seg.x1):
                raise InvariantViolation(f"bike: parked segment {i} moves")
            continue
        carrier = Role(seg.mode)
        ctraj = result.trajectories[carrier]
        for t, x in ((seg.t0, seg.x0), (seg.t1, seg.x1)):
            cx = ctraj.position_at(t)
            if not is_close(cx, x):
                raise InvariantViolation(
                    f"bike: segment {i} strays from carrier {carrier.value}"
                )

    for msg in result.messages:
        if msg.channel is Channel.WIRELESS and msg.sender_role is not Role.SENDER:
            raise InvariantViolation("wireless transmission by the receiver")
        if msg.channel is Channel.F2F:
            xs = result.trajectories[Role.SENDER].position_at(msg.timestamp)
            xr = result.trajectories[Role.RECEIVER].position_at(msg.timestamp)
            if not is_close(xs, xr):
                raise InvariantViolation(
                    f"f2f message at t={msg.timestamp} while robots are apart"
                )

    last = 0.0
    for rec in result.events:
        if rec.time < last - ABS_TOL:
            raise InvariantViolation("event log times decrease")
        last = max(last, rec.time)
