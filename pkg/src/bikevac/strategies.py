"""The four concrete robot behaviors.

Three online strategies (neither robot knows the exit) and the
exit-known ride-share baseline they are measured against:

* opposite-direction search with the receiver biking at full speed and
  the sender walking at a tuned u1 (best for v <= 3);
* opposite-direction search with the sender walking at full speed and
  the receiver biking at a tuned u2 (best for 3 <= v <= 10);
* a doubling sweep where the biking sender searches geometrically
  growing intervals, alternating sides, and the walking receiver
  shadows it at 1/v scale (best for large v);
* the offline baseline: both robots know the exit and ride-share.

Each strategy is a small per-robot state machine driven by engine
events.  Robots act only on information they legitimately hold: their
own pedometer, the bike speed, and message payloads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import analysis, engine
from .model import (
    AlgorithmId,
    EvacuationResult,
    InfeasibleSpeed,
    Role,
    Scenario,
)
from .engine import (
    Event,
    EventKind,
    Forever,
    MeetAgent,
    ReachCoordinate,
    StrategyContext,
)


@dataclass(frozen=True)
class StrategyParams:
    """Search speeds for the opposite-direction strategies.

    None means "use the optimal speed for the scenario's v".  Explicit
    values let tests probe non-optimal behavior.
    """

    u1: float | None = None
    u2: float | None = None


def _sign(x: float) -> float:
    return math.copysign(1.0, x)


class OppositeDirectionStrategy:
    """Sender walks left at u1, receiver bikes right at u2.

    Whoever finds the exit ends the search: the sender announces it
    wirelessly and waits; the receiver (mute at distance) rides back at
    full speed, informs the sender face-to-face, and the pair
    ride-shares to the exit with a midpoint hand-off.
    """

    def __init__(self, u1: float, u2: float) -> None:
        self.u1 = u1
        self.u2 = u2
        self._phase = {Role.SENDER: "search", Role.RECEIVER: "search"}
        self._exit_x: float | None = None
        self._handoff: float | None = None

    def start(self, ctx: StrategyContext) -> None:
        ctx.pick_bike(Role.RECEIVER)
        ctx.set_course(Role.SENDER, -self.u1, Forever())
        ctx.set_course(Role.RECEIVER, +self.u2, Forever())

    def on_event(self, ctx: StrategyContext, event: Event) -> None:
        kind = event.kind
        if kind is EventKind.EXIT_REACHED:
            if self._exit_x is None:
                self._found(ctx, event)
            else:
                ctx.arrive(event.agent)
        elif kind is EventKind.WIRELESS_DELIVERED:
            # Receiver turns immediately and rides to the exit at full speed.
            e = event.message.payload
            here = ctx.position(Role.RECEIVER)
            self._phase[Role.RECEIVER] = "to_exit"
            ctx.set_course(
                Role.RECEIVER, _sign(e - here) * ctx.bike_speed, ReachCoordinate(e)
            )
        elif kind is EventKind.COLOCATED:
            e = self._exit_x
            ctx.send_f2f(Role.RECEIVER, e)
            meet = ctx.position(Role.RECEIVER)
            self._handoff = (meet + e) / 2.0
            self._phase[Role.RECEIVER] = "to_handoff"
            ctx.set_course(
                Role.RECEIVER,
                _sign(e - meet) * ctx.bike_speed,
                ReachCoordinate(self._handoff),
            )
        elif kind is EventKind.F2F_DELIVERED:
            e = event.message.payload
            here = ctx.position(Role.SENDER)
            self._phase[Role.SENDER] = "to_handoff"
            ctx.set_course(
                Role.SENDER, _sign(e - here) * 1.0, ReachCoordinate(self._handoff)
            )
        elif kind is EventKind.WAYPOINT_REACHED:
            role = event.agent
            if self._phase[role] != "to_handoff":
                return
            e = self._exit_x
            here = ctx.position(role)
            self._phase[role] = "to_exit"
            if role is Role.RECEIVER:
                ctx.drop_bike(Role.RECEIVER)
                ctx.set_course(role, _sign(e - here) * 1.0, ReachCoordinate(e))
            else:
                ctx.pick_bike(Role.SENDER)
                ctx.set_course(
                    role, _sign(e - here) * ctx.bike_speed, ReachCoordinate(e)
                )

    def _found(self, ctx: StrategyContext, event: Event) -> None:
        self._exit_x = event.x
        if event.agent is Role.SENDER:
            # Announce and stay put; the receiver handles the rest.
            ctx.send_wireless(event.x)
            ctx.arrive(Role.SENDER)
        else:
            # The receiver cannot transmit at distance: chase the sender.
            self._phase[Role.RECEIVER] = "chase"
            towards_sender = -_sign(event.x)
            ctx.set_course(
                Role.RECEIVER,
                towards_sender * ctx.bike_speed,
                MeetAgent(Role.SENDER),
            )


class DoublingStrategy:
    """Alternating-side doubling search; the receiver imitates at 1/v.

    Iteration k sweeps distance 2^k (right when k is odd) and returns
    to the origin; the receiver does the same at amplitude 2^k/v, so
    both robots complete each iteration simultaneously.  The sender,
    always ahead, finds the exit, announces it, rides back to park the
    bike where the receiver will want it, and walks back; both robots
    arrive at the exit at the same instant.
    """

    def __init__(self) -> None:
        self._k = {Role.SENDER: 1, Role.RECEIVER: 1}
        self._phase = {Role.SENDER: "out", Role.RECEIVER: "out"}
        # Per-robot knowledge of the exit: the sender's from standing on
        # it, the receiver's from the wireless payload.
        self._known_exit: dict[Role, float] = {}

    @staticmethod
    def _direction(k: int) -> float:
        return 1.0 if k % 2 == 1 else -1.0

    def _launch(self, ctx: StrategyContext, role: Role) -> None:
        k = self._k[role]
        s = self._direction(k)
        reach = 2.0**k if role is Role.SENDER else 2.0**k / ctx.bike_speed
        speed = ctx.bike_speed if role is Role.SENDER else 1.0
        self._phase[role] = "out"
        ctx.set_course(role, s * speed, ReachCoordinate(s * reach))

    def start(self, ctx: StrategyContext) -> None:
        ctx.pick_bike(Role.SENDER)
        self._launch(ctx, Role.SENDER)
        self._launch(ctx, Role.RECEIVER)

    @staticmethod
    def _drop_coordinate(exit_x: float, v: float) -> float:
        return exit_x - _sign(exit_x) * analysis.drop_off_distance(abs(exit_x), v)

    def on_event(self, ctx: StrategyContext, event: Event) -> None:
        kind = event.kind
        if kind is EventKind.EXIT_REACHED:
            if event.agent not in self._known_exit:
                if event.agent is not Role.SENDER:
                    raise engine.EngineError(
                        "receiver reached the exit before the sender"
                    )
                self._found(ctx, event.x)
            else:
                ctx.arrive(event.agent)
        elif kind is EventKind.WIRELESS_DELIVERED:
            e = event.message.payload
            self._known_exit[Role.RECEIVER] = e
            s = _sign(e)
            drop = self._drop_coordinate(e, ctx.bike_speed)
            here = ctx.position(Role.RECEIVER)
            # The receiver is still on its outbound leg, short of the
            # drop point, whenever the sender finds the exit.
            assert s * here <= s * drop + 1e-9
            self._phase[Role.RECEIVER] = "to_drop"
            ctx.set_course(Role.RECEIVER, s * 1.0, ReachCoordinate(drop))
        elif kind is EventKind.WAYPOINT_REACHED:
            role = event.agent
            phase = self._phase[role]
            if phase == "out":
                s = self._direction(self._k[role])
                speed = ctx.bike_speed if role is Role.SENDER else 1.0
                self._phase[role] = "back"
                ctx.set_course(role, -s * speed, ReachCoordinate(0.0))
            elif phase == "back":
                self._k[role] += 1
                self._launch(ctx, role)
            elif phase == "to_drop":
                e = self._known_exit[role]
                s = _sign(e)
                self._phase[role] = "to_exit"
                if role is Role.SENDER:
                    ctx.drop_bike(Role.SENDER)
                    ctx.set_course(Role.SENDER, s * 1.0, ReachCoordinate(e))
                else:
                    ctx.pick_bike(Role.RECEIVER)
                    ctx.set_course(
                        Role.RECEIVER, s * ctx.bike_speed, ReachCoordinate(e)
                    )

    def _found(self, ctx: StrategyContext, exit_x: float) -> None:
        self._known_exit[Role.SENDER] = exit_x
        s = _sign(exit_x)
        drop = self._drop_coordinate(exit_x, ctx.bike_speed)
        ctx.send_wireless(exit_x)
        self._phase[Role.SENDER] = "to_drop"
        ctx.set_course(Role.SENDER, -s * ctx.bike_speed, ReachCoordinate(drop))


class OfflineBaselineStrategy:
    """Exit-known ride-share: bike to the midpoint, park, walk on; the
    walker picks the bike up there.  Both arrive at d(v+1)/(2v)."""

    def __init__(self, exit_x: float) -> None:
        self.exit_x = exit_x

    def start(self, ctx: StrategyContext) -> None:
        e = self.exit_x
        s = _sign(e)
        midpoint = s * analysis.handoff_point(abs(e))
        ctx.pick_bike(Role.SENDER)
        ctx.set_course(Role.SENDER, s * ctx.bike_speed, ReachCoordinate(midpoint))
        ctx.set_course(Role.RECEIVER, s * 1.0, ReachCoordinate(midpoint))

    def on_event(self, ctx: StrategyContext, event: Event) -> None:
        e = self.exit_x
        s = _sign(e)
        if event.kind is EventKind.WAYPOINT_REACHED:
            if event.agent is Role.SENDER:
                ctx.drop_bike(Role.SENDER)
                ctx.set_course(Role.SENDER, s * 1.0, ReachCoordinate(e))
            else:
                ctx.pick_bike(Role.RECEIVER)
                ctx.set_course(Role.RECEIVER, s * ctx.bike_speed, ReachCoordinate(e))
        elif event.kind is EventKind.EXIT_REACHED:
            ctx.arrive(event.agent)


def _resolve_alg1(v: float, params: StrategyParams) -> OppositeDirectionStrategy:
    if params.u1 is None:
        choice = analysis.opt_u1(v)
        if not choice.feasible:
            raise InfeasibleSpeed(
                f"optimal sender speed {choice.speed} exceeds 1 at v={v}; "
                "pass an explicit u1"
            )
        u1 = choice.speed
    else:
        u1 = params.u1
    u2 = v if params.u2 is None else params.u2
    _check_speeds(u1, u2, v)
    return OppositeDirectionStrategy(u1, u2)


def _resolve_alg2(v: float, params: StrategyParams) -> OppositeDirectionStrategy:
    u1 = 1.0 if params.u1 is None else params.u1
    if params.u2 is None:
        choice = analysis.opt_u2(v)
        if not choice.feasible:
            raise InfeasibleSpeed(
                f"optimal receiver speed {choice.speed} exceeds v={v}; "
                "pass an explicit u2"
            )
        u2 = choice.speed
    else:
        u2 = params.u2
    _check_speeds(u1, u2, v)
    return OppositeDirectionStrategy(u1, u2)


def _check_speeds(u1: float, u2: float, v: float) -> None:
    if not 0.0 < u1 <= 1.0:
        raise InfeasibleSpeed(f"sender search speed must lie in (0, 1], got {u1}")
    if not 1.0 <= u2 <= v:
        raise InfeasibleSpeed(f"receiver search speed must lie in [1, v], got {u2}")


def make_strategy(scenario: Scenario, params: StrategyParams | None = None):
    """Build the strategy named by the scenario, with optimal defaults."""
    params = params or StrategyParams()
    alg = scenario.algorithm
    if alg is AlgorithmId.ALG1:
        return _resolve_alg1(scenario.v, params)
    if alg is AlgorithmId.ALG2:
        return _resolve_alg2(scenario.v, params)
    if alg is AlgorithmId.ALG3:
        if params.u1 is not None or params.u2 is not None:
            raise ValueError("the doubling strategy takes no speed parameters")
        return DoublingStrategy()
    if params.u1 is not None or params.u2 is not None:
        raise ValueError("the baseline takes no speed parameters")
    return OfflineBaselineStrategy(scenario.exit_position)


def simulate(
    scenario: Scenario, params: StrategyParams | None = None
) -> EvacuationResult:
    """Run the scenario under its own algorithm's strategy."""
    return engine.run(scenario, make_strategy(scenario, params))
