"""Exact continuous-time, event-driven simulation core.

There is no timestep.  Strategies command piecewise-constant velocities
with a stop condition; between events every position is linear in time,
so the next event instant (coordinate reached, robots meeting, exit
crossed) is solved in closed form.  The only numeric error is
floating-point roundoff, which keeps simulated times within ~1e-15
relative of the hand-derived formulas and lets tests compare at 1e-9.

The engine also owns the communication rules: wireless delivery is
instantaneous at any distance but only the sender may transmit; a
face-to-face exchange requires colocation.  Violations raise rather
than silently degrade.

Simultaneous events are processed in a fixed kind order (exit first,
then waypoint, colocation, bike transfers, deliveries), with the sender
before the receiver on full ties, so runs are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Protocol

from .model import (
    ABS_TOL,
    Channel,
    EvacuationError,
    EvacuationResult,
    EventRecord,
    Message,
    Mode,
    Role,
    Scenario,
    Trajectory,
    TrajectorySegment,
    is_close,
    validate_scenario,
)

_MAX_EVENTS = 100_000


class EngineError(EvacuationError):
    """Base class for failures inside the simulation loop."""


class CommViolation(EngineError):
    """Illegal channel use (receiver wireless send, distant F2F)."""


class SpeedViolation(EngineError):
    """Commanded velocity exceeds the current locomotion cap."""


class NoProgress(EngineError):
    """No future event and no termination: malformed strategy."""


# --- motion commands -------------------------------------------------

@dataclass(frozen=True)
class ReachCoordinate:
    x: float


@dataclass(frozen=True)
class MeetAgent:
    other: Role


@dataclass(frozen=True)
class MessageReceived:
    """Motion ends only when a delivery handler issues a new command."""


@dataclass(frozen=True)
class Forever:
    """Open-ended motion; events can still interrupt it."""


StopCondition = ReachCoordinate | MeetAgent | MessageReceived | Forever


@dataclass(frozen=True)
class MotionCommand:
    agent: Role
    velocity: float
    until: StopCondition


class EventKind(IntEnum):
    """Tie-breaking order for simultaneous events (lower fires first)."""

    EXIT_REACHED = 1
    WAYPOINT_REACHED = 2
    COLOCATED = 3
    BIKE_DROPPED = 4
    BIKE_PICKED = 5
    WIRELESS_DELIVERED = 6
    F2F_DELIVERED = 7


@dataclass(frozen=True)
class Event:
    time: float
    kind: EventKind
    agent: Role | None = None
    other: Role | None = None
    message: Message | None = None
    x: float | None = None


def next_meet_time(p1: float, v1: float, p2: float, v2: float) -> float | None:
    """Smallest t >= 0 with p1 + v1*t = p2 + v2*t, or None.

    Colocated points meet immediately; equal velocities from distinct
    points, or a gap that only grows, never meet.
    """
    if p1 == p2:
        return 0.0
    if v1 == v2:
        return None
    t = (p2 - p1) / (v1 - v2)
    return t if t >= 0.0 else None


class Strategy(Protocol):
    """Event-driven controller for both robots."""

    def start(self, ctx: StrategyContext) -> None: ...

    def on_event(self, ctx: StrategyContext, event: Event) -> None: ...


@dataclass
class _AgentRt:
    role: Role
    x: float = 0.0
    velocity: float = 0.0
    until: StopCondition = Forever()
    arrived: bool = False
    known_exit: float | None = None
    # True once EXIT_REACHED fired at the current standstill on the exit;
    # cleared as soon as the robot moves off it.
    exit_notified: bool = False


@dataclass
class _BikeRt:
    x: float = 0.0
    carrier: Role | None = None


_ROLE_ORDER = {Role.SENDER: 0, Role.RECEIVER: 1, None: 2}


def _event_key(e: Event) -> tuple[float, int, int]:
    return (e.time, int(e.kind), _ROLE_ORDER[e.agent])


class StrategyContext:
    """The strategy-facing surface of a running simulation.

    Deliberately narrow: strategies see the clock, the bike speed, and
    positions, but never the exit; they learn it only through events.
    """

    def __init__(self, sim: Simulation) -> None:
        self._sim = sim

    @property
    def time(self) -> float:
        return self._sim._t

    @property
    def bike_speed(self) -> float:
        return self._sim.scenario.v

    def position(self, role: Role) -> float:
        return self._sim._agents[role].x

    def has_bike(self, role: Role) -> bool:
        return self._sim._bike.carrier is role

    def bike_position(self) -> float:
        return self._sim._bike.x

    def set_course(self, role: Role, velocity: float, until: StopCondition) -> None:
        self._sim._set_course(MotionCommand(role, velocity, until))

    def send_wireless(self, payload: float) -> None:
        self._sim._send(Message(Role.SENDER, Channel.WIRELESS, payload, self._sim._t))

    def send_f2f(self, sender_role: Role, payload: float) -> None:
        self._sim._send(Message(sender_role, Channel.F2F, payload, self._sim._t))

    def pick_bike(self, role: Role) -> None:
        self._sim._pick_bike(role)

    def drop_bike(self, role: Role) -> None:
        self._sim._drop_bike(role)

    def arrive(self, role: Role) -> None:
        self._sim._arrive(role)


class Simulation:
    """One deterministic run of a strategy on a scenario."""

    def __init__(self, scenario: Scenario, strategy: Strategy) -> None:
        validate_scenario(scenario)
        self.scenario = scenario
        self.strategy = strategy
        self._exit_x = scenario.exit_position
        self._t = 0.0
        self._agents = {role: _AgentRt(role) for role in Role}
        self._bike = _BikeRt()
        self._arrivals: dict[Role, float] = {}
        self._messages: list[Message] = []
        self._events: list[EventRecord] = []
        self._segments: dict[str, list[TrajectorySegment]] = {
            Role.SENDER.value: [],
            Role.RECEIVER.value: [],
            "bike": [],
        }
        self._cascade: list[Event] = []
        self._ctx = StrategyContext(self)

    # -- state transitions commanded by the strategy ------------------

    def _mode(self, role: Role) -> Mode:
        return Mode.BIKING if self._bike.carrier is role else Mode.WALKING

    def _cap(self, role: Role) -> float:
        return self.scenario.v if self._mode(role) is Mode.BIKING else 1.0

    def _set_course(self, cmd: MotionCommand) -> None:
        cap = self._cap(cmd.agent)
        if abs(cmd.velocity) > cap * (1 + 1e-9) + ABS_TOL:
            raise SpeedViolation(
                f"{cmd.agent.value} commanded |{cmd.velocity}| > cap {cap}"
            )
        agent = self._agents[cmd.agent]
        agent.velocity = cmd.velocity
        agent.until = cmd.until

    def _validate_message(self, msg: Message) -> None:
        if msg.channel is Channel.WIRELESS:
            if msg.sender_role is not Role.SENDER:
                raise CommViolation("only the sender may transmit wirelessly")
        else:
            a = self._agents[Role.SENDER].x
            b = self._agents[Role.RECEIVER].x
            if not is_close(a, b):
                raise CommViolation(
                    f"f2f send while robots are at {a} and {b}"
                )

    def _send(self, msg: Message) -> None:
        self._validate_message(msg)
        self._messages.append(msg)
        kind = (
            EventKind.WIRELESS_DELIVERED
            if msg.channel is Channel.WIRELESS
            else EventKind.F2F_DELIVERED
        )
        self._cascade.append(
            Event(self._t, kind, agent=msg.sender_role.other, message=msg)
        )

    def deliver(self, msg: Message) -> None:
        """Apply one message to the world immediately (test hook).

        Validates channel legality and colocation, logs the message,
        and updates the addressee's knowledge of the exit.
        """
        self._validate_message(msg)
        self._messages.append(msg)
        addressee = msg.sender_role.other
        self._agents[addressee].known_exit = msg.payload
        kind = (
            EventKind.WIRELESS_DELIVERED
            if msg.channel is Channel.WIRELESS
            else EventKind.F2F_DELIVERED
        )
        self._record_event(Event(self._t, kind, agent=addressee, message=msg))

    def _pick_bike(self, role: Role) -> None:
        if self._bike.carrier is not None:
            raise EngineError(f"bike already carried by {self._bike.carrier.value}")
        agent = self._agents[role]
        if not is_close(agent.x, self._bike.x):
            raise EngineError(
                f"{role.value} at {agent.x} cannot pick bike at {self._bike.x}"
            )
        self._bike.carrier = role
        self._bike.x = agent.x
        self._record_event(Event(self._t, EventKind.BIKE_PICKED, agent=role, x=agent.x))

    def _drop_bike(self, role: Role) -> None:
        if self._bike.carrier is not role:
            raise EngineError(f"{role.value} does not carry the bike")
        agent = self._agents[role]
        # Dropping caps the rider back to walking speed immediately.
        self._bike.carrier = None
        self._bike.x = agent.x
        if abs(agent.velocity) > 1.0 * (1 + 1e-9) + ABS_TOL:
            agent.velocity = 0.0
        self._record_event(Event(self._t, EventKind.BIKE_DROPPED, agent=role, x=agent.x))

    def _arrive(self, role: Role) -> None:
        agent = self._agents[role]
        if not is_close(agent.x, self._exit_x):
            raise EngineError(
                f"{role.value} declared arrival at {agent.x}, exit at {self._exit_x}"
            )
        agent.arrived = True
        agent.velocity = 0.0
        agent.until = Forever()
        self._arrivals[role] = self._t

    # -- event computation ---------------------------------------------

    def _motion_candidates(self) -> list[Event]:
        out: list[Event] = []
        for role in Role:
            agent = self._agents[role]
            if agent.arrived:
                continue
            w = agent.velocity
            if is_close(agent.x, self._exit_x):
                # At the exit (within colocation tolerance), e.g. landed
                # there during another robot's event.
                if not agent.exit_notified:
                    out.append(
                        Event(self._t, EventKind.EXIT_REACHED, agent=role,
                              x=self._exit_x)
                    )
            elif w != 0.0:
                dt = (self._exit_x - agent.x) / w
                if dt >= 0.0:
                    out.append(
                        Event(self._t + dt, EventKind.EXIT_REACHED, agent=role,
                              x=self._exit_x)
                    )
            until = agent.until
            if isinstance(until, ReachCoordinate):
                if is_close(agent.x, until.x):
                    out.append(
                        Event(self._t, EventKind.WAYPOINT_REACHED,
                              agent=role, x=until.x)
                    )
                elif w != 0.0:
                    dt = (until.x - agent.x) / w
                    if dt >= 0.0:
                        out.append(
                            Event(self._t + dt, EventKind.WAYPOINT_REACHED,
                                  agent=role, x=until.x)
                        )
            elif isinstance(until, MeetAgent):
                other = self._agents[until.other]
                dt = next_meet_time(agent.x, w, other.x, other.velocity)
                if dt is not None:
                    out.append(
                        Event(self._t + dt, EventKind.COLOCATED, agent=role,
                              other=until.other, x=agent.x + w * dt)
                    )
        return out

    def _advance(self, t_next: float, snaps: dict[Role, float]) -> None:
        dt = t_next - self._t
        if dt > 0.0:
            for role in Role:
                agent = self._agents[role]
                x_new = snaps.get(role, agent.x + agent.velocity * dt)
                self._segments[role.value].append(
                    TrajectorySegment(self._t, t_next, agent.x, x_new,
                                      self._mode(role).value)
                )
                agent.x = x_new
                if x_new != self._exit_x:
                    agent.exit_notified = False
            carrier = self._bike.carrier
            if carrier is None:
                self._segments["bike"].append(
                    TrajectorySegment(self._t, t_next, self._bike.x,
                                      self._bike.x, "parked")
                )
            else:
                seg = self._segments[carrier.value][-1]
                self._segments["bike"].append(
                    TrajectorySegment(seg.t0, seg.t1, seg.x0, seg.x1,
                                      carrier.value)
                )
                self._bike.x = self._agents[carrier].x
            self._t = t_next
        else:
            for role, x in snaps.items():
                agent = self._agents[role]
                agent.x = x
                if x != self._exit_x:
                    agent.exit_notified = False
                if self._bike.carrier is role:
                    self._bike.x = x

    def _record_event(self, event: Event) -> None:
        if event.message is not None:
            detail = (
                f"{event.message.channel.value}:"
                f"{event.message.sender_role.value}->{event.agent.value}"
            )
        elif event.other is not None:
            detail = f"{event.agent.value}+{event.other.value}"
        elif event.x is not None:
            detail = f"{event.agent.value}@{event.x:.17g}"
        else:
            detail = event.agent.value if event.agent else ""
        self._events.append(EventRecord(event.time, event.kind.name.lower(), detail))

    def _dispatch(self, event: Event) -> None:
        self._record_event(event)
        if event.kind in (EventKind.WIRELESS_DELIVERED, EventKind.F2F_DELIVERED):
            self._agents[event.agent].known_exit = event.message.payload
        self.strategy.on_event(self._ctx, event)

    # -- main loop -----------------------------------------------------

    def run(self) -> EvacuationResult:
        self.strategy.start(self._ctx)
        for _ in range(_MAX_EVENTS):
            if all(a.arrived for a in self._agents.values()):
                break
            candidates = self._cascade + self._motion_candidates()
            if not candidates:
                raise NoProgress("no pending event and robots not evacuated")
            event = min(candidates, key=_event_key)
            for i, queued in enumerate(self._cascade):
                if queued is event:
                    del self._cascade[i]
                    break

            snaps: dict[Role, float] = {}
            if event.kind in (EventKind.EXIT_REACHED, EventKind.WAYPOINT_REACHED):
                snaps[event.agent] = event.x
            elif event.kind is EventKind.COLOCATED:
                snaps[event.agent] = event.x
                snaps[event.other] = event.x
            self._advance(event.time, snaps)

            # A satisfied stop condition halts the robot before the
            # strategy reacts; handlers then issue the next command.
            if event.kind is EventKind.WAYPOINT_REACHED:
                agent = self._agents[event.agent]
                agent.velocity = 0.0
                agent.until = Forever()
            elif event.kind is EventKind.COLOCATED:
                agent = self._agents[event.agent]
                agent.velocity = 0.0
                agent.until = Forever()
            elif event.kind is EventKind.EXIT_REACHED:
                agent = self._agents[event.agent]
                agent.exit_notified = True
                if isinstance(agent.until, ReachCoordinate) and is_close(
                    agent.until.x, self._exit_x
                ):
                    agent.velocity = 0.0
                    agent.until = Forever()
            self._dispatch(event)
        else:
            raise NoProgress(f"no termination within {_MAX_EVENTS} events")

        arrival = dict(self._arrivals)
        return EvacuationResult(
            arrival=arrival,
            evacuation_time=max(arrival.values()),
            trajectories={
                role: Trajectory(tuple(self._segments[role.value])) for role in Role
            },
            bike_trajectory=Trajectory(tuple(self._segments["bike"])),
            messages=tuple(self._messages),
            events=tuple(self._events),
        )


def run(scenario: Scenario, strategy: Strategy) -> EvacuationResult:
    """Simulate one scenario under the given strategy.

    Deterministic: identical inputs produce identical traces.
    """
    return Simulation(scenario, strategy).run()
