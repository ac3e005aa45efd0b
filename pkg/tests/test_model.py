import dataclasses

import pytest

from bikevac.model import (
    AlgorithmId,
    Alg3DistanceTooSmall,
    Channel,
    EvacuationResult,
    ExitSide,
    InvariantViolation,
    Message,
    NonPositiveDistance,
    Role,
    Scenario,
    SpeedOutOfRange,
    Trajectory,
    TrajectorySegment,
    check_result,
    validate_scenario,
)
from bikevac.strategies import simulate


def test_validate_scenario_accepts_legal_instance():
    validate_scenario(Scenario(2.0, 1.0, ExitSide.RIGHT, AlgorithmId.ALG1))


def test_validate_scenario_rejects_unit_bike_speed():
    with pytest.raises(SpeedOutOfRange):
        validate_scenario(Scenario(1.0, 1.0, ExitSide.RIGHT, AlgorithmId.ALG1))


def test_validate_scenario_rejects_nonpositive_distance():
    with pytest.raises(NonPositiveDistance):
        validate_scenario(Scenario(2.0, 0.0, ExitSide.RIGHT, AlgorithmId.ALG1))
    with pytest.raises(NonPositiveDistance):
        validate_scenario(Scenario(2.0, -1.0, ExitSide.LEFT, AlgorithmId.ALG2))


def test_validate_scenario_rejects_small_d_for_doubling_only():
    with pytest.raises(Alg3DistanceTooSmall):
        validate_scenario(Scenario(20.0, 0.5, ExitSide.LEFT, AlgorithmId.ALG3))
    # the opposite-direction strategies accept any positive d
    validate_scenario(Scenario(20.0, 0.5, ExitSide.LEFT, AlgorithmId.ALG1))


def test_exit_position_signs():
    assert Scenario(2.0, 1.5, ExitSide.LEFT, AlgorithmId.ALG1).exit_position == -1.5
    assert Scenario(2.0, 1.5, ExitSide.RIGHT, AlgorithmId.ALG1).exit_position == 1.5


def test_scenario_is_immutable():
    s = Scenario(2.0, 1.0, ExitSide.RIGHT, AlgorithmId.ALG1)
    with pytest.raises(dataclasses.FrozenInstanceError):
        s.v = 3.0


def test_trajectory_interpolation():
    traj = Trajectory(
        (
            TrajectorySegment(0.0, 1.0, 0.0, 2.0, "biking"),
            TrajectorySegment(1.0, 3.0, 2.0, 0.0, "walking"),
        )
    )
    assert traj.position_at(0.5) == 1.0
    assert traj.position_at(1.0) == 2.0
    assert traj.position_at(2.0) == 1.0
    assert traj.position_at(3.0) == 0.0
    assert traj.final_position == 0.0
    with pytest.raises(ValueError):
        traj.position_at(5.0)


def _segments(*quads, mode):
    return Trajectory(tuple(TrajectorySegment(*q, mode) for q in quads))


def _result(sender, receiver, bike, arrival, messages=()):
    return EvacuationResult(
        arrival=arrival,
        evacuation_time=max(arrival.values()),
        trajectories={Role.SENDER: sender, Role.RECEIVER: receiver},
        bike_trajectory=bike,
        messages=messages,
    )


def test_checker_accepts_simulated_results():
    for side in ExitSide:
        scenario = Scenario(2.0, 1.0, side, AlgorithmId.ALG1)
        check_result(scenario, simulate(scenario))


def test_checker_rejects_two_simultaneous_bikers():
    scenario = Scenario(2.0, 1.0, ExitSide.RIGHT, AlgorithmId.ALG1)
    result = _result(
        sender=_segments((0.0, 1.0, 0.0, 1.0), mode="biking"),
        receiver=_segments((0.0, 1.0, 0.0, 1.0), mode="biking"),
        bike=_segments((0.0, 1.0, 0.0, 1.0), mode="sender"),
        arrival={Role.SENDER: 1.0, Role.RECEIVER: 1.0},
    )
    with pytest.raises(InvariantViolation, match="ride the bike"):
        check_result(scenario, result)


def test_checker_rejects_overspeed_walking():
    scenario = Scenario(2.0, 1.0, ExitSide.RIGHT, AlgorithmId.ALG1)
    result = _result(
        sender=_segments((0.0, 0.5, 0.0, 1.0), mode="walking"),
        receiver=_segments((0.0, 0.5, 0.0, 1.0), mode="biking"),
        bike=_segments((0.0, 0.5, 0.0, 1.0), mode="receiver"),
        arrival={Role.SENDER: 0.5, Role.RECEIVER: 0.5},
    )
    with pytest.raises(InvariantViolation, match="exceeds cap"):
        check_result(scenario, result)


def test_checker_rejects_spatial_jump():
    scenario = Scenario(2.0, 1.0, ExitSide.RIGHT, AlgorithmId.ALG1)
    sender = Trajectory(
        (
            TrajectorySegment(0.0, 0.5, 0.0, 0.3, "walking"),
            TrajectorySegment(0.5, 1.2, 0.8, 1.0, "walking"),
        )
    )
    result = _result(
        sender=sender,
        receiver=_segments((0.0, 1.2, 0.0, 1.0), mode="biking"),
        bike=_segments((0.0, 1.2, 0.0, 1.0), mode="receiver"),
        arrival={Role.SENDER: 1.2, Role.RECEIVER: 1.2},
    )
    with pytest.raises(InvariantViolation, match="spatial jump"):
        check_result(scenario, result)


def test_checker_rejects_parked_bike_that_moves():
    scenario = Scenario(2.0, 1.0, ExitSide.RIGHT, AlgorithmId.ALG1)
    result = _result(
        sender=_segments((0.0, 1.0, 0.0, 1.0), mode="walking"),
        receiver=_segments((0.0, 1.0, 0.0, 1.0), mode="walking"),
        bike=_segments((0.0, 1.0, 0.0, 0.4), mode="parked"),
        arrival={Role.SENDER: 1.0, Role.RECEIVER: 1.0},
    )
    with pytest.raises(InvariantViolation, match="parked"):
        check_result(scenario, result)


def test_checker_rejects_wireless_from_receiver():
    scenario = Scenario(2.0, 1.0, ExitSide.RIGHT, AlgorithmId.ALG1)
    result = _result(
        sender=_segments((0.0, 1.0, 0.0, 1.0), mode="walking"),
        receiver=_segments((0.0, 1.0, 0.0, 1.0), mode="biking"),
        bike=_segments((0.0, 1.0, 0.0, 1.0), mode="receiver"),
        arrival={Role.SENDER: 1.0, Role.RECEIVER: 1.0},
        messages=(Message(Role.RECEIVER, Channel.WIRELESS, 1.0, 0.5),),
    )
    with pytest.raises(InvariantViolation, match="wireless"):
        check_result(scenario, result)


def test_checker_rejects_f2f_between_distant_robots():
    scenario = Scenario(2.0, 1.0, ExitSide.RIGHT, AlgorithmId.ALG1)
    result = _result(
        sender=_segments((0.0, 1.0, 0.0, 1.0), mode="walking"),
        receiver=_segments((0.0, 0.5, 0.0, 1.0), (0.5, 1.0, 1.0, 1.0), mode="biking"),
        bike=_segments((0.0, 0.5, 0.0, 1.0), (0.5, 1.0, 1.0, 1.0), mode="receiver"),
        arrival={Role.SENDER: 1.0, Role.RECEIVER: 0.5},
        messages=(Message(Role.RECEIVER, Channel.F2F, 1.0, 0.5),),
    )
    with pytest.raises(InvariantViolation, match="apart"):
        check_result(scenario, result)


def test_checker_rejects_wrong_evacuation_time():
    scenario = Scenario(2.0, 1.0, ExitSide.RIGHT, AlgorithmId.ALG1)
    result = EvacuationResult(
        arrival={Role.SENDER: 1.0, Role.RECEIVER: 1.0},
        evacuation_time=0.5,
        trajectories={
            Role.SENDER: _segments((0.0, 1.0, 0.0, 1.0), mode="walking"),
            Role.RECEIVER: _segments((0.0, 1.0, 0.0, 1.0), mode="biking"),
        },
        bike_trajectory=_segments((0.0, 1.0, 0.0, 1.0), mode="receiver"),
    )
    with pytest.raises(InvariantViolation, match="max arrival"):
        check_result(scenario, result)


def test_checker_rejects_final_position_away_from_exit():
    scenario = Scenario(2.0, 1.0, ExitSide.LEFT, AlgorithmId.ALG1)
    result = _result(
        sender=_segments((0.0, 1.0, 0.0, -1.0), mode="walking"),
        receiver=_segments((0.0, 1.0, 0.0, 0.9), mode="walking"),
        bike=_segments((0.0, 1.0, 0.0, 0.0), mode="parked"),
        arrival={Role.SENDER: 1.0, Role.RECEIVER: 1.0},
    )
    with pytest.raises(InvariantViolation, match="exit"):
        check_result(scenario, result)
