import math

import pytest

from bikevac import analysis
from bikevac.model import (
    AlgorithmId,
    Channel,
    ExitSide,
    InfeasibleSpeed,
    Role,
    Scenario,
    check_result,
)
from bikevac.strategies import StrategyParams, make_strategy, simulate


def rel_err(a, b):
    return abs(a - b) / abs(b)


def channels(result):
    return [m.channel for m in result.messages]


class TestAlg1:
    def test_left_side_arrival_times(self):
        u1 = analysis.opt_u1(2.0).speed
        result = simulate(Scenario(2.0, 1.0, ExitSide.LEFT, AlgorithmId.ALG1))
        assert rel_err(result.arrival[Role.SENDER], 1.0 / u1) < 1e-9
        expected = analysis.evac_time_case1(u1, 2.0, 2.0, 1.0)
        assert rel_err(result.arrival[Role.RECEIVER], expected) < 1e-9

    def test_boundary_speed_v3_gives_seven_thirds(self):
        result = simulate(
            Scenario(3.0, 1.0, ExitSide.LEFT, AlgorithmId.ALG1),
            StrategyParams(u1=1.0),
        )
        assert rel_err(result.evacuation_time, 7.0 / 3.0) < 1e-9

    def test_right_side_catch_up_and_rideshare(self):
        u1 = analysis.opt_u1(2.0).speed
        result = simulate(Scenario(2.0, 1.0, ExitSide.RIGHT, AlgorithmId.ALG1))
        expected = analysis.evac_time_case2(u1, 2.0, 2.0, 1.0)
        assert rel_err(result.evacuation_time, expected) < 1e-9

    def test_message_channels_per_case(self):
        left = simulate(Scenario(2.0, 1.0, ExitSide.LEFT, AlgorithmId.ALG1))
        assert channels(left) == [Channel.WIRELESS]
        assert left.messages[0].sender_role is Role.SENDER
        right = simulate(Scenario(2.0, 1.0, ExitSide.RIGHT, AlgorithmId.ALG1))
        assert channels(right) == [Channel.F2F]
        assert right.messages[0].sender_role is Role.RECEIVER

    @pytest.mark.parametrize("u1", [0.3, 0.7, 1.0])
    @pytest.mark.parametrize("u2", [1.0, 1.7, 2.0])
    def test_non_optimal_speeds_still_match_formulas(self, u1, u2):
        params = StrategyParams(u1=u1, u2=u2)
        v, d = 2.0, 1.0
        left = simulate(Scenario(v, d, ExitSide.LEFT, AlgorithmId.ALG1), params)
        assert rel_err(left.evacuation_time,
                       analysis.evac_time_case1(u1, u2, v, d)) < 1e-9
        right = simulate(Scenario(v, d, ExitSide.RIGHT, AlgorithmId.ALG1), params)
        assert rel_err(right.evacuation_time,
                       analysis.evac_time_case2(u1, u2, v, d)) < 1e-9

    def test_default_speeds_need_v_at_most_3(self):
        with pytest.raises(InfeasibleSpeed):
            make_strategy(Scenario(5.0, 1.0, ExitSide.LEFT, AlgorithmId.ALG1))
        # explicit speeds keep it runnable at any v > 1
        result = simulate(
            Scenario(5.0, 1.0, ExitSide.LEFT, AlgorithmId.ALG1),
            StrategyParams(u1=1.0, u2=5.0),
        )
        assert result.evacuation_time > 0


class TestAlg2:
    def test_example_v5(self):
        result = simulate(Scenario(5.0, 1.0, ExitSide.LEFT, AlgorithmId.ALG2))
        u2 = analysis.opt_u2(5.0).speed
        expected = (1.0 + 5.0 + u2) / 5.0
        assert rel_err(result.evacuation_time, expected) < 1e-9
        assert rel_err(result.evacuation_time, 1.7403124237432848) < 1e-9

    def test_boundary_v3_continuity_with_alg1(self):
        for side in ExitSide:
            result = simulate(Scenario(3.0, 1.0, side, AlgorithmId.ALG2))
            assert rel_err(result.evacuation_time, 7.0 / 3.0) < 1e-9

    def test_sides_agree_at_optimal_speed(self):
        left = simulate(Scenario(5.0, 1.0, ExitSide.LEFT, AlgorithmId.ALG2))
        right = simulate(Scenario(5.0, 1.0, ExitSide.RIGHT, AlgorithmId.ALG2))
        assert rel_err(left.evacuation_time, right.evacuation_time) < 1e-9

    def test_requested_overspeed_rejected(self):
        with pytest.raises(InfeasibleSpeed):
            simulate(
                Scenario(5.0, 1.0, ExitSide.LEFT, AlgorithmId.ALG2),
                StrategyParams(u2=6.0),
            )

    def test_default_infeasible_below_v3(self):
        with pytest.raises(InfeasibleSpeed):
            make_strategy(Scenario(2.0, 1.0, ExitSide.LEFT, AlgorithmId.ALG2))


class TestAlg3:
    def test_hand_trace_v20_d2(self):
        result = simulate(Scenario(20.0, 2.0, ExitSide.RIGHT, AlgorithmId.ALG3))
        for role in Role:
            assert rel_err(result.arrival[role], 1.0975) < 1e-9

    def test_bike_parked_at_drop_coordinate(self):
        result = simulate(Scenario(20.0, 2.0, ExitSide.RIGHT, AlgorithmId.ALG3))
        drops = [e for e in result.events if e.kind == "bike_dropped"]
        assert len(drops) == 1
        # drop point = exit minus the drop-back distance: 2 - 0.95 = 1.05
        assert drops[0].detail == f"sender@{1.05:.17g}"

    def test_left_exit_found_on_second_iteration(self):
        result = simulate(Scenario(10.0, 1.0, ExitSide.LEFT, AlgorithmId.ALG3))
        first = next(e for e in result.events if e.kind == "exit_reached")
        # iteration 1 sweeps right (miss), iteration 2 sweeps left:
        # discovery at 2*2/10 + 1/10 = 0.5
        assert first.detail.startswith("sender")
        assert rel_err(first.time, 0.5) < 1e-9

    @pytest.mark.parametrize("v", [4.0, 11.0, 20.0])
    @pytest.mark.parametrize("d", [1.0, 3.7, 16.0])
    @pytest.mark.parametrize("side", list(ExitSide))
    def test_simultaneous_arrival(self, v, d, side):
        result = simulate(Scenario(v, d, side, AlgorithmId.ALG3))
        a, b = sorted(result.arrival.values())
        assert (b - a) <= 1e-9 * b

    def test_sender_always_discovers_first(self):
        for v in (2.0, 11.0, 40.0):
            for d in (1.0, 2.5, 9.0):
                for side in ExitSide:
                    result = simulate(Scenario(v, d, side, AlgorithmId.ALG3))
                    first = next(
                        e for e in result.events if e.kind == "exit_reached"
                    )
                    assert first.detail.startswith("sender")

    def test_robots_synchronized_at_origin_between_iterations(self):
        v, d = 20.0, 100.0  # discovery in iteration 7 (right side)
        result = simulate(Scenario(v, d, ExitSide.RIGHT, AlgorithmId.ALG3))
        for k in range(1, 7):
            t_k = (2.0 ** (k + 1) - 4.0) / v  # start of iteration k
            for role in Role:
                assert abs(result.trajectories[role].position_at(t_k)) < 1e-9

    def test_exactly_one_wireless_message(self):
        result = simulate(Scenario(11.0, 5.0, ExitSide.LEFT, AlgorithmId.ALG3))
        assert channels(result) == [Channel.WIRELESS]

    def test_rejects_speed_params(self):
        with pytest.raises(ValueError):
            make_strategy(
                Scenario(11.0, 5.0, ExitSide.LEFT, AlgorithmId.ALG3),
                StrategyParams(u1=0.5),
            )


class TestOfflineBaseline:
    @pytest.mark.parametrize(
        "v,d,expected",
        [(2.0, 1.0, 0.75), (3.0, 2.0, 4.0 / 3.0), (1000.0, 1.0, 1001.0 / 2000.0)],
    )
    def test_matches_rideshare_formula(self, v, d, expected):
        for side in ExitSide:
            result = simulate(Scenario(v, d, side, AlgorithmId.OFFLINE_BASELINE))
            assert rel_err(result.evacuation_time, expected) < 1e-9

    def test_simultaneous_arrival_and_no_messages(self):
        result = simulate(Scenario(2.0, 1.0, ExitSide.LEFT, AlgorithmId.OFFLINE_BASELINE))
        a, b = sorted(result.arrival.values())
        assert (b - a) <= 1e-9 * b
        assert result.messages == ()

    def test_invariants_hold(self):
        scenario = Scenario(7.0, 3.0, ExitSide.RIGHT, AlgorithmId.OFFLINE_BASELINE)
        check_result(scenario, simulate(scenario))


def test_strategy_params_validation():
    scenario = Scenario(2.0, 1.0, ExitSide.LEFT, AlgorithmId.ALG1)
    with pytest.raises(InfeasibleSpeed):
        make_strategy(scenario, StrategyParams(u1=1.5))
    with pytest.raises(InfeasibleSpeed):
        make_strategy(scenario, StrategyParams(u1=0.0))
    with pytest.raises(InfeasibleSpeed):
        make_strategy(scenario, StrategyParams(u2=0.5))
