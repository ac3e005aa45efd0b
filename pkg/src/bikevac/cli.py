"""Command-line front end.

Subcommands:

* ``simulate``   one run, key=value summary, optional structured trace
* ``sweep``      performance-curve CSV over a speed range
* ``verify``     oracle/invariant suite with PASS/FAIL lines
* ``worst-case`` adversarial exit search for one algorithm and speed

Exit codes: 0 success, 1 runtime or verification failure, 2 usage or
validation error.  Scalar stdout values use 9 significant digits; CSV
and trace files use 17 (lossless for doubles).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Sequence

from . import analysis, harness
from .engine import EngineError
from .model import (
    AlgorithmId,
    EvacuationError,
    EvacuationResult,
    ExitSide,
    Role,
    Scenario,
)
from .strategies import StrategyParams, simulate

TRACE_SCHEMA_VERSION = 1

CSV_HEADER = "v,cr_alg1,cr_alg2,cr_alg3_ub,lower_bound,selected"

_ALGORITHM_FLAGS = {
    "1": AlgorithmId.ALG1,
    "2": AlgorithmId.ALG2,
    "3": AlgorithmId.ALG3,
    "baseline": AlgorithmId.OFFLINE_BASELINE,
}


def _fmt9(x: float) -> str:
    return format(x, ".9g")


def _fmt17(x: float) -> str:
    return format(x, ".17g")


# --- trace files ------------------------------------------------------

def trace_document(scenario: Scenario, result: EvacuationResult) -> dict:
    """Structured, JSON-compatible view of one run."""

    def segments(traj):
        return [
            {"t0": s.t0, "t1": s.t1, "x0": s.x0, "x1": s.x1, "mode": s.mode}
            for s in traj.segments
        ]

    return {
        "schema_version": TRACE_SCHEMA_VERSION,
        "scenario": {
            "v": scenario.v,
            "d": scenario.d,
            "side": scenario.side.value,
            "algorithm": scenario.algorithm.value,
        },
        "agents": [
            {"role": role.value, "segments": segments(result.trajectories[role])}
            for role in Role
        ],
        "bike": {"segments": segments(result.bike_trajectory)},
        "messages": [
            {
                "sender_role": m.sender_role.value,
                "channel": m.channel.value,
                "payload": m.payload,
                "timestamp": m.timestamp,
            }
            for m in result.messages
        ],
        "arrivals": {role.value: result.arrival[role] for role in Role},
    }


def _emit_json(value, indent: int) -> str:
    """JSON text with floats at 17 significant digits (round-trip safe)."""
    pad = " " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = ",\n".join(
            f'{pad}  {json.dumps(k)}: {_emit_json(v, indent + 2)}'
            for k, v in value.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(value, list):
        if not value:
            return "[]"
        items = ",\n".join(f"{pad}  {_emit_json(v, indent + 2)}" for v in value)
        return "[\n" + items + "\n" + pad + "]"
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, float):
        return _fmt17(value)
    return json.dumps(value)


def serialize_trace(doc: dict) -> str:
    return _emit_json(doc, 0) + "\n"


def parse_trace(text: str) -> dict:
    return json.loads(text)


# --- subcommands ------------------------------------------------------

def _cmd_simulate(args: argparse.Namespace) -> int:
    scenario = Scenario(
        v=args.v,
        d=args.d,
        side=ExitSide(args.side),
        algorithm=_ALGORITHM_FLAGS[args.algorithm],
    )
    params = None
    if args.u1 is not None or args.u2 is not None:
        params = StrategyParams(u1=args.u1, u2=args.u2)
    result = simulate(scenario, params)
    cr = result.evacuation_time / analysis.bike_share_time(scenario.d, scenario.v)
    print(f"evacuation_time={_fmt9(result.evacuation_time)}")
    print(f"arrival_sender={_fmt9(result.arrival[Role.SENDER])}")
    print(f"arrival_receiver={_fmt9(result.arrival[Role.RECEIVER])}")
    print(f"cr={_fmt9(cr)}")
    if args.trace:
        text = serialize_trace(trace_document(scenario, result))
        with open(args.trace, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return 0


def sweep_csv(rows: Sequence[analysis.CrCurvePoint]) -> str:
    lines = [CSV_HEADER]
    for row in rows:
        cr2 = "" if row.cr_alg2 is None else _fmt17(row.cr_alg2)
        lines.append(
            f"{_fmt17(row.v)},{_fmt17(row.cr_alg1)},{cr2},"
            f"{_fmt17(row.cr_alg3_ub)},{_fmt17(row.lower_bound)},"
            f"{row.selected.value}"
        )
    return "\n".join(lines) + "\n"


def _cmd_sweep(args: argparse.Namespace) -> int:
    d_grid = (1.0,)
    if args.d_grid:
        d_grid = tuple(float(part) for part in args.d_grid.split(","))
    spec = harness.SweepSpec(
        v_min=args.v_min,
        v_max=args.v_max,
        steps=args.steps,
        d_grid=d_grid,
        scale=harness.SweepScale.LOG if args.log else harness.SweepScale.LINEAR,
    )
    text = sweep_csv(harness.sweep(spec))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _verify_checks(full: bool):
    """Yield (name, callable) pairs; each callable returns a detail string."""

    def lemma1() -> str:
        grid = 100001 if full else 10001
        worst = 0.0
        for d, v in ((1.0, 2.0), (2.0, 3.0), (7.3, 5.0)):
            x, t = harness.lemma1_bruteforce(d, v, grid)
            expected = analysis.bike_share_time(d, v)
            if abs(t - expected) > 1e-7 * expected:
                raise harness.ValidationFailure(
                    f"brute force {t} vs closed form {expected} at d={d} v={v}"
                )
            if abs(x - analysis.handoff_point(d)) > 2.0 * d / (grid - 1):
                raise harness.ValidationFailure(
                    f"brute-force hand-off {x} far from {d / 2} at d={d} v={v}"
                )
            worst = max(worst, abs(t - expected) / expected)
        return f"max rel dev {worst:.3g}"

    def alg1() -> str:
        vs = (1.1, 1.2, 1.5, 2.0, 2.5, 3.0) if full else (1.5, 2.0, 2.9)
        ds = (0.5, 1.0, 7.3) if full else (1.0,)
        report = harness.cross_validate(AlgorithmId.ALG1, vs, ds)
        return f"{report.runs} runs, max rel dev {report.max_rel_deviation:.3g}"

    def alg2() -> str:
        vs = (3.0, 4.0, 5.0, 7.0, 10.0) if full else (4.0, 7.0, 10.0)
        ds = (0.5, 1.0, 7.3) if full else (1.0, 3.0)
        report = harness.cross_validate(AlgorithmId.ALG2, vs, ds)
        return f"{report.runs} runs, max rel dev {report.max_rel_deviation:.3g}"

    def alg3() -> str:
        vs = (10.5, 12.0, 20.0, 50.0) if full else (12.0, 20.0)
        n = 200 if full else 40
        ds = [2 ** (i * 8 / (n - 1)) for i in range(n)]
        details = []
        for v in vs:
            report = harness.worst_case_cr(AlgorithmId.ALG3, v, ds)
            if report.gap < -1e-9:
                raise harness.ValidationFailure(
                    f"alg3 worst ratio {report.sim_cr} exceeds bound "
                    f"{report.formula_cr} at v={v}"
                )
            harness.cross_validate(AlgorithmId.ALG3, [v], ds[:: max(1, n // 20)])
            details.append(f"v={v:g}: max cr {report.sim_cr:.6g} <= {report.formula_cr:.6g}")
        return "; ".join(details) if full else f"{len(vs)} speeds ok"

    def baseline() -> str:
        report = harness.cross_validate(
            AlgorithmId.OFFLINE_BASELINE, (2.0, 5.0), (1.0, 3.0)
        )
        return f"{report.runs} runs, max rel dev {report.max_rel_deviation:.3g}"

    def continuity() -> str:
        checks = (
            (analysis.cr_alg1(3.0), 3.5),
            (analysis.cr_alg2(3.0), 3.5),
            (analysis.opt_u1(3.0).speed, 1.0),
            (analysis.opt_u2(3.0).speed, 3.0),
            (analysis.lower_bound_slow_bike(3.0), 1.5),
            (analysis.lower_bound_fast_bike(3.0), 1.5),
        )
        worst = 0.0
        for got, want in checks:
            dev = abs(got - want) / want
            worst = max(worst, dev)
            if dev > 1e-9:
                raise harness.ValidationFailure(f"continuity at v=3: {got} vs {want}")
        return f"max rel dev {worst:.3g}"

    def ordering() -> str:
        n = 1000 if full else 200
        for i in range(n):
            v = 1.01 + i * (100.0 - 1.01) / (n - 1)
            ratios = [analysis.cr_alg1(v), analysis.cr_alg3_ub(v)]
            u2 = analysis.opt_u2(v)
            if u2.feasible:
                ratios.append(analysis.cr_alg2(v))
            if analysis.lower_bound(v) > min(ratios) + 1e-9:
                raise harness.ValidationFailure(
                    f"lower bound above best ratio at v={v}"
                )
        return f"{n} speeds ok"

    def monotone() -> str:
        n = 200
        prev = None
        for i in range(n):
            v = 10.0 + i * 90.0 / (n - 1)
            cur = analysis.cr_alg3_ub(v)
            if prev is not None and cur >= prev:
                raise harness.ValidationFailure(
                    f"alg3 bound not decreasing at v={v}"
                )
            prev = cur
        return "strictly decreasing on [10, 100]"

    yield "lemma1-bruteforce-vs-closed-form", lemma1
    yield "alg1-sim-vs-formula", alg1
    yield "alg2-sim-vs-formula", alg2
    yield "alg3-bound-and-sync", alg3
    yield "baseline-rideshare", baseline
    yield "continuity-at-v3", continuity
    yield "lower-bound-ordering", ordering
    yield "alg3-bound-monotone", monotone


def _cmd_verify(args: argparse.Namespace) -> int:
    ok = True
    for name, check in _verify_checks(args.full):
        try:
            detail = check()
        except (EvacuationError, ValueError) as exc:
            ok = False
            print(f"FAIL {name}: {exc}")
            scenario = getattr(exc, "scenario", None)
            if scenario is not None:
                print(f"     counterexample: {scenario}")
        else:
            print(f"PASS {name} ({detail})")
    return 0 if ok else 1


def _cmd_worst_case(args: argparse.Namespace) -> int:
    if args.d_min <= 0 or args.d_max < args.d_min or args.points < 1:
        raise ValueError("need 0 < d-min <= d-max and points >= 1")
    if args.points == 1:
        ds = [args.d_min]
    else:
        lo, hi = math.log(args.d_min), math.log(args.d_max)
        ds = [
            math.exp(lo + i * (hi - lo) / (args.points - 1))
            for i in range(args.points)
        ]
    report = harness.worst_case_cr(_ALGORITHM_FLAGS[args.algorithm], args.v, ds)
    print(f"algorithm={report.algorithm.value}")
    print(f"v={_fmt9(report.v)}")
    print(f"worst_d={_fmt9(report.worst_d)}")
    print(f"worst_side={report.worst_side.value}")
    print(f"sim_cr={_fmt9(report.sim_cr)}")
    print(f"formula_cr={_fmt9(report.formula_cr)}")
    print(f"gap={_fmt9(report.gap)}")
    return 0


# --- argument parsing -------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bikevac",
        description="Bike-assisted two-robot line evacuation: simulate, "
        "sweep, verify.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one scenario")
    sim.add_argument("--algorithm", required=True, choices=sorted(_ALGORITHM_FLAGS))
    sim.add_argument("--v", type=float, required=True, help="bike speed (> 1)")
    sim.add_argument("--d", type=float, required=True, help="exit distance")
    sim.add_argument("--side", required=True, choices=["left", "right"])
    sim.add_argument("--u1", type=float, help="override sender search speed")
    sim.add_argument("--u2", type=float, help="override receiver search speed")
    sim.add_argument("--trace", help="write a structured trace file here")
    sim.set_defaults(func=_cmd_simulate)

    sw = sub.add_parser("sweep", help="emit the performance-curve CSV")
    sw.add_argument("--v-min", type=float, required=True)
    sw.add_argument("--v-max", type=float, required=True)
    sw.add_argument("--steps", type=int, required=True)
    sw.add_argument("--log", action="store_true", help="log-spaced speeds")
    sw.add_argument("--out", help="write CSV here instead of stdout")
    sw.add_argument("--d-grid", help="comma-separated distances (>= 1)")
    sw.set_defaults(func=_cmd_sweep)

    ver = sub.add_parser("verify", help="run the oracle/invariant suite")
    group = ver.add_mutually_exclusive_group()
    group.add_argument("--quick", action="store_true", default=True)
    group.add_argument("--full", action="store_true")
    ver.set_defaults(func=_cmd_verify)

    wc = sub.add_parser("worst-case", help="adversarial exit search")
    wc.add_argument("--algorithm", required=True, choices=sorted(_ALGORITHM_FLAGS))
    wc.add_argument("--v", type=float, required=True)
    wc.add_argument("--d-min", type=float, default=1.0)
    wc.add_argument("--d-max", type=float, default=64.0)
    wc.add_argument("--points", type=int, default=60)
    wc.set_defaults(func=_cmd_worst_case)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except harness.ValidationFailure as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 1
    except EngineError as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return 1
    except (EvacuationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
