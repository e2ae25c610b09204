"""Command-line front end.

Subcommands cover the pipeline end to end: validate graph files, query
vote and Ising conditionals, dump transformed-game tensors, solve for
pure equilibria, draw forward samples, and sweep parameter grids to CSV.

Exit codes: 0 success, 2 unreadable or malformed input, 3 invariant
violation, 4 enumeration cap exceeded, 5 degenerate influence.  Failures
print one JSON line on stderr with the error class and message.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import (
    CyclicGraphError,
    DegenerateInfluenceError,
    EnumerationCapError,
    GameFormatError,
    GraphFormatError,
    MultiEdgeError,
)
from .game import (
    REGIME_BOUNDARY,
    REGIME_COOPERATION,
    REGIME_PD_V1,
    REGIME_PD_V2,
    TransformedGame,
    load_game,
    pure_nash,
    symmetric_transform,
    tipping_points,
    transform_game,
)
from .graph import deciders, executives, load_graph, validate_graph
from .ising import chain_xy, coupling_from_hierarchy, ising_conditional
from .vote import VoteParams, influence_oracle, sample_many

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INVARIANT = 3
EXIT_CAP = 4
EXIT_DEGENERATE = 5

SWEEP_PARAMS = ("a", "c", "beta", "D", "x", "y")


def _fmt(value: float) -> str:
    return "%.15g" % value


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit_json(payload: dict, out: str | None) -> None:
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", out)


def _spin(text: str) -> int:
    token = text.strip()
    if token in {"+1", "+", "1"}:
        return 1
    if token in {"-1", "-"}:
        return -1
    raise argparse.ArgumentTypeError(f"spin must be +1 or -1, got {text!r}")


def _condition_flag(text: str) -> tuple[str, int]:
    name, sep, value = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected name=spin, got {text!r}")
    return name, _spin(value)


def _vary_flag(text: str) -> tuple[str, float, float, int]:
    name, sep, value = text.partition("=")
    if not sep or name not in SWEEP_PARAMS:
        raise argparse.ArgumentTypeError(
            f"expected one of {','.join(SWEEP_PARAMS)} as name=lo:hi:steps, got {text!r}")
    parts = value.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected lo:hi:steps in {text!r}")
    try:
        lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    return name, lo, hi, steps


def _fix_flag(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep or name not in SWEEP_PARAMS:
        raise argparse.ArgumentTypeError(
            f"expected one of {','.join(SWEEP_PARAMS)} as name=value, got {text!r}")
    try:
        return name, float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _params_from_args(g, args) -> VoteParams:
    return VoteParams(g.free_float, g.noise_sigma, mode=args.mode)


def _condition_dict(pairs) -> dict[str, int]:
    condition: dict[str, int] = {}
    for name, spin in pairs or []:
        if name in condition and condition[name] != spin:
            raise ValueError(f"conflicting condition for vertex {name}")
        condition[name] = spin
    return condition


def cmd_validate(args) -> int:
    g = load_graph(args.graph, validate=False)
    report = validate_graph(g)
    _emit_json({
        "ok": report.ok,
        "violations": list(report.violations),
        "warnings": list(report.warnings),
    }, args.out)
    return EXIT_OK if report.ok else EXIT_INVARIANT


def cmd_influence(args) -> int:
    g = load_graph(args.graph)
    params = _params_from_args(g, args)
    condition = _condition_dict(args.condition)
    lam = sorted(deciders(g))
    if set(condition) != set(lam):
        missing = sorted(set(lam) - set(condition))
        extra = sorted(set(condition) - set(lam))
        raise ValueError(
            f"condition must assign every decider exactly; missing={missing} extra={extra}")
    oracle = influence_oracle(g, params, args.cap)
    table = {i: oracle(i, condition) for i in sorted(executives(g))}
    _emit_json({
        "condition": {k: condition[k] for k in lam},
        "mode": params.mode,
        "prob_plus": table,
    }, args.out)
    return EXIT_OK


def cmd_ising(args) -> int:
    g = load_graph(args.graph)
    model = coupling_from_hierarchy(g)
    condition = _condition_dict(args.condition)
    if not condition:
        raise ValueError("at least one --condition is required")
    value = ising_conditional(model, args.target, condition, args.cap)
    _emit_json({
        "target": args.target,
        "condition": condition,
        "beta": model.beta,
        "prob_plus": value,
    }, args.out)
    return EXIT_OK


def _tensor_payload(tg: TransformedGame) -> dict:
    return {
        "deciders": list(tg.deciders),
        "executives": list(tg.executives),
        "labels": {"+1": tg.labels[1], "-1": tg.labels[-1]},
        "strategies": [[tg.labels[s] for s in strat] for strat in tg.strategies],
        "payoffs": tg.payoffs.tolist(),
        "provenance": dict(tg.provenance),
    }


def _tensor_from_payload(data: dict) -> TransformedGame:
    try:
        labels = {1: str(data["labels"]["+1"]), -1: str(data["labels"]["-1"])}
        reverse = {v: k for k, v in labels.items()}
        strategies = tuple(tuple(reverse[m] for m in strat) for strat in data["strategies"])
        payoffs = np.asarray(data["payoffs"], dtype=float)
        tg = TransformedGame(
            tuple(data["deciders"]), tuple(data["executives"]),
            strategies, payoffs, labels, dict(data.get("provenance", {})))
    except (KeyError, TypeError, ValueError) as exc:
        raise GameFormatError(f"malformed tensor data: {exc}") from exc
    if payoffs.shape != (len(strategies),) * len(tg.deciders) + (len(tg.deciders),):
        raise GameFormatError("tensor shape does not match deciders and strategies")
    return tg


def _build_transform(args) -> TransformedGame:
    g = load_graph(args.graph)
    base = load_game(args.game)
    params = _params_from_args(g, args)
    return transform_game(base, g, params, mechanism=args.mechanism, cap=args.cap)


def cmd_transform(args) -> int:
    tg = _build_transform(args)
    _emit_json(_tensor_payload(tg), args.out)
    return EXIT_OK


def cmd_nash(args) -> int:
    if args.tensor is not None:
        try:
            with open(args.tensor, "r", encoding="utf-8") as fh:
                tg = _tensor_from_payload(json.load(fh))
        except OSError as exc:
            raise GameFormatError(f"cannot read tensor file {args.tensor}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise GameFormatError(f"tensor file is not valid JSON: {exc}") from exc
    elif args.graph is not None and args.game is not None:
        tg = _build_transform(args)
    else:
        raise ValueError("nash needs either --tensor or both --graph and --game")
    equilibria = []
    for idx in pure_nash(tg):
        equilibria.append({
            "profile": [list(cmds) for cmds in tg.profile_labels(idx)],
            "payoffs": [float(v) for v in tg.payoffs[idx]],
        })
    _emit_json({"deciders": list(tg.deciders), "equilibria": equilibria}, args.out)
    return EXIT_OK


def cmd_sample(args) -> int:
    g = load_graph(args.graph)
    params = _params_from_args(g, args)
    condition = _condition_dict(args.condition)
    lam = sorted(deciders(g))
    if set(condition) != set(lam):
        raise ValueError("condition must assign every decider exactly")
    draws = sample_many(g, condition, params, args.samples, args.seed)
    freq = {i: float(np.mean(draws[i] == 1)) for i in sorted(executives(g))}
    _emit_json({
        "samples": args.samples,
        "seed": args.seed,
        "condition": {k: condition[k] for k in lam},
        "mode": params.mode,
        "freq_plus": freq,
    }, args.out)
    return EXIT_OK


@dataclass(frozen=True)
class SweepSpec:
    """A grid over (a, c, beta, D) chain geometry or direct (x, y) points.

    Varied axes iterate in the order given, first axis outermost.  x and y
    ranges must stay inside (0, 1).
    """

    varied: tuple[tuple[str, float, float, int], ...]
    fixed: tuple[tuple[str, float], ...]
    out: str | None = None

    def __post_init__(self) -> None:
        if not self.varied:
            raise ValueError("sweep needs at least one --vary axis")
        seen = set()
        for name, lo, hi, steps in self.varied:
            if name in seen:
                raise ValueError(f"parameter {name} varied twice")
            seen.add(name)
            if steps < 2:
                raise ValueError(f"axis {name} needs at least 2 steps")
            if not lo < hi:
                raise ValueError(f"axis {name} needs lo < hi")
            if name in ("x", "y") and not (0.0 < lo and hi < 1.0):
                raise ValueError(f"axis {name} must stay inside (0, 1)")
        for name, value in self.fixed:
            if name in seen:
                raise ValueError(f"parameter {name} both varied and fixed")
            seen.add(name)
            if name in ("x", "y") and not 0.0 < value < 1.0:
                raise ValueError(f"fixed {name} must lie inside (0, 1)")
        direct = {"x", "y"} & seen
        chain = {"a", "c", "beta", "D"} & seen
        if direct and chain:
            raise ValueError("cannot mix direct x,y with chain parameters a,c,beta,D")
        if direct and direct != {"x", "y"}:
            raise ValueError("direct sweeps need both x and y (varied or fixed)")
        if not direct and not {"a", "c"} <= chain:
            raise ValueError("chain sweeps need a and c (varied or fixed)")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, *_ in self.varied)

    def grid(self):
        axes = [np.linspace(lo, hi, steps) for _, lo, hi, steps in self.varied]
        fixed = dict(self.fixed)
        for combo in product(*axes):
            point = dict(fixed)
            point.update(zip(self.names, (float(v) for v in combo)))
            yield point


def _profile_string(tg: TransformedGame, idx: tuple[int, ...]) -> str:
    # semicolons between deciders, pipes between equilibria: no commas, so
    # the sweep CSV stays naively splittable
    return ";".join("".join(cmds) for cmds in tg.profile_labels(idx))


def _map_point(x: float, y: float, tol: float = 1e-9) -> tuple[str, float]:
    """Regime and value from the analytic tipping lines; nan on a boundary
    where the two adjacent value branches disagree.  Admits y = 1/2, where
    all three regions meet."""
    if not 0.0 < x < 1.0:
        raise ValueError(f"x must lie inside (0, 1), got {x}")
    if not 0.5 <= y < 1.0:
        raise ValueError(f"the regime map needs 1/2 <= y < 1, got {y}")
    lower, upper = tipping_points(y)
    if abs(x - lower) <= tol:
        v1, v2 = -1.0 + 2.0 * x, -1.0 + 2.0 * y
        return REGIME_BOUNDARY, (0.5 * (v1 + v2) if abs(v1 - v2) <= tol
                                 else float("nan"))
    if abs(x - upper) <= tol:
        v1, v2 = -1.0 + 2.0 * y, 1.0 - 2.0 * x
        return REGIME_BOUNDARY, (0.5 * (v1 + v2) if abs(v1 - v2) <= tol
                                 else float("nan"))
    if x < lower:
        return REGIME_PD_V1, -1.0 + 2.0 * x
    if x < upper:
        return REGIME_COOPERATION, -1.0 + 2.0 * y
    return REGIME_PD_V2, 1.0 - 2.0 * x


def sweep_point(point: dict[str, float]) -> tuple[float, float, str, float, str]:
    """Evaluate one grid point: resolve (x, y), place it on the regime map,
    and list the pure equilibria of the decider game it induces.

    The nash cell is empty when the game degenerates (y = 1/2 exactly,
    where commands carry no influence to attribute)."""
    if "x" in point:
        x, y = point["x"], point["y"]
    else:
        d = point.get("D", 0.5)
        if not 0.0 < d < 1.0:
            raise ValueError(f"D must lie inside (0, 1), got {d}")
        beta = point.get("beta", 1.0) * (1.0 - d) / d
        a, c = point["a"], point["c"]
        if a != int(a) or c != int(c) or a < 1 or c < 1:
            raise ValueError(f"chain lengths must be positive integers, got a={a} c={c}")
        x, y = chain_xy(int(a), int(c), beta)
    regime, value = _map_point(x, y)
    try:
        tg = symmetric_transform(x, y)
        nash = "|".join(_profile_string(tg, idx) for idx in pure_nash(tg))
    except DegenerateInfluenceError:
        nash = ""
    return x, y, regime, value, nash


def _sweep_rows(spec: SweepSpec, workers: int):
    points = list(spec.grid())
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(sweep_point, points, chunksize=256))
    else:
        results = [sweep_point(p) for p in points]
    lead = tuple(n for n in spec.names if n not in ("x", "y"))
    header = ",".join(lead + ("x", "y", "regime", "value", "nash"))
    lines = [header]
    for point, (x, y, regime, value, nash) in zip(points, results):
        cells = [_fmt(point[n]) for n in lead]
        cells += [_fmt(x), _fmt(y), regime, _fmt(value), nash]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def cmd_sweep(args) -> int:
    spec = SweepSpec(tuple(args.vary), tuple(args.fix or []), args.out)
    _emit(_sweep_rows(spec, args.workers), spec.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hiergame",
        description="Hierarchical command games: votes, Ising conditionals, "
                    "transformed games, equilibria, sweeps.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, graph=True, game=False):
        if graph:
            p.add_argument("--graph", required=True, help="hierarchy graph JSON file")
        if game:
            p.add_argument("--game", required=True, help="base game JSON file")
        p.add_argument("--mode", choices=("tanh", "gaussian"), default="tanh")
        p.add_argument("--cap", type=int, default=None,
                       help="enumeration cap on free vertices")
        p.add_argument("--out", default=None, help="write output to this file")

    p = sub.add_parser("validate", help="check a graph file against all invariants")
    p.add_argument("--graph", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("influence", help="executive vote conditionals under a command vector")
    add_common(p)
    p.add_argument("--condition", action="append", type=_condition_flag,
                   metavar="VERTEX=SPIN", help="decider command, repeatable")
    p.set_defaults(func=cmd_influence)

    p = sub.add_parser("ising", help="spin conditional in the coupled Ising model")
    add_common(p)
    p.add_argument("--target", required=True, help="vertex whose spin to predict")
    p.add_argument("--condition", action="append", type=_condition_flag,
                   metavar="VERTEX=SPIN")
    p.set_defaults(func=cmd_ising)

    p = sub.add_parser("transform", help="dump the decider game tensor")
    add_common(p, game=True)
    p.add_argument("--mechanism", choices=("shapley", "shares"), default="shapley")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("nash", help="pure equilibria of the decider game")
    p.add_argument("--tensor", default=None, help="tensor JSON from the transform command")
    p.add_argument("--graph", default=None)
    p.add_argument("--game", default=None)
    p.add_argument("--mechanism", choices=("shapley", "shares"), default="shapley")
    p.add_argument("--mode", choices=("tanh", "gaussian"), default="tanh")
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_nash)

    p = sub.add_parser("sample", help="forward-sample executive votes")
    add_common(p)
    p.add_argument("--condition", action="append", type=_condition_flag,
                   metavar="VERTEX=SPIN")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("sweep", help="grid sweep to CSV (regime map)")
    p.add_argument("--vary", action="append", type=_vary_flag, required=True,
                   metavar="NAME=LO:HI:STEPS",
                   help="axis over a, c, beta, D, x or y; repeatable")
    p.add_argument("--fix", action="append", type=_fix_flag, metavar="NAME=VALUE")
    p.add_argument("--workers", type=int, default=1,
                   help="parallel workers; rows stay in grid order")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GraphFormatError, GameFormatError) as exc:
        return _fail(exc, EXIT_PARSE)
    except EnumerationCapError as exc:
        return _fail(exc, EXIT_CAP)
    except DegenerateInfluenceError as exc:
        return _fail(exc, EXIT_DEGENERATE)
    except (CyclicGraphError, MultiEdgeError, ValueError) as exc:
        return _fail(exc, EXIT_INVARIANT)


def _fail(exc: Exception, code: int) -> int:
    line = json.dumps({"error": type(exc).__name__, "message": str(exc)})
    sys.stderr.write(line + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
