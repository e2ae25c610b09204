"""Lifting a two-move base game from executives to deciders.

Deciders choose command vectors (one spin per executive).  Commands reach
executives through the hierarchy's vote process, one independent binary
process per executive coordinate, giving each executive a probability of
playing +1.  Expected base payoffs under those probabilities are then
reallocated to deciders through a share matrix, producing a normal-form
game among the deciders that can be solved for pure equilibria.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import GameFormatError
from .graph import HierarchyGraph, deciders as graph_deciders, executives as graph_executives
from .payoff import InfluenceOracle, ShareMatrix, shapley_shares, shares_by_paths
from .vote import VoteParams, influence_oracle

NASH_TOL = 1e-12
BOUNDARY_TOL = 1e-9

REGIME_PD_V1 = "pd-v1"
REGIME_COOPERATION = "cooperation"
REGIME_PD_V2 = "pd-v2"
REGIME_BOUNDARY = "boundary"

PD_V1_PROFILE = (("D", "C"), ("C", "D"))
COOPERATION_PROFILE = (("C", "C"), ("C", "C"))
PD_V2_PROFILE = (("C", "D"), ("D", "C"))


@dataclass(frozen=True)
class NormalFormGame:
    """Two-move game: spin profiles (one +-1 per player) map to payoff
    vectors; labels name the two moves (+1 is "C" by default)."""

    players: tuple[str, ...]
    payoffs: Mapping[tuple[int, ...], tuple[float, ...]]
    labels: Mapping[int, str] = field(default_factory=lambda: {1: "C", -1: "D"})

    def __post_init__(self) -> None:
        n = len(self.players)
        if n == 0:
            raise ValueError("game needs at least one player")
        expected = set(product((1, -1), repeat=n))
        if set(self.payoffs) != expected:
            raise ValueError("payoff table must cover every spin profile exactly once")
        for key, u in self.payoffs.items():
            if len(u) != n:
                raise ValueError(f"payoff vector for {key} has wrong length")
        if set(self.labels) != {1, -1} or self.labels[1] == self.labels[-1]:
            raise ValueError("labels must name +1 and -1 distinctly")

    def payoff(self, spins: tuple[int, ...]) -> tuple[float, ...]:
        return self.payoffs[spins]


def prisoners_dilemma(players: tuple[str, str] = ("1", "2")) -> NormalFormGame:
    """The baseline dilemma: mutual cooperation beats mutual defection, but
    unilateral defection beats both."""
    payoffs = {
        (1, 1): (1.0, 1.0),
        (1, -1): (-3.0, 3.0),
        (-1, 1): (3.0, -3.0),
        (-1, -1): (-1.0, -1.0),
    }
    return NormalFormGame(tuple(players), payoffs)


def game_to_dict(g: NormalFormGame) -> dict:
    rows = []
    for spins in product((1, -1), repeat=len(g.players)):
        rows.append({
            "profile": [g.labels[s] for s in spins],
            "u": list(g.payoffs[spins]),
        })
    return {
        "players": list(g.players),
        "labels": {"+1": g.labels[1], "-1": g.labels[-1]},
        "payoffs": rows,
    }


def game_from_dict(data: Mapping) -> NormalFormGame:
    try:
        players = tuple(str(p) for p in data["players"])
        labels = {1: str(data["labels"]["+1"]), -1: str(data["labels"]["-1"])}
        reverse = {labels[1]: 1, labels[-1]: -1}
        payoffs: dict[tuple[int, ...], tuple[float, ...]] = {}
        for row in data["payoffs"]:
            spins = tuple(reverse[str(move)] for move in row["profile"])
            if spins in payoffs:
                raise ValueError(f"duplicate profile {row['profile']}")
            payoffs[spins] = tuple(float(u) for u in row["u"])
    except (KeyError, TypeError, ValueError) as exc:
        raise GameFormatError(f"malformed game data: {exc}") from exc
    try:
        return NormalFormGame(players, payoffs, labels)
    except ValueError as exc:
        raise GameFormatError(str(exc)) from exc


def load_game(path: str | Path) -> NormalFormGame:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise GameFormatError(f"cannot read game file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise GameFormatError(f"game file {path} is not valid JSON: {exc}") from exc
    return game_from_dict(data)


def save_game(g: NormalFormGame, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(game_to_dict(g), fh, ensure_ascii=False, indent=2)
        fh.write("\n")


ConditionalTables = Mapping[str, Mapping[tuple[int, ...], float]]


def influence_tables(g: HierarchyGraph, params: VoteParams,
                     lam_order: tuple[str, ...], execs: Iterable[str],
                     cap: int | None = None) -> dict[str, dict[tuple[int, ...], float]]:
    """P(executive votes +1 | command pattern) for every executive and every
    pattern of decider commands on that executive's coordinate."""
    oracle = influence_oracle(g, params, cap)
    tables: dict[str, dict[tuple[int, ...], float]] = {}
    for i in execs:
        tables[i] = {
            pattern: oracle(i, dict(zip(lam_order, pattern)))
            for pattern in product((1, -1), repeat=len(lam_order))
        }
    return tables


def symmetric_influence(x: float, y: float,
                        lam_order: tuple[str, str] = ("d1", "d2"),
                        execs: tuple[str, str] = ("1", "2")) -> dict[str, dict[tuple[int, ...], float]]:
    """Mirror-symmetric two-decider influence tables from the two summary
    probabilities: y under unanimous +1, x when only the executive's far
    decider says +1."""
    first, second = execs
    return {
        first: {(1, 1): y, (-1, 1): x, (1, -1): 1.0 - x, (-1, -1): 1.0 - y},
        second: {(1, 1): y, (1, -1): x, (-1, 1): 1.0 - x, (-1, -1): 1.0 - y},
    }


def table_oracle(tables: ConditionalTables,
                 lam_order: tuple[str, ...]) -> InfluenceOracle:
    def oracle(executive: str, commands: Mapping[str, int]) -> float:
        return tables[executive][tuple(commands[v] for v in lam_order)]
    return oracle


def pre_payoff(g: NormalFormGame, lam_order: tuple[str, ...],
               tables: ConditionalTables,
               profile: Mapping[str, Mapping[str, int]]) -> tuple[float, ...]:
    """Expected base payoffs under a command profile.

    Executives act independently: each plays +1 with the probability its
    own coordinate's conditional gives, and expected payoffs multiply out
    over the product distribution.
    """
    probs = []
    for i in g.players:
        pattern = tuple(profile[lam][i] for lam in lam_order)
        probs.append(tables[i][pattern])
    totals = [0.0] * len(g.players)
    for spins in product((1, -1), repeat=len(g.players)):
        w = 1.0
        for p, s in zip(probs, spins):
            w *= p if s == 1 else 1.0 - p
        for j, u in enumerate(g.payoffs[spins]):
            totals[j] += w * u
    return tuple(totals)


@dataclass(frozen=True)
class TransformedGame:
    """Normal-form game among deciders induced by a base game.

    Strategies are command vectors over the executives (same order as
    `executives`); `payoffs` has one axis per decider plus a trailing axis
    selecting the decider whose payoff is read.
    """

    deciders: tuple[str, ...]
    executives: tuple[str, ...]
    strategies: tuple[tuple[int, ...], ...]
    payoffs: np.ndarray
    labels: Mapping[int, str]
    provenance: Mapping[str, object] = field(default_factory=dict)

    def profile_labels(self, idx: tuple[int, ...]) -> tuple[tuple[str, ...], ...]:
        return tuple(tuple(self.labels[s] for s in self.strategies[j]) for j in idx)

    def strategy_index(self, commands: tuple[str, ...]) -> int:
        reverse = {v: k for k, v in self.labels.items()}
        spins = tuple(reverse[move] for move in commands)
        return self.strategies.index(spins)

    def profile_index(self, profile: tuple[tuple[str, ...], ...]) -> tuple[int, ...]:
        return tuple(self.strategy_index(cmd) for cmd in profile)


def transform_from_tables(base: NormalFormGame, lam_order: tuple[str, ...],
                          tables: ConditionalTables, shares: ShareMatrix,
                          provenance: Mapping[str, object] | None = None) -> TransformedGame:
    """Assemble the decider game from explicit conditionals and shares."""
    n = len(base.players)
    m = len(lam_order)
    strategies = tuple(product((1, -1), repeat=n))
    n_strat = len(strategies)
    outcome_list = list(product((1, -1), repeat=n))
    u_rows = [base.payoffs[s] for s in outcome_list]
    share_rows = [[shares.share(lam, i) for i in base.players] for lam in lam_order]

    payoffs = np.zeros((n_strat,) * m + (m,))
    for idx in product(range(n_strat), repeat=m):
        probs = []
        for k, i in enumerate(base.players):
            pattern = tuple(strategies[idx[d]][k] for d in range(m))
            probs.append(tables[i][pattern])
        expected = [0.0] * n
        for s, u in zip(outcome_list, u_rows):
            w = 1.0
            for p, spin in zip(probs, s):
                w *= p if spin == 1 else 1.0 - p
            for j in range(n):
                expected[j] += w * u[j]
        for d in range(m):
            row = share_rows[d]
            payoffs[idx + (d,)] = sum(row[j] * expected[j] for j in range(n))
    return TransformedGame(lam_order, base.players, strategies, payoffs,
                           dict(base.labels), dict(provenance or {}))


def transform_game(base: NormalFormGame, g: HierarchyGraph, params: VoteParams,
                   mechanism: str = "shapley", cap: int | None = None) -> TransformedGame:
    """Full pipeline from a hierarchy: vote conditionals, payoff shares,
    decider game.  `mechanism` picks the share rule (shapley or shares)."""
    lam_order = tuple(sorted(graph_deciders(g)))
    execs = graph_executives(g)
    if set(base.players) != execs:
        raise ValueError("game players must match the graph's executives")
    tables = influence_tables(g, params, lam_order, base.players, cap)
    if mechanism == "shapley":
        shares = shapley_shares(influence_oracle(g, params, cap), lam_order, base.players)
    elif mechanism == "shares":
        shares = shares_by_paths(g, base.players)
    else:
        raise ValueError(f"unknown mechanism {mechanism!r}")
    provenance = {
        "mechanism": mechanism,
        "mode": params.mode,
        "free_float": params.free_float,
        "noise_sigma": params.noise_sigma,
    }
    return transform_from_tables(base, lam_order, tables, shares, provenance)


def pure_nash(tg: TransformedGame, tol: float = NASH_TOL) -> tuple[tuple[int, ...], ...]:
    """All pure equilibria as profile index tuples (one strategy index per
    decider), sorted.  A profile survives when no unilateral deviation
    gains more than `tol`."""
    m = len(tg.deciders)
    mask = np.ones(tg.payoffs.shape[:-1], dtype=bool)
    for d in range(m):
        own = tg.payoffs[..., d]
        best = own.max(axis=d, keepdims=True)
        mask &= own >= best - tol
    return tuple(sorted(tuple(int(v) for v in idx) for idx in np.argwhere(mask)))


def symmetric_transform(x: float, y: float,
                        base: NormalFormGame | None = None) -> TransformedGame:
    """Decider game at a symmetric influence point (x, y) over the default
    two-decider, two-executive layout."""
    base = base if base is not None else prisoners_dilemma()
    lam_order = ("d1", "d2")
    tables = symmetric_influence(x, y, lam_order, base.players)
    shares = shapley_shares(table_oracle(tables, lam_order), lam_order, base.players)
    return transform_from_tables(base, lam_order, tables, shares,
                                 {"mechanism": "shapley", "x": x, "y": y})


@dataclass(frozen=True)
class RegimeSummary:
    x: float
    y: float
    x_bar: float
    y_bar: float
    regime: str
    nash: tuple[tuple[tuple[str, ...], ...], ...]
    value: float


def tipping_points(y: float) -> tuple[float, float]:
    """The two boundary positions in x at symmetric height y."""
    return (2.0 - y) / 3.0, (y + 1.0) / 3.0


def classify_regime(x: float, y: float, x_bar: float | None = None,
                    y_bar: float | None = None,
                    boundary_tol: float = BOUNDARY_TOL) -> RegimeSummary:
    """Place a symmetric influence point in its equilibrium regime.

    Regions in x at fixed y: below (2-y)/3 both deciders command defection
    from their own executive (pd-v1); between the lines unanimous
    cooperation; above (y+1)/3 the mirrored dilemma (pd-v2).  Points within
    `boundary_tol` of a line are flagged "boundary" and carry both adjacent
    equilibria.
    """
    x_bar = x if x_bar is None else x_bar
    y_bar = y if y_bar is None else y_bar
    if abs(x - x_bar) > 1e-12 or abs(y - y_bar) > 1e-12:
        raise ValueError(
            "asymmetric inputs are outside the classified scope; "
            "use the full tensor via transform_game instead")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if not 0.5 < y <= 1.0:
        raise ValueError(f"y must lie in (1/2, 1], got {y}")
    lower, upper = tipping_points(y)
    if abs(x - lower) <= boundary_tol:
        v1, v2 = -1.0 + 2.0 * x, -1.0 + 2.0 * y
        value = 0.5 * (v1 + v2) if abs(v1 - v2) <= boundary_tol else math.nan
        return RegimeSummary(x, y, x_bar, y_bar, REGIME_BOUNDARY,
                             (PD_V1_PROFILE, COOPERATION_PROFILE), value)
    if abs(x - upper) <= boundary_tol:
        v1, v2 = -1.0 + 2.0 * y, 1.0 - 2.0 * x
        value = 0.5 * (v1 + v2) if abs(v1 - v2) <= boundary_tol else math.nan
        return RegimeSummary(x, y, x_bar, y_bar, REGIME_BOUNDARY,
                             (COOPERATION_PROFILE, PD_V2_PROFILE), value)
    if x < lower:
        return RegimeSummary(x, y, x_bar, y_bar, REGIME_PD_V1,
                             (PD_V1_PROFILE,), -1.0 + 2.0 * x)
    if x < upper:
        return RegimeSummary(x, y, x_bar, y_bar, REGIME_COOPERATION,
                             (COOPERATION_PROFILE,), -1.0 + 2.0 * y)
    return RegimeSummary(x, y, x_bar, y_bar, REGIME_PD_V2,
                         (PD_V2_PROFILE,), 1.0 - 2.0 * x)


def game_value(x: float, y: float, boundary_tol: float = BOUNDARY_TOL) -> float:
    """Equilibrium payoff of the first decider at a symmetric point.

    Piecewise: -1+2x in pd-v1, -1+2y under cooperation, 1-2x in pd-v2.
    Exactly on a tipping line the two adjacent branches generally disagree
    (the equilibrium payoff jumps); the shared value is returned when they
    do agree, otherwise this raises.
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if not 0.5 <= y <= 1.0:
        raise ValueError(f"y must lie in [1/2, 1], got {y}")
    lower, upper = tipping_points(y)
    if abs(x - lower) <= boundary_tol:
        v1, v2 = -1.0 + 2.0 * x, -1.0 + 2.0 * y
        if abs(v1 - v2) <= max(boundary_tol, 1e-9):
            return 0.5 * (v1 + v2)
        raise ValueError("equilibrium payoff jumps at this tipping point")
    if abs(x - upper) <= boundary_tol:
        v1, v2 = -1.0 + 2.0 * y, 1.0 - 2.0 * x
        if abs(v1 - v2) <= max(boundary_tol, 1e-9):
            return 0.5 * (v1 + v2)
        raise ValueError("equilibrium payoff jumps at this tipping point")
    if x < lower:
        return -1.0 + 2.0 * x
    if x < upper:
        return -1.0 + 2.0 * y
    return 1.0 - 2.0 * x
