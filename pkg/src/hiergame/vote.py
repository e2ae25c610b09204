"""Noisy weighted voting on a hierarchy and its exact conditionals.

Each vertex with predecessors adopts +1 with a probability driven by the
weighted sum of its predecessors' spins, scaled by (1-D)/D for free float
D, against zero-mean Gaussian noise of width sigma.  Two response curves
are supported: the exact Gaussian tail ("gaussian") and its logistic
approximation ("tanh", the default).  Conditional distributions are exact
sums over all spin configurations, so graph size is capped.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable, Iterator, Mapping

import numpy as np
from scipy.special import erf as _erf

from .errors import CyclicGraphError, EnumerationCapError
from .graph import HierarchyGraph, deciders, has_directed_cycle

MODE_TANH = "tanh"
MODE_GAUSSIAN = "gaussian"

DEFAULT_CAP = 22
CAP_ENV_VAR = "HIERGAME_CAP"

_BLOCK_BITS = 14  # enumeration chunk size: 2**14 configurations per block

_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


def sigma_for_beta(beta: float) -> float:
    """Noise width that makes the logistic gain equal `beta`."""
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    return _SQRT_2_OVER_PI / beta


@dataclass(frozen=True)
class VoteParams:
    """Vote-process parameters: free float D in (0,1), noise width, mode."""

    free_float: float
    noise_sigma: float
    mode: str = MODE_TANH

    def __post_init__(self) -> None:
        if not 0.0 < self.free_float < 1.0:
            raise ValueError(f"free_float {self.free_float} outside (0, 1)")
        if not self.noise_sigma > 0.0:
            raise ValueError("noise_sigma must be positive")
        if self.mode not in (MODE_TANH, MODE_GAUSSIAN):
            raise ValueError(f"unknown mode {self.mode!r}")

    @property
    def gain(self) -> float:
        """Logistic gain a = sqrt(2 / (pi sigma^2)); doubles as the inverse
        temperature of the matching pair-coupling model."""
        return _SQRT_2_OVER_PI / self.noise_sigma

    @property
    def command_scale(self) -> float:
        return (1.0 - self.free_float) / self.free_float

    @classmethod
    def from_graph(cls, g: HierarchyGraph, mode: str = MODE_TANH) -> "VoteParams":
        return cls(g.free_float, g.noise_sigma, mode)

    @classmethod
    def from_beta(cls, beta: float, free_float: float, mode: str = MODE_TANH) -> "VoteParams":
        return cls(free_float, sigma_for_beta(beta), mode)


def default_cap() -> int:
    raw = os.environ.get(CAP_ENV_VAR)
    if raw is None:
        return DEFAULT_CAP
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"{CAP_ENV_VAR} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError(f"{CAP_ENV_VAR} must be positive")
    return value


def _check_cap(n_vertices: int, cap: int | None) -> None:
    limit = default_cap() if cap is None else cap
    if n_vertices > limit:
        raise EnumerationCapError(
            f"graph has {n_vertices} vertices, above the enumeration cap {limit}"
        )


def outcome_probability(spin, field, params: VoteParams):
    """P(vertex adopts `spin` | net command field), elementwise on arrays."""
    if params.mode == MODE_TANH:
        return 0.5 * (1.0 + np.tanh(params.gain * np.multiply(spin, field)))
    z = np.multiply(spin, field) / (params.noise_sigma * math.sqrt(2.0))
    return 0.5 * (1.0 + _erf(z))


def single_vote_prob(weights: Mapping[str, float], commands: Mapping[str, int],
                     params: VoteParams) -> float:
    """Probability that one vertex votes +1 given its predecessors' spins.

    `weights` are the normalized predecessor weights; `commands` assigns a
    spin (+1 or -1) to every predecessor.
    """
    if not weights:
        raise ValueError("vertex has no predecessors, its spin is free")
    total = 0.0
    for v, w in weights.items():
        if v not in commands:
            raise ValueError(f"no command for predecessor {v!r}")
        s = commands[v]
        if s not in (1, -1):
            raise ValueError(f"command for {v!r} must be +1 or -1, got {s!r}")
        total += w * s
    if abs(sum(weights.values()) - 1.0) > 1e-9:
        raise ValueError("predecessor weights must sum to 1")
    return float(outcome_probability(1, params.command_scale * total, params))


def _validate_assignment(assignment: Mapping[str, int], over: frozenset[str],
                         what: str) -> None:
    if set(assignment) != set(over):
        raise ValueError(f"{what} must assign every vertex of the set exactly once")
    for v, s in assignment.items():
        if s not in (1, -1):
            raise ValueError(f"{what} for {v!r} must be +1 or -1, got {s!r}")


@dataclass(frozen=True)
class ConditionalDistribution:
    """Exact distribution over spin patterns on a target vertex set B,
    conditioned on fixed spins over A."""

    condition: Mapping[str, int]
    vertices: tuple[str, ...]
    table: Mapping[tuple[int, ...], float]
    partition: float
    notes: tuple[str, ...] = ()

    def prob(self, assignment: Mapping[str, int]) -> float:
        _validate_assignment(assignment, frozenset(self.vertices), "assignment")
        key = tuple(assignment[v] for v in self.vertices)
        return self.table[key]

    def plus_prob(self, vertex: str) -> float:
        """Marginal probability that `vertex` is +1."""
        if vertex not in self.vertices:
            raise ValueError(f"{vertex!r} is not a target vertex")
        k = self.vertices.index(vertex)
        return sum(p for key, p in self.table.items() if key[k] == 1)

    def outcomes(self) -> Iterator[tuple[dict[str, int], float]]:
        for key, p in self.table.items():
            yield dict(zip(self.vertices, key)), p


def _enumeration_setup(g: HierarchyGraph, conditioned: frozenset[str],
                       params: VoteParams):
    """Shared scaffolding: vertex indexing, weight matrix, factor columns."""
    order = tuple(sorted(g.vertex_ids))
    index = {v: k for k, v in enumerate(order)}
    n = len(order)
    wmat = np.zeros((n, n))
    factor_cols = []
    for v, preds in g.pred_map.items():
        if preds:
            factor_cols.append(index[v])
            for u, w in preds:
                wmat[index[u], index[v]] = w
    free = [v for v in order if v not in conditioned]
    return order, index, n, wmat, sorted(factor_cols), free


def _iter_weight_blocks(g: HierarchyGraph, condition: Mapping[str, int],
                        params: VoteParams):
    """Yield (spins_block, weights_block) over all free-spin configurations.

    spins_block is (m, n) of +-1 floats in vertex order; weights_block is the
    product of single-vote factors for each row.  Conditioned vertices hold
    their fixed spins in every row.
    """
    conditioned = frozenset(condition)
    order, index, n, wmat, factor_cols, free = _enumeration_setup(g, conditioned, params)
    k = len(free)
    free_idx = np.array([index[v] for v in free], dtype=np.intp)
    scale = params.command_scale
    block_bits = min(k, _BLOCK_BITS)
    block_rows = 1 << block_bits
    shifts = np.arange(k, dtype=np.uint64)
    base = np.zeros(n)
    for v, s in condition.items():
        base[index[v]] = float(s)
    for start in range(0, 1 << k, block_rows):
        codes = np.arange(start, start + block_rows, dtype=np.uint64)
        bits = (codes[:, None] >> shifts[None, :]) & np.uint64(1)
        spins = np.broadcast_to(base, (block_rows, n)).copy()
        if k:
            spins[:, free_idx] = 2.0 * bits.astype(np.float64) - 1.0
        fields = scale * (spins @ wmat)
        if factor_cols:
            probs = outcome_probability(spins[:, factor_cols], fields[:, factor_cols], params)
            weights = np.prod(probs, axis=1)
        else:
            weights = np.ones(block_rows)
        yield order, spins, weights


def conditional_influence(g: HierarchyGraph, a: frozenset[str] | set[str],
                          b: frozenset[str] | set[str],
                          condition: Mapping[str, int], params: VoteParams,
                          cap: int | None = None) -> ConditionalDistribution:
    """Exact conditional P(spins on B | spins on A) for one coordinate of the
    command vector.

    Sums the product of per-vertex vote factors over every configuration of
    the unconditioned vertices and normalizes.  On an acyclic graph with A
    equal to the decider set this reproduces the forward pass exactly; with
    other conditioning sets (or cycles) it is the normalized-sum semantics.
    """
    a = frozenset(a)
    b = frozenset(b)
    for v in a | b:
        g.require_vertex(v)
    if a & b:
        raise ValueError("conditioned and target sets must be disjoint")
    if not b:
        raise ValueError("target set is empty")
    _validate_assignment(condition, a, "condition")
    _check_cap(len(g.vertices), cap)

    notes: tuple[str, ...] = ()
    if not has_directed_cycle(g) and not a >= deciders(g):
        notes = ("mid-graph conditioning: condition set does not cover all deciders",)

    # A configuration and its global spin flip carry bitwise-identical weight
    # (the response functions are odd), so evaluating under a sign-canonical
    # condition and relabeling keeps P(tau|sigma) == P(-tau|-sigma) exact.
    flipped = bool(a) and condition[min(a)] == -1
    work = {v: -s for v, s in condition.items()} if flipped else condition

    b_order = tuple(sorted(b))
    nb = len(b_order)
    sums = np.zeros(1 << nb)
    for order, spins, weights in _iter_weight_blocks(g, work, params):
        index = {v: kk for kk, v in enumerate(order)}
        b_idx = [index[v] for v in b_order]
        keys = np.zeros(spins.shape[0], dtype=np.int64)
        for j, col in enumerate(b_idx):
            keys |= ((spins[:, col] > 0).astype(np.int64)) << j
        sums += np.bincount(keys, weights=weights, minlength=1 << nb)
    z = float(sums.sum())
    complement = np.arange(1 << nb)[::-1]
    if flipped:
        sums = sums[complement]
    elif not a:
        sums = 0.5 * (sums + sums[complement])
    if z <= 0.0:
        raise ValueError("conditional distribution has zero total weight")
    table = {}
    for code in range(1 << nb):
        key = tuple(1 if (code >> j) & 1 else -1 for j in range(nb))
        table[key] = float(sums[code]) / z
    return ConditionalDistribution(dict(condition), b_order, table, z, notes)


def partition_function(g: HierarchyGraph, a: frozenset[str] | set[str],
                       condition: Mapping[str, int], params: VoteParams,
                       cap: int | None = None) -> float:
    """Total weight of all configurations compatible with the condition.

    Equals exactly 1 on an acyclic graph conditioned on all deciders, and
    2**(number of free deciders) when some deciders are left free; on cyclic
    graphs it is a genuine normalizer with no closed form.
    """
    a = frozenset(a)
    for v in a:
        g.require_vertex(v)
    _validate_assignment(condition, a, "condition")
    _check_cap(len(g.vertices), cap)
    total = 0.0
    for _, _, weights in _iter_weight_blocks(g, condition, params):
        total += float(weights.sum())
    return total


def sample_many(g: HierarchyGraph, condition: Mapping[str, int],
                params: VoteParams, n: int, seed: int) -> dict[str, np.ndarray]:
    """Draw `n` independent full spin assignments by ancestral sampling.

    Requires an acyclic graph conditioned on exactly the decider set.
    Returns an int8 array of +-1 per vertex; deterministic in `seed`.
    """
    if has_directed_cycle(g):
        raise CyclicGraphError("forward sampling needs an acyclic hierarchy")
    lam = deciders(g)
    _validate_assignment(condition, lam, "condition")
    if n < 1:
        raise ValueError("need at least one sample")

    order = _topological_order(g)
    rng = np.random.default_rng(seed)
    scale = params.command_scale
    spins: dict[str, np.ndarray] = {}
    for v in order:
        preds = g.pred_map[v]
        if not preds:
            spins[v] = np.full(n, condition[v], dtype=np.int8)
            continue
        fld = np.zeros(n)
        for u, w in preds:
            fld += w * spins[u]
        p_plus = outcome_probability(1, scale * fld, params)
        draws = rng.random(n)
        spins[v] = np.where(draws < p_plus, 1, -1).astype(np.int8)
    return spins


def sample_outcome(g: HierarchyGraph, condition: Mapping[str, int],
                   params: VoteParams, seed: int) -> dict[str, int]:
    """One full spin assignment drawn by ancestral sampling."""
    draws = sample_many(g, condition, params, 1, seed)
    return {v: int(arr[0]) for v, arr in draws.items()}


def _topological_order(g: HierarchyGraph) -> list[str]:
    """Kahn's algorithm with sorted tie-breaking, so the order (and hence
    sampling randomness) is reproducible."""
    indeg = {v: len(g.pred_map[v]) for v in g.vertex_ids}
    ready = sorted(v for v, d in indeg.items() if d == 0)
    out: list[str] = []
    while ready:
        v = ready.pop(0)
        out.append(v)
        changed = False
        for w, _ in g.succ_map[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
                changed = True
        if changed:
            ready.sort()
    if len(out) != len(g.vertex_ids):
        raise CyclicGraphError("graph has a directed cycle")
    return out


def influence_oracle(g: HierarchyGraph, params: VoteParams,
                     cap: int | None = None) -> Callable[[str, Mapping[str, int]], float]:
    """Callable (executive, commands) -> P(executive votes +1 | commands),
    with commands giving one spin per decider.  Results are cached."""
    lam = deciders(g)
    cache: dict[tuple[str, tuple[tuple[str, int], ...]], float] = {}

    def oracle(executive: str, commands: Mapping[str, int]) -> float:
        key = (executive, tuple(sorted(commands.items())))
        if key not in cache:
            dist = conditional_influence(g, lam, {executive}, dict(commands), params, cap)
            cache[key] = dist.plus_prob(executive)
        return cache[key]

    return oracle
