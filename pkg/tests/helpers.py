"""Independent brute-force oracles and random instance generators.

Everything here recomputes quantities from first principles with plain
itertools and math (no numpy, no package internals beyond graph structure),
so tests compare the package against genuinely separate code paths.
"""

import itertools
import math
import random

from hiergame import Edge, HierarchyGraph, Vertex


def response(spin: int, field: float, mode: str, sigma: float) -> float:
    """Probability that one vote lands on `spin` given the weighted field."""
    if mode == "tanh":
        a = math.sqrt(2.0 / math.pi) / sigma
        return 0.5 + 0.5 * math.tanh(a * spin * field)
    return 0.5 * (1.0 + math.erf(spin * field / (sigma * math.sqrt(2.0))))


def product_weight(g: HierarchyGraph, spins: dict, mode: str) -> float:
    """Product of per-vertex vote factors for one full configuration."""
    scale = (1.0 - g.free_float) / g.free_float
    w = 1.0
    for v in g.vertex_ids:
        preds = g.pred_map[v]
        if not preds:
            continue
        field = scale * sum(wt * spins[u] for u, wt in preds)
        w *= response(spins[v], field, mode, g.noise_sigma)
    return w


def brute_vote_conditional(g: HierarchyGraph, target: str, condition: dict,
                           mode: str = "tanh") -> float:
    """P(target = +1 | condition) by raw enumeration of the product measure."""
    free = [v for v in sorted(g.vertex_ids) if v not in condition]
    num = den = 0.0
    for combo in itertools.product((1, -1), repeat=len(free)):
        spins = dict(condition)
        spins.update(zip(free, combo))
        w = product_weight(g, spins, mode)
        den += w
        if spins[target] == 1:
            num += w
    return num / den


def brute_vote_partition(g: HierarchyGraph, condition: dict, mode: str = "tanh") -> float:
    free = [v for v in sorted(g.vertex_ids) if v not in condition]
    total = 0.0
    for combo in itertools.product((1, -1), repeat=len(free)):
        spins = dict(condition)
        spins.update(zip(free, combo))
        total += product_weight(g, spins, mode)
    return total


def brute_ising_conditional(couplings, beta: float, target: str, condition: dict) -> float:
    """P(target = +1 | condition) from the full-graph Boltzmann weights.

    No corridor restriction here: parts screened off by the boundary factor
    out of the ratio, so this doubles as a check of that restriction.
    """
    vertices = sorted({u for u, _, _ in couplings} | {v for _, v, _ in couplings})
    free = [v for v in vertices if v not in condition]
    num = den = 0.0
    for combo in itertools.product((1, -1), repeat=len(free)):
        spins = dict(condition)
        spins.update(zip(free, combo))
        energy = sum(j * spins[u] * spins[v] for u, v, j in couplings)
        w = math.exp(beta * energy)
        den += w
        if spins[target] == 1:
            num += w
    return num / den


def tv_distance(p: dict, q: dict) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def _assemble(n: int, directed: list, rng: random.Random,
              free_float: float, noise_sigma: float) -> HierarchyGraph:
    """Roles from degrees, random renormalized predecessor weights."""
    names = [f"v{k}" for k in range(n)]
    has_pred = {v for _, v in directed}
    has_succ = {u for u, _ in directed}
    vertices = []
    for v in names:
        if v not in has_pred:
            role = "decider"
        elif v not in has_succ:
            role = "executive"
        else:
            role = "agent"
        vertices.append(Vertex(v, role))
    raw = {}
    for u, v in directed:
        raw[(u, v)] = rng.uniform(0.2, 1.0)
    totals = {}
    for (u, v), w in raw.items():
        totals[v] = totals.get(v, 0.0) + w
    edges = [Edge(u, v, w / totals[v]) for (u, v), w in raw.items()]
    return HierarchyGraph(tuple(vertices), tuple(edges), free_float, noise_sigma)


def random_tree(rng: random.Random, n: int,
                free_float: float | None = None,
                noise_sigma: float | None = None) -> HierarchyGraph:
    """Random undirected tree, randomly oriented into a DAG.

    Orientation follows a random precedence order, so in-degree-2 joins
    appear regularly; roots become deciders and sinks executives.
    """
    assert n >= 2
    if free_float is None:
        free_float = rng.uniform(0.1, 0.9)
    if noise_sigma is None:
        noise_sigma = math.sqrt(2.0 / math.pi) / rng.uniform(0.4, 1.6)
    parent = {k: rng.randrange(k) for k in range(1, n)}
    rank = {k: i for i, k in enumerate(rng.sample(range(n), n))}
    directed = []
    for k, p in parent.items():
        a, b = (p, k) if rank[p] < rank[k] else (k, p)
        directed.append((f"v{a}", f"v{b}"))
    return _assemble(n, directed, rng, free_float, noise_sigma)


def random_arborescence(rng: random.Random, n: int,
                        free_float: float | None = None,
                        noise_sigma: float | None = None) -> HierarchyGraph:
    """Random tree with every edge pointing away from vertex 0: in-degree
    at most 1 everywhere."""
    assert n >= 2
    if free_float is None:
        free_float = rng.uniform(0.1, 0.9)
    if noise_sigma is None:
        noise_sigma = math.sqrt(2.0 / math.pi) / rng.uniform(0.4, 1.6)
    directed = [(f"v{rng.randrange(k)}", f"v{k}") for k in range(1, n)]
    return _assemble(n, directed, rng, free_float, noise_sigma)


def random_dag(rng: random.Random, n: int, extra: int = 2,
               free_float: float | None = None,
               noise_sigma: float | None = None) -> HierarchyGraph:
    """Connected random DAG: oriented random tree plus a few extra forward
    edges (may create joins and undirected cycles, never directed ones)."""
    assert n >= 2
    if free_float is None:
        free_float = rng.uniform(0.1, 0.9)
    if noise_sigma is None:
        noise_sigma = math.sqrt(2.0 / math.pi) / rng.uniform(0.4, 1.6)
    parent = {k: rng.randrange(k) for k in range(1, n)}
    order = rng.sample(range(n), n)
    rank = {k: i for i, k in enumerate(order)}
    seen = set()
    directed = []
    for k, p in parent.items():
        a, b = (p, k) if rank[p] < rank[k] else (k, p)
        directed.append((f"v{a}", f"v{b}"))
        seen.add((a, b))
    tries = 0
    while extra > 0 and tries < 50 * extra:
        tries += 1
        i, j = rng.sample(range(n), 2)
        a, b = (i, j) if rank[i] < rank[j] else (j, i)
        if (a, b) in seen:
            continue
        seen.add((a, b))
        directed.append((f"v{a}", f"v{b}"))
        extra -= 1
    return _assemble(n, directed, rng, free_float, noise_sigma)
