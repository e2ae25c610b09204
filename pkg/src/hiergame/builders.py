"""Constructors for the standard chain-shaped hierarchies.

All builders follow the same weight convention: interior chain edges carry
weight 1 (a single predecessor), and the final edges into an executive
carry weight 1/2 each when two chains meet there.
"""

from __future__ import annotations

from .graph import (Edge, HierarchyGraph, ROLE_AGENT, ROLE_DECIDER,
                    ROLE_EXECUTIVE, Vertex)
from .vote import sigma_for_beta

DEFAULT_SIGMA = sigma_for_beta(1.0)  # noise width giving unit gain


def _chain(src: str, dst: str, length: int, prefix: str,
           final_weight: float) -> tuple[list[Vertex], list[Edge]]:
    """Directed chain of `length` edges from src to dst through fresh
    interior vertices named prefix1, prefix2, ..."""
    if length < 1:
        raise ValueError("chain length must be at least one edge")
    names = [src] + [f"{prefix}{k}" for k in range(1, length)] + [dst]
    vertices = [Vertex(n, ROLE_AGENT) for n in names[1:-1]]
    edges = []
    for u, v in zip(names[:-1], names[1:]):
        edges.append(Edge(u, v, 1.0))
    edges[-1] = Edge(edges[-1].src, edges[-1].dst, final_weight)
    return vertices, edges


def single_chain(length: int, free_float: float = 0.5,
                 noise_sigma: float = DEFAULT_SIGMA) -> HierarchyGraph:
    """One decider commanding one executive down a chain of `length` edges,
    every weight 1."""
    inner, edges = _chain("d1", "1", length, "u", final_weight=1.0)
    vertices = [Vertex("d1", ROLE_DECIDER)] + inner + [Vertex("1", ROLE_EXECUTIVE)]
    return HierarchyGraph(tuple(vertices), tuple(edges), free_float, noise_sigma)


def two_decider_chain(a: int, c: int, free_float: float = 0.5,
                      noise_sigma: float = DEFAULT_SIGMA) -> HierarchyGraph:
    """One executive pulled from both sides: decider d1 along `a` edges and
    decider d2 along `c` edges, meeting at the executive with weight 1/2
    from each side."""
    inner_a, edges_a = _chain("d1", "1", a, "u", final_weight=0.5)
    inner_c, edges_c = _chain("d2", "1", c, "w", final_weight=0.5)
    vertices = ([Vertex("d1", ROLE_DECIDER), Vertex("d2", ROLE_DECIDER)]
                + inner_a + inner_c + [Vertex("1", ROLE_EXECUTIVE)])
    return HierarchyGraph(tuple(vertices), tuple(edges_a + edges_c),
                          free_float, noise_sigma)


def crossed_chains(a: int = 4, b: int = 4, c: int = 4, d: int = 4,
                   free_float: float = 0.5,
                   noise_sigma: float = DEFAULT_SIGMA) -> HierarchyGraph:
    """The benchmark two-decider, two-executive hierarchy.

    Decider d1 reaches executive 1 along `a` edges and executive 2 along
    `b` edges; decider d2 reaches executive 1 along `c` edges and executive
    2 along `d` edges.  Each executive takes weight 1/2 from each of its two
    incoming chains.
    """
    inner_a, edges_a = _chain("d1", "1", a, "p", final_weight=0.5)
    inner_b, edges_b = _chain("d1", "2", b, "q", final_weight=0.5)
    inner_c, edges_c = _chain("d2", "1", c, "r", final_weight=0.5)
    inner_d, edges_d = _chain("d2", "2", d, "s", final_weight=0.5)
    vertices = ([Vertex("d1", ROLE_DECIDER), Vertex("d2", ROLE_DECIDER)]
                + inner_a + inner_b + inner_c + inner_d
                + [Vertex("1", ROLE_EXECUTIVE), Vertex("2", ROLE_EXECUTIVE)])
    edges = edges_a + edges_b + edges_c + edges_d
    return HierarchyGraph(tuple(vertices), tuple(edges), free_float, noise_sigma)
