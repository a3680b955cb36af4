"""Growth-model network generators: preferential attachment with triad
formation, and connecting-nearest-neighbor growth via potential links.

Both generators are seeded and deterministic, emit contiguous 0-based ids,
and return simple connected graphs.
"""

from __future__ import annotations

import numpy as np

from .graph import Graph, build_graph

# Resampling budget when a preferential-attachment draw hits the arriving
# node or an already-chosen target; after that the edge is skipped.
_PA_RETRIES = 100


def generate_hk(n: int, m: int = 4, p_t: float = 0.9,
                seed: int | None = None) -> Graph:
    """Grow a scale-free, high-clustering network.

    Starts from a clique of m+1 nodes. Each arriving node attaches m edges:
    the first by degree-preferential attachment; each subsequent edge is a
    triad-formation step with probability ``p_t`` (link to a uniformly random
    not-yet-linked neighbor of the previously chosen target), otherwise
    another preferential-attachment step. A triad step with no eligible
    candidate falls back to preferential attachment.

    Args:
        n: total node count, must satisfy n > m.
        m: edges attached per arriving node, m >= 1.
        p_t: triad-formation probability in [0, 1].
        seed: RNG seed; same seed reproduces the identical edge set.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if n <= m:
        raise ValueError(f"n must exceed m (got n={n}, m={m})")
    if not 0.0 <= p_t <= 1.0:
        raise ValueError("p_t must lie in [0, 1]")
    rng = np.random.default_rng(seed)

    adj_sets: list[set[int]] = [set() for _ in range(n)]
    adj_lists: list[list[int]] = [[] for _ in range(n)]
    edges: list[tuple[int, int]] = []
    stubs: list[int] = []  # one entry per unit of degree; PA = uniform draw

    def link(a: int, b: int) -> None:
        adj_sets[a].add(b)
        adj_sets[b].add(a)
        adj_lists[a].append(b)
        adj_lists[b].append(a)
        edges.append((a, b))
        stubs.append(a)
        stubs.append(b)

    for a in range(m + 1):
        for b in range(a + 1, m + 1):
            link(a, b)

    for v in range(m + 1, n):
        prev: int | None = None
        linked = adj_sets[v]
        for _ in range(m):
            target: int | None = None
            if prev is not None and rng.random() < p_t:
                cands = [w for w in adj_lists[prev] if w != v and w not in linked]
                if cands:
                    target = cands[rng.integers(len(cands))]
            if target is None:
                for _ in range(_PA_RETRIES):
                    cand = stubs[rng.integers(len(stubs))]
                    if cand != v and cand not in linked:
                        target = cand
                        break
            if target is None:
                continue  # could not place this edge distinctly; place the rest
            link(v, target)
            prev = target

    return build_graph(n, edges)


def generate_cnn(n: int, u: float = 0.75, seed: int | None = None) -> Graph:
    """Grow an assortative scale-free network via potential-link conversion.

    Starts from a single node. Each step either (with probability 1-u)
    introduces a new node, links it to a uniformly random existing node and
    records a potential link to each neighbor of that node, or (with
    probability u) converts one uniformly random pending potential link into
    a real edge. Growth stops once n nodes exist; mean degree tends to
    2/(1-u).

    Args:
        n: total node count, >= 1.
        u: conversion probability, strictly inside (0, 1).
        seed: RNG seed; same seed reproduces the identical edge set.
    """
    edges, _ = _grow_cnn(n, u, np.random.default_rng(seed))
    return build_graph(n, edges)


def _grow_cnn(n: int, u: float,
              rng: np.random.Generator) -> tuple[list[tuple[int, int]], int]:
    """CNN growth loop; returns (edges, successful conversion count)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 < u < 1.0:
        raise ValueError("u must lie strictly inside (0, 1)")

    adj_sets: list[set[int]] = [set() for _ in range(n)]
    adj_lists: list[list[int]] = [[] for _ in range(n)]
    edges: list[tuple[int, int]] = []
    potential: list[tuple[int, int]] = []
    conversions = 0
    nodes = 1

    def link(a: int, b: int) -> None:
        adj_sets[a].add(b)
        adj_sets[b].add(a)
        adj_lists[a].append(b)
        adj_lists[b].append(a)
        edges.append((a, b))

    while nodes < n:
        if rng.random() < u:
            if not potential:
                continue  # nothing pending; the step is silently skipped
            i = int(rng.integers(len(potential)))
            pair = potential[i]
            potential[i] = potential[-1]  # swap-pop keeps selection O(1)
            potential.pop()
            a, b = pair
            if b not in adj_sets[a]:
                link(a, b)
                conversions += 1
        else:
            w = nodes
            t = int(rng.integers(nodes))
            # potential links pair the newcomer with the target's current
            # neighborhood, captured before the new edge exists
            potential.extend((w, x) for x in adj_lists[t])
            link(w, t)
            nodes += 1

    return edges, conversions
