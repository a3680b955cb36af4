"""Spatial prisoner's dilemma with synchronous imitate-the-wealthiest updates.

Each round every agent plays one game against each neighbor and accumulates
payoffs from the matrix M(C,C)=1, M(C,D)=0, M(D,C)=T, M(D,D)=eps. All agents
then update simultaneously: an agent keeps its strategy unless some neighbor
earned strictly more, in which case it copies the strategy of the
highest-payoff neighbor (ties among those broken by smallest node id, or
uniformly at random in the "random" tie mode).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .simtrace import SimTrace
from .som import CellAssignment

C, D = 0, 1
STATE_NAMES = ("C", "D")

DEFAULT_T = 1.5
DEFAULT_EPS = 0.0
DEFAULT_MAX_ROUNDS = 100


@dataclass
class SpdState:
    """Per-agent strategies (C/D codes) after ``round`` updates, with the
    payoffs of the round that produced them (None before any play)."""

    strategies: np.ndarray
    round: int = 0
    payoffs: np.ndarray | None = None


def init_spd(graph: Graph, seed=None, init: str = "random") -> SpdState:
    """Independent fair coin per agent; "all_c"/"all_d" force one strategy."""
    if init == "random":
        rng = np.random.default_rng(seed)
        strategies = (rng.random(graph.n) < 0.5).astype(np.int8)  # True -> D
    elif init == "all_c":
        strategies = np.full(graph.n, C, dtype=np.int8)
    elif init == "all_d":
        strategies = np.full(graph.n, D, dtype=np.int8)
    else:
        raise ValueError(f"unknown init mode {init!r}")
    return SpdState(strategies=strategies, round=0)


def play_round(graph: Graph, strategies: np.ndarray, T: float = DEFAULT_T,
               eps: float = DEFAULT_EPS) -> np.ndarray:
    """Accumulated payoff per agent from one game against each neighbor."""
    if not (T > 1.0 > eps >= 0.0):
        raise ValueError("dilemma ordering requires T > 1 > eps >= 0")
    n = graph.n
    src, dst = graph.directed_edges()
    coop = strategies == C
    n_coop = np.bincount(src[coop[dst]], minlength=n).astype(np.float64)
    deg = graph.degrees.astype(np.float64)
    return np.where(coop, n_coop, T * n_coop + eps * (deg - n_coop))


def update_strategies(graph: Graph, strategies: np.ndarray,
                      payoffs: np.ndarray, tie: str = "min_id",
                      rng: np.random.Generator | None = None) -> np.ndarray:
    """Synchronous imitation of the wealthiest neighbor.

    Agents whose own payoff is >= every neighbor's keep their strategy;
    isolated agents always keep theirs.
    """
    n = graph.n
    deg = graph.degrees
    indptr, indices = graph.indptr, graph.indices
    flat = payoffs[indices]
    new = strategies.copy()
    if flat.size == 0:
        return new

    # reduce only over nonempty rows; their starts are strictly increasing,
    # which keeps reduceat segments aligned with adjacency rows
    nonempty = np.flatnonzero(deg > 0)
    starts = indptr[nonempty].astype(np.int64)
    nbr_max = np.full(n, -np.inf)
    nbr_max[nonempty] = np.maximum.reduceat(flat, starts)
    adopt = payoffs < nbr_max
    if not adopt.any():
        return new

    if tie == "min_id":
        # among neighbors achieving the max, the smallest id wins
        at_max = flat == np.repeat(nbr_max[nonempty], deg[nonempty])
        masked_ids = np.where(at_max, indices.astype(np.int64), n)
        chosen = np.full(n, n, dtype=np.int64)
        chosen[nonempty] = np.minimum.reduceat(masked_ids, starts)
        new[adopt] = strategies[chosen[adopt]]
    elif tie == "random":
        if rng is None:
            raise ValueError("tie='random' needs an rng")
        for i in np.flatnonzero(adopt):
            row = indices[indptr[i]:indptr[i + 1]]
            best = row[payoffs[row] == payoffs[row].max()]
            new[i] = strategies[best[rng.integers(best.size)]]
    else:
        raise ValueError(f"unknown tie mode {tie!r}")
    return new


def run_spd(graph: Graph, assignment: CellAssignment, T: float = DEFAULT_T,
            eps: float = DEFAULT_EPS, seed=None,
            max_rounds: int = DEFAULT_MAX_ROUNDS, tie: str = "min_id",
            init: str = "random") -> SimTrace:
    """Alternate play/update until a fixed point or ``max_rounds``.

    The trace records per-cell C/D counts for round 0 and after every update.
    The only randomness is the initial strategy draw (plus tie resolution in
    the "random" tie mode); the trajectory is otherwise deterministic.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    if assignment.n != graph.n:
        raise ValueError("assignment does not cover the graph's nodes")

    init_seed, tie_seed = np.random.SeedSequence(seed).spawn(2)
    state = init_spd(graph, seed=init_seed, init=init)
    tie_rng = np.random.default_rng(tie_seed) if tie == "random" else None

    lin = assignment.linear()
    k = assignment.width * assignment.height
    trace = SimTrace(state_names=STATE_NAMES, width=assignment.width,
                     height=assignment.height, time_label="round")

    def cell_counts(strategies: np.ndarray) -> np.ndarray:
        return np.bincount(strategies.astype(np.int64) * k + lin,
                           minlength=2 * k).reshape(2, k)

    trace.append(0.0, cell_counts(state.strategies))
    for rnd in range(1, max_rounds + 1):
        payoffs = play_round(graph, state.strategies, T=T, eps=eps)
        nxt = update_strategies(graph, state.strategies, payoffs,
                                tie=tie, rng=tie_rng)
        trace.append(float(rnd), cell_counts(nxt))
        changed = not np.array_equal(nxt, state.strategies)
        state = SpdState(strategies=nxt, round=rnd, payoffs=payoffs)
        if not changed:
            break
    return trace
