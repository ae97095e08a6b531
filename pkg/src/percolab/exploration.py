"""Adaptive edge-revealing explorations and pivotality for the avoidance event.

An exploration reveals the edges of a ball one at a time; the next edge to
reveal may depend only on the edges already revealed and their states.  The
default rule is cluster-first: keep revealing the smallest-index unrevealed
edge touching the currently known open cluster of the origin, and once that
cluster is complete, sweep the remaining edges in index order.

The event of interest throughout is *avoidance*: the origin's cluster
contains no green vertex.  An edge is pivotal when flipping it (ghost fixed)
changes the avoidance indicator.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import cluster_of_origin
from .lattices import GraphBall


@dataclass(frozen=True)
class ExplorationTrace:
    """Revealed prefix of an exploration: edge order and observed states."""

    order: tuple = ()
    values: tuple = ()

    def __post_init__(self):
        if len(self.order) != len(self.values):
            raise ValueError("order and values must have equal length")
        if len(set(self.order)) != len(self.order):
            raise ValueError("revealed edges must be distinct")

    @property
    def k(self) -> int:
        return len(self.order)

    def extend(self, edge: int, value: int) -> "ExplorationTrace":
        return ExplorationTrace(self.order + (edge,), self.values + (int(value),))


def revealed_open_cluster(ball: GraphBall, trace: ExplorationTrace) -> set:
    """Vertices joined to the origin by revealed-open edges of the trace."""
    open_adj = {}
    for e, x in zip(trace.order, trace.values):
        if x:
            i, j = ball.edges[e]
            open_adj.setdefault(i, []).append(j)
            open_adj.setdefault(j, []).append(i)
    seen = {ball.origin}
    queue = [ball.origin]
    while queue:
        v = queue.pop()
        for w in open_adj.get(v, ()):
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


class ClusterFirstRule:
    """Reveal the origin's cluster first, then everything else, smallest index wins."""

    def next_edge(self, ball: GraphBall, trace: ExplorationTrace):
        if trace.k >= ball.n_edges:
            return None
        revealed = set(trace.order)
        cluster = revealed_open_cluster(ball, trace)
        fallback = None
        for e, (i, j) in enumerate(ball.edges):
            if e in revealed:
                continue
            if i in cluster or j in cluster:
                return e
            if fallback is None:
                fallback = e
        return fallback


CLUSTER_FIRST = ClusterFirstRule()


def cluster_first_next(ball: GraphBall, trace: ExplorationTrace):
    """Next edge under the cluster-first rule, or None when exhausted."""
    return CLUSTER_FIRST.next_edge(ball, trace)


def run_exploration(ball: GraphBall, rule, config: np.ndarray) -> ExplorationTrace:
    """Reveal every edge of ``config`` in the order chosen by ``rule``."""
    trace = ExplorationTrace()
    while True:
        e = rule.next_edge(ball, trace)
        if e is None:
            return trace
        trace = trace.extend(e, int(config[e]))


def validate_trace(ball: GraphBall, rule, trace: ExplorationTrace) -> None:
    """Replay the rule on the trace; raise ValueError on any mismatch."""
    prefix = ExplorationTrace()
    for e, x in zip(trace.order, trace.values):
        expected = rule.next_edge(ball, prefix)
        if expected != e:
            raise ValueError(
                f"trace is inconsistent with the rule at step {prefix.k}: "
                f"recorded edge {e}, rule chooses {expected}")
        prefix = prefix.extend(e, x)


@dataclass(frozen=True)
class PivotalQuery:
    """One pivotality question: flip ``edge`` in ``config`` with ``ghost`` fixed."""

    edge: int
    config: np.ndarray
    ghost: np.ndarray


def is_pivotal_avoidance(ball: GraphBall, config: np.ndarray,
                         ghost: np.ndarray, edge: int) -> bool:
    """Does flipping ``edge`` change whether the origin cluster avoids green?"""
    lo = np.array(config, dtype=np.uint8)
    hi = np.array(config, dtype=np.uint8)
    lo[edge] = 0
    hi[edge] = 1
    avoid_lo = _avoids_green(ball, lo, ghost)
    avoid_hi = _avoids_green(ball, hi, ghost)
    return avoid_lo != avoid_hi


def evaluate_pivotal_query(ball: GraphBall, query: PivotalQuery) -> bool:
    return is_pivotal_avoidance(ball, query.config, query.ghost, query.edge)


def _avoids_green(ball, config, ghost):
    members = cluster_of_origin(ball, config).members
    return not any(ghost[v] for v in members)


def pivotal_ghost_weight(ball: GraphBall, config: np.ndarray,
                         edge: int, h: float) -> float:
    """Ghost-averaged pivotality probability of ``edge`` given the other edges.

    With the edge forced closed the cluster is C-; forced open it is C+ and
    D = C+ \\ C-.  The edge is pivotal exactly when C- has no green vertex
    but D does, so the probability is e^{-h|C-|} (1 - e^{-h|D|}).
    """
    if h < 0:
        raise ValueError("h must be nonnegative")
    lo = np.array(config, dtype=np.uint8)
    hi = np.array(config, dtype=np.uint8)
    lo[edge] = 0
    hi[edge] = 1
    s_lo = cluster_of_origin(ball, lo).size
    s_hi = cluster_of_origin(ball, hi).size
    d = s_hi - s_lo
    if d == 0:
        return 0.0
    return math.exp(-h * s_lo) * -math.expm1(-h * d)


def trace_to_json(trace: ExplorationTrace) -> list:
    """Trace as a list of [edge index, revealed bit] pairs."""
    return [[int(e), int(x)] for e, x in zip(trace.order, trace.values)]


def trace_from_json(data, ball: GraphBall = None, rule=None) -> ExplorationTrace:
    """Rebuild a trace; optionally validate it against a ball and rule."""
    order = tuple(int(e) for e, _ in data)
    values = tuple(int(x) for _, x in data)
    trace = ExplorationTrace(order, values)
    if ball is not None and rule is not None:
        validate_trace(ball, rule, trace)
    return trace
