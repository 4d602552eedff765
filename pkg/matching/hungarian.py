"""Successive shortest paths (Hungarian method) with dual potentials.

Each right vertex is augmented in turn along a shortest path of reduced
costs found by a binary-heap Dijkstra over the left side. Unbalanced graphs
(n > s) need no reduction: exactly s augmentations cover V. Weights are
used as given; no scaling.
"""
from __future__ import annotations

import heapq
import logging
import time
from dataclasses import dataclass

import numpy as np

from .auction import DEADLINE_POLL, feasibility_precheck
from .conf import invariants_enabled
from .exceptions import InfeasibleInstanceError, InvariantViolationError
from .graph import Matching, WeightedBipartiteGraph
from .scaling import Deadline, SolverRun, SolveStats

logger = logging.getLogger(__name__)


@dataclass
class DualPotentials:
    """y_u over the left side, y_v over the right; y_u + y_v <= w on edges."""

    y_u: list[int]
    y_v: list[int]

    @classmethod
    def initial(cls, graph: WeightedBipartiteGraph) -> "DualPotentials":
        y_v = []
        for v, (_, weights) in enumerate(graph.right_adjacency):
            if not weights:
                raise InfeasibleInstanceError(f"Right vertex {v} has no neighbours.")
            y_v.append(min(weights))
        return cls(y_u=[0] * graph.n, y_v=y_v)

    def slack(self, graph: WeightedBipartiteGraph) -> np.ndarray:
        """w - y_u - y_v per edge, in CSR order."""
        y_u = np.asarray(self.y_u, dtype=np.int64)
        y_v = np.asarray(self.y_v, dtype=np.int64)
        return graph.weights - y_u[graph.arc_tails] - y_v[graph.neighbors]

    def is_feasible(self, graph: WeightedBipartiteGraph) -> bool:
        return bool((self.slack(graph) >= 0).all())

    def is_tight(self, graph: WeightedBipartiteGraph, matching: Matching) -> bool:
        return all(
            self.y_u[u] + self.y_v[v] == graph.weight(u, v) for u, v in matching.pairs()
        )

    def objective(self) -> int:
        """Dual value once V is covered: sum of y_v plus the matched y_u."""
        return sum(self.y_v) + sum(self.y_u)


def _augment(graph: WeightedBipartiteGraph, duals: DualPotentials, matching: Matching,
             root: int) -> int:
    """Grow ``matching`` by one along a shortest path from free right vertex ``root``.

    Returns the number of left vertices settled by the search.
    """
    adjacency = graph.right_adjacency
    y_u, y_v = duals.y_u, duals.y_v
    match_of_u = matching.match_of_u

    dist: dict[int, int] = {}
    pred: dict[int, int] = {}
    settled_rows = [(root, 0)]
    settled_cols: list[int] = []
    done: set[int] = set()
    heap: list[tuple[int, int]] = []

    def scan(row: int, offset: int) -> None:
        base = offset - y_v[row]
        tails, weights = adjacency[row]
        for u, w in zip(tails, weights):
            if u in done:
                continue
            candidate = base + w - y_u[u]
            if candidate < dist.get(u, candidate + 1):
                dist[u] = candidate
                pred[u] = row
                heapq.heappush(heap, (candidate, u))

    scan(root, 0)
    sink = None
    while heap:
        distance, u = heapq.heappop(heap)
        if u in done or distance > dist[u]:
            continue
        done.add(u)
        settled_cols.append(u)
        row = match_of_u[u]
        if row is None:
            sink = u
            break
        settled_rows.append((row, distance))
        scan(row, distance)

    if sink is None:
        raise InfeasibleInstanceError(
            f"No augmenting path from right vertex {root}; no matching covers V."
        )

    reach = dist[sink]
    for row, distance in settled_rows:
        y_v[row] += reach - distance
    for u in settled_cols:
        y_u[u] -= reach - dist[u]

    u = sink
    while True:
        row = pred[u]
        previous = matching.match_of_v[row]
        matching.assign(u, row)
        if previous is None:
            break
        u = previous
    return len(settled_cols)


def run_hungarian(graph: WeightedBipartiteGraph, *, check_invariants: bool | None = None,
                  deadline=None) -> SolverRun:
    """Augment once per right vertex; no feasibility precheck."""
    started = time.perf_counter()
    check = invariants_enabled(check_invariants)
    deadline = Deadline.coerce(deadline)

    duals = DualPotentials.initial(graph)
    matching = Matching.empty(graph.n, graph.s)
    stats = SolveStats(algorithm="hungarian")
    settled = 0
    for root in range(graph.s):
        before = matching.size
        settled += _augment(graph, duals, matching, root)
        stats.augmentations += 1
        if check:
            if matching.size != before + 1:
                raise InvariantViolationError(f"augmentation from {root} did not grow the matching")
            if not duals.is_feasible(graph) or not duals.is_tight(graph, matching):
                raise InvariantViolationError(f"dual potentials broken after augmenting {root}")
        if settled >= DEADLINE_POLL:
            settled = 0
            deadline.check()

    stats.seconds = time.perf_counter() - started
    return SolverRun(matching=matching, stats=stats, prices=duals)


def solve_hungarian(graph: WeightedBipartiteGraph, *, check_invariants: bool | None = None,
                    deadline=None) -> SolverRun:
    """``hungarian`` keeping the statistics and the final potentials."""
    if not feasibility_precheck(graph):
        raise InfeasibleInstanceError(f"No matching of {graph!r} covers every right vertex.")
    run = run_hungarian(graph, check_invariants=check_invariants, deadline=deadline)
    logger.info("Hungarian solved %r with %d augmentations (%.3fs)", graph,
                run.stats.augmentations, run.stats.seconds)
    return run


def hungarian(graph: WeightedBipartiteGraph, *, check_invariants: bool | None = None,
              deadline=None) -> Matching:
    """Minimum-weight matching covering every right vertex of ``graph``."""
    return solve_hungarian(graph, check_invariants=check_invariants, deadline=deadline).matching
