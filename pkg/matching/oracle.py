"""Exhaustive reference solver for small instances."""
from __future__ import annotations

import logging
from typing import NamedTuple

from .conf import matching_setting
from .exceptions import InstanceTooLargeError
from .graph import Matching, WeightedBipartiteGraph

logger = logging.getLogger(__name__)


class OracleResult(NamedTuple):
    matching: Matching
    weight: int


def brute_force_optimum(graph: WeightedBipartiteGraph, max_side: int | None = None) -> OracleResult | None:
    """Minimum-weight matching covering V by enumeration, or None if none exists.

    Right vertices are assigned in index order, each trying its neighbours
    in ascending order; among equal-weight optima the lexicographically
    lowest assignment (by the left vertex of v0, then v1, ...) wins.
    """
    bound = max_side if max_side is not None else matching_setting("MATCHING_ORACLE_MAX_SIDE")
    if graph.s > bound:
        raise InstanceTooLargeError(
            f"Oracle enumerates at most {bound} right vertices, got s={graph.s}."
        )

    options = [list(zip(tails, weights)) for tails, weights in graph.right_adjacency]
    if any(not row for row in options):
        return None
    # Cheapest possible completion from position k on.
    remaining = [0] * (graph.s + 1)
    for v in range(graph.s - 1, -1, -1):
        remaining[v] = remaining[v + 1] + min(w for _, w in options[v])

    best_weight = None
    best_choice: list[int] = []
    choice = [0] * graph.s
    used = [False] * graph.n

    def search(v: int, partial: int) -> None:
        nonlocal best_weight, best_choice
        if best_weight is not None and partial + remaining[v] >= best_weight:
            return
        if v == graph.s:
            best_weight, best_choice = partial, list(choice)
            return
        for u, w in options[v]:
            if used[u]:
                continue
            used[u] = True
            choice[v] = u
            search(v + 1, partial + w)
            used[u] = False

    search(0, 0)
    if best_weight is None:
        logger.debug("Oracle found no covering matching for %r", graph)
        return None
    matching = Matching.from_pairs(graph.n, graph.s, ((u, v) for v, u in enumerate(best_choice)))
    return OracleResult(matching=matching, weight=best_weight)
