"""Balance an unbalanced instance (n > s) for the perfect-matching solvers.

``double``: left = U ⊔ V', right = V ⊔ U'. Every edge uv appears as (u, v)
and mirrored as (v', u') with the same weight, and each u gets a zero-weight
bridge (u, u'). A minimum perfect matching there weighs exactly twice the
minimum V-covering matching of the original, and its U×V part is one.

``pad``: add n - s dummy right vertices joined to every u at weight 0.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .conf import matching_setting
from .exceptions import InvalidMatchingError, InvalidParameterError
from .graph import Matching, WeightedBipartiteGraph, build_graph

logger = logging.getLogger(__name__)

REDUCTIONS = ("double", "pad")


@dataclass(frozen=True)
class ReductionMapping:
    """How a balanced graph relates back to the instance it came from."""

    kind: Literal["identity", "double", "pad"]
    n: int
    s: int


def _check_sides(graph: WeightedBipartiteGraph) -> None:
    if graph.n < graph.s:
        raise InvalidParameterError(
            f"Reductions need n >= s (got n={graph.n}, s={graph.s}); V must be the smaller side."
        )


def double_balanced(graph: WeightedBipartiteGraph) -> tuple[WeightedBipartiteGraph, ReductionMapping]:
    """Mirror-and-bridge doubling; balanced input passes through unchanged."""
    _check_sides(graph)
    n, s = graph.n, graph.s
    if n == s:
        return graph, ReductionMapping("identity", n, s)

    tails, heads, weights = graph.arc_tails, graph.neighbors, graph.weights
    bridges = np.arange(n, dtype=np.int64)
    left = np.concatenate((tails, n + heads, bridges))
    right = np.concatenate((heads, s + tails, s + bridges))
    cost = np.concatenate((weights, weights, np.zeros(n, dtype=np.int64)))
    doubled = build_graph(n + s, s + n, np.column_stack((left, right, cost)))
    logger.debug("Doubled %r into %r", graph, doubled)
    return doubled, ReductionMapping("double", n, s)


def pad_balanced(graph: WeightedBipartiteGraph) -> tuple[WeightedBipartiteGraph, ReductionMapping]:
    """Dummy padding of V; balanced input passes through unchanged."""
    _check_sides(graph)
    n, s = graph.n, graph.s
    if n == s:
        return graph, ReductionMapping("identity", n, s)

    dummy_count = n - s
    dummy_tails = np.repeat(np.arange(n, dtype=np.int64), dummy_count)
    dummy_heads = np.tile(np.arange(s, n, dtype=np.int64), n)
    left = np.concatenate((graph.arc_tails, dummy_tails))
    right = np.concatenate((graph.neighbors, dummy_heads))
    cost = np.concatenate((graph.weights, np.zeros(dummy_tails.size, dtype=np.int64)))
    padded = build_graph(n, n, np.column_stack((left, right, cost)))
    logger.debug("Padded %r into %r", graph, padded)
    return padded, ReductionMapping("pad", n, s)


def prepare_balanced(graph: WeightedBipartiteGraph, method: str | None = None):
    """Apply the configured reduction (``double`` unless told otherwise)."""
    method = method or matching_setting("MATCHING_DEFAULT_REDUCTION")
    if method == "double":
        return double_balanced(graph)
    if method == "pad":
        return pad_balanced(graph)
    raise InvalidParameterError(f"Unknown reduction {method!r}; choose one of {REDUCTIONS}.")


def project_matching(balanced_matching: Matching, mapping: ReductionMapping) -> Matching:
    """Keep the pairs of the original U×V; the input must be perfect."""
    size = len(balanced_matching.match_of_v)
    if balanced_matching.size != size or len(balanced_matching.match_of_u) != size:
        raise InvalidMatchingError(
            f"Projection needs a perfect matching ({balanced_matching.size} of {size} matched)."
        )
    if mapping.kind == "identity":
        return balanced_matching.copy()
    pairs = [(u, v) for u, v in balanced_matching.pairs() if u < mapping.n and v < mapping.s]
    return Matching.from_pairs(mapping.n, mapping.s, pairs)


def solve_reduced(graph: WeightedBipartiteGraph, method: str | None, runner):
    """Balance ``graph``, run ``runner`` on the result, project back.

    ``runner`` takes the balanced graph and returns a ``SolverRun``; the
    returned run carries the projected matching.
    """
    balanced, mapping = prepare_balanced(graph, method)
    run = runner(balanced)
    run.matching = project_matching(run.matching, mapping)
    return run
