"""Weighted bipartite instances, matchings and ε-complementary slackness.

Left vertices ``U`` are ``0..n-1`` (persons), right vertices ``V`` are
``0..s-1`` (objects). Adjacency is stored in compressed form: the
neighbours of ``u`` are ``neighbors[offsets[u]:offsets[u + 1]]``, sorted by
``v`` ascending, with the matching ``weights`` slice alongside.

Prices are plain ``numpy.int64`` arrays indexed by right vertex; nothing in
this package uses floating point on prices or weights.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .exceptions import InvalidGraphError

logger = logging.getLogger(__name__)

# A price vector over V (or over U ⊔ V in the faithful push-relabel solver).
PriceVector = np.ndarray

_INT = np.int64
_SENTINEL = np.iinfo(np.int64).max


@dataclass(frozen=True, eq=False)
class WeightedBipartiteGraph:
    """Immutable integer-weighted bipartite instance in CSR form."""

    n: int
    s: int
    offsets: np.ndarray
    neighbors: np.ndarray
    weights: np.ndarray
    max_abs_weight: int

    @classmethod
    def from_csr(cls, n, s, offsets, neighbors, weights) -> "WeightedBipartiteGraph":
        """Wrap already-sorted CSR arrays (trusted input, no duplicate scan)."""
        offsets = np.ascontiguousarray(offsets, dtype=_INT)
        neighbors = np.ascontiguousarray(neighbors, dtype=_INT)
        weights = np.ascontiguousarray(weights, dtype=_INT)
        for array in (offsets, neighbors, weights):
            array.setflags(write=False)
        # Python ints: np.abs wraps on the int64 minimum.
        max_abs = max(abs(int(weights.max())), abs(int(weights.min()))) if weights.size else 0
        return cls(n=int(n), s=int(s), offsets=offsets, neighbors=neighbors,
                   weights=weights, max_abs_weight=max_abs)

    @property
    def m(self) -> int:
        return int(self.neighbors.size)

    @property
    def is_balanced(self) -> bool:
        return self.n == self.s

    def degree(self, u: int) -> int:
        return int(self.offsets[u + 1] - self.offsets[u])

    def adjacency(self, u: int) -> tuple[np.ndarray, np.ndarray]:
        """Neighbours of ``u`` and the weights of the connecting edges."""
        start, end = self.offsets[u], self.offsets[u + 1]
        return self.neighbors[start:end], self.weights[start:end]

    def arc_index(self, u: int, v: int) -> int | None:
        """Position of edge ``uv`` in the CSR arrays, or None."""
        start, end = int(self.offsets[u]), int(self.offsets[u + 1])
        row = self.neighbors[start:end]
        pos = int(np.searchsorted(row, v))
        if pos < row.size and row[pos] == v:
            return start + pos
        return None

    def has_edge(self, u: int, v: int) -> bool:
        if not (0 <= u < self.n and 0 <= v < self.s):
            return False
        return self.arc_index(u, v) is not None

    def weight(self, u: int, v: int) -> int:
        index = self.arc_index(u, v) if 0 <= u < self.n and 0 <= v < self.s else None
        if index is None:
            raise InvalidGraphError(f"({u}, {v}) is not an edge of the graph.")
        return int(self.weights[index])

    def edges(self) -> Iterator[tuple[int, int, int]]:
        """Yield ``(u, v, w)`` in CSR order (u ascending, then v ascending)."""
        for u in range(self.n):
            start, end = int(self.offsets[u]), int(self.offsets[u + 1])
            for index in range(start, end):
                yield u, int(self.neighbors[index]), int(self.weights[index])

    @cached_property
    def arc_tails(self) -> np.ndarray:
        """Left endpoint of every CSR position."""
        return np.repeat(np.arange(self.n, dtype=_INT), np.diff(self.offsets))

    @cached_property
    def right_adjacency(self) -> list[tuple[list[int], list[int]]]:
        """Per right vertex: (left neighbours, weights), as Python lists."""
        order = np.lexsort((self.arc_tails, self.neighbors))
        counts = np.bincount(self.neighbors, minlength=self.s)
        bounds = np.concatenate(([0], np.cumsum(counts)))
        tails = self.arc_tails[order].tolist()
        weights = self.weights[order].tolist()
        return [
            (tails[bounds[v]:bounds[v + 1]], weights[bounds[v]:bounds[v + 1]])
            for v in range(self.s)
        ]

    def with_weights(self, weights: Sequence[int] | np.ndarray) -> "WeightedBipartiteGraph":
        """Same structure, new weights given in CSR order."""
        weights = np.asarray(weights, dtype=_INT)
        if weights.shape != self.neighbors.shape:
            raise InvalidGraphError(
                f"Expected {self.m} weights, got {weights.size}."
            )
        return WeightedBipartiteGraph.from_csr(
            self.n, self.s, self.offsets, self.neighbors, weights
        )

    def scaled(self, factor: int) -> "WeightedBipartiteGraph":
        factor = int(factor)
        if self.max_abs_weight * abs(factor) > _SENTINEL:
            raise InvalidGraphError(f"Scaling {self!r} by {factor} overflows int64 weights.")
        return self.with_weights(self.weights * factor)

    def __repr__(self):
        return f"<WeightedBipartiteGraph n={self.n} s={self.s} m={self.m} W={self.max_abs_weight}>"


def build_graph(n: int, s: int, edges: Iterable[Sequence[int]] | np.ndarray) -> WeightedBipartiteGraph:
    """Validate an edge list and build the compressed instance."""
    if n < 1 or s < 1:
        raise InvalidGraphError(f"Both sides need at least one vertex (got n={n}, s={s}).")
    if not isinstance(edges, np.ndarray):
        edges = list(edges)
    data = np.asarray(edges, dtype=_INT).reshape(-1, 3)
    us, vs, ws = data[:, 0], data[:, 1], data[:, 2]

    bad = (us < 0) | (us >= n) | (vs < 0) | (vs >= s)
    if bad.any():
        u, v, _ = data[int(np.argmax(bad))]
        raise InvalidGraphError(f"Edge ({u}, {v}) has an index out of range for n={n}, s={s}.")

    order = np.lexsort((vs, us))
    us, vs, ws = us[order], vs[order], ws[order]
    if us.size > 1:
        repeated = (us[1:] == us[:-1]) & (vs[1:] == vs[:-1])
        if repeated.any():
            index = int(np.argmax(repeated))
            raise InvalidGraphError(f"Duplicate edge ({us[index]}, {vs[index]}).")

    offsets = np.zeros(n + 1, dtype=_INT)
    np.cumsum(np.bincount(us, minlength=n), out=offsets[1:])
    return WeightedBipartiteGraph.from_csr(n, s, offsets, vs, ws)


# ---------------------------------------------------------------------------
# Matchings
# ---------------------------------------------------------------------------

@dataclass
class Matching:
    """Partial assignment between U and V, kept mutually consistent."""

    match_of_u: list[int | None]
    match_of_v: list[int | None]
    size: int = field(default=0)

    @classmethod
    def empty(cls, n: int, s: int) -> "Matching":
        return cls(match_of_u=[None] * n, match_of_v=[None] * s, size=0)

    @classmethod
    def from_pairs(cls, n: int, s: int, pairs: Iterable[tuple[int, int]]) -> "Matching":
        matching = cls.empty(n, s)
        for u, v in pairs:
            matching.assign(u, v)
        return matching

    def assign(self, u: int, v: int) -> int | None:
        """Match ``u`` with ``v``; return the left vertex ``v`` was taken from."""
        displaced = self.match_of_v[v]
        if displaced is not None:
            self.match_of_u[displaced] = None
            self.size -= 1
        previous_v = self.match_of_u[u]
        if previous_v is not None:
            self.match_of_v[previous_v] = None
            self.size -= 1
        self.match_of_u[u] = v
        self.match_of_v[v] = u
        self.size += 1
        return displaced

    def pairs(self) -> list[tuple[int, int]]:
        """Matched pairs ``(u, v)`` ordered by ``u``."""
        return [(u, v) for u, v in enumerate(self.match_of_u) if v is not None]

    def copy(self) -> "Matching":
        return Matching(list(self.match_of_u), list(self.match_of_v), self.size)


# ---------------------------------------------------------------------------
# Reduced costs and ε-complementary slackness
# ---------------------------------------------------------------------------

def density(graph: WeightedBipartiteGraph) -> Fraction:
    """|E| / (n·s)."""
    return Fraction(graph.m, graph.n * graph.s)


def reduced_cost(graph: WeightedBipartiteGraph, prices: PriceVector, u: int, v: int) -> int:
    return graph.weight(u, v) - int(prices[v])


def best_and_second(graph: WeightedBipartiteGraph, prices: PriceVector, u: int,
                    single_neighbor_gap: int) -> tuple[int, int, int, int]:
    """Scan ``u``'s neighbourhood for the two smallest reduced costs.

    Returns ``(v, arc, best, second)``. Ties go to the lowest ``v``; a lone
    neighbour gets ``second = best + single_neighbor_gap``. The caller
    guarantees ``u`` has at least one neighbour.
    """
    start, end = int(graph.offsets[u]), int(graph.offsets[u + 1])
    nbrs = graph.neighbors[start:end]
    costs = graph.weights[start:end] - prices[nbrs]
    position = int(costs.argmin())
    best = int(costs[position])
    if costs.size == 1:
        second = best + single_neighbor_gap
    else:
        costs[position] = _SENTINEL
        second = int(costs.min())
    return int(nbrs[position]), start + position, best, second


def _row_minimums(graph: WeightedBipartiteGraph, prices: PriceVector) -> tuple[np.ndarray, np.ndarray]:
    """Per-arc reduced costs and the minimum over each left vertex's row."""
    costs = graph.weights - prices[graph.neighbors]
    mins = np.full(graph.n, _SENTINEL, dtype=_INT)
    np.minimum.at(mins, graph.arc_tails, costs)
    return costs, mins


def check_eps_cs(graph: WeightedBipartiteGraph, prices: PriceVector,
                 matching: Matching, eps: int) -> bool:
    """True iff every matched edge is within ``eps`` of its row minimum."""
    if matching.size == 0:
        return True
    _, mins = _row_minimums(graph, prices)
    for u, v in matching.pairs():
        if reduced_cost(graph, prices, u, v) > int(mins[u]) + eps:
            return False
    return True


def matching_weight(graph: WeightedBipartiteGraph, matching: Matching) -> int:
    return sum(graph.weight(u, v) for u, v in matching.pairs())


def validate_matching(graph: WeightedBipartiteGraph, matching: Matching,
                      require_perfect: bool = False) -> str | None:
    """Return an error string for the first broken invariant, else None.

    ``require_perfect`` asks for V-coverage: every right vertex matched.
    """
    if len(matching.match_of_u) != graph.n or len(matching.match_of_v) != graph.s:
        return "matching dimensions do not match the graph"
    matched = 0
    for v, u in enumerate(matching.match_of_v):
        if u is None:
            continue
        if not 0 <= u < graph.n or matching.match_of_u[u] != v:
            return f"inconsistent pair at right vertex {v}"
        if not graph.has_edge(u, v):
            return f"({u}, {v}) is not an edge"
        matched += 1
    for u, v in enumerate(matching.match_of_u):
        if v is not None and (not 0 <= v < graph.s or matching.match_of_v[v] != u):
            return f"inconsistent pair at left vertex {u}"
    if matched != matching.size:
        return f"size {matching.size} does not equal {matched} matched right vertices"
    if require_perfect and matched != graph.s:
        uncovered = next(v for v, u in enumerate(matching.match_of_v) if u is None)
        return f"uncovered right vertex {uncovered}"
    return None
