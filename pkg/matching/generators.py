"""Random instance generation: two graph models, three weight models.

Every draw comes from ``numpy.random.Generator(PCG64(seed))``. PCG64 is a
permuted congruential generator (128-bit state, 64-bit output) whose stream
numpy keeps stable across platforms, so a seed pins the instance bytes.
"""
from __future__ import annotations

import logging
import math
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .exceptions import InvalidParameterError
from .graph import WeightedBipartiteGraph

logger = logging.getLogger(__name__)

WEIGHT_MAX = 100000
LOW_WEIGHT_MAX = 1000

GRAPH_MODELS = ("erdos_renyi", "dispersed_degree")
WEIGHT_MODELS = ("uniform", "uniform_low_high", "low_or_high")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


def round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


def max_radius(s: int, d: float) -> int:
    """Largest integral radius keeping degrees inside [0, s]."""
    return int(math.floor(s * min(d, 1 - d) + 1e-9))


class GenSpec(BaseModel):
    """Parameters of one random instance."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    model: Literal["erdos_renyi", "dispersed_degree"]
    n: int = Field(ge=1)
    s: int = Field(ge=1)
    d: float = Field(ge=0.0, le=1.0)
    r_norm: float = Field(default=0.0, ge=0.0, le=1.0)
    weight_model: Literal["uniform", "uniform_low_high", "low_or_high"] = "uniform"
    p_low: float = Field(default=0.5, ge=0.0, le=1.0)
    seed: int = Field(default=0, ge=0, lt=2**64)

    @property
    def radius(self) -> int:
        """Absolute dispersion radius derived from ``r_norm``."""
        bound = self.s * min(self.d, 1 - self.d)
        return min(round_half_up(self.r_norm * bound), max_radius(self.s, self.d))


def _csr_from_rows(n: int, s: int, rows: list[np.ndarray]) -> WeightedBipartiteGraph:
    degrees = np.fromiter((row.size for row in rows), dtype=np.int64, count=n)
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(degrees, out=offsets[1:])
    neighbors = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64)
    weights = np.zeros(neighbors.size, dtype=np.int64)
    return WeightedBipartiteGraph.from_csr(n, s, offsets, neighbors, weights)


def erdos_renyi(n: int, s: int, d: float, seed: int) -> WeightedBipartiteGraph:
    """Keep each of the n·s possible edges independently with probability d."""
    if not 0.0 <= d <= 1.0:
        raise InvalidParameterError(f"Density must lie in [0, 1], got {d}.")
    rng = make_rng(seed)
    rows = [np.flatnonzero(rng.random(s) < d).astype(np.int64) for _ in range(n)]
    return _csr_from_rows(n, s, rows)


def dispersed_degree(n: int, s: int, d: float, r: int, seed: int) -> WeightedBipartiteGraph:
    """Degrees uniform on [round(d·s) - r, round(d·s) + r], neighbours a uniform subset."""
    if not 0.0 <= d <= 1.0:
        raise InvalidParameterError(f"Density must lie in [0, 1], got {d}.")
    if r < 0 or r > s * min(d, 1 - d) + 1e-9:
        raise InvalidParameterError(
            f"Dispersion radius {r} is outside [0, {s * min(d, 1 - d):g}] for s={s}, d={d}."
        )
    centre = round_half_up(d * s)
    low, high = max(0, centre - r), min(s, centre + r)
    rng = make_rng(seed)
    degrees = rng.integers(low, high, endpoint=True, size=n)
    rows = [
        np.sort(rng.choice(s, size=int(degree), replace=False)).astype(np.int64)
        for degree in degrees
    ]
    return _csr_from_rows(n, s, rows)


# ---------------------------------------------------------------------------
# Weight models
# ---------------------------------------------------------------------------

def assign_uniform_weights(graph: WeightedBipartiteGraph, seed: int) -> WeightedBipartiteGraph:
    rng = make_rng(seed)
    return graph.with_weights(rng.integers(1, WEIGHT_MAX, endpoint=True, size=graph.m))


def _low_mask(rng: np.random.Generator, m: int, p_low: float) -> np.ndarray:
    if not 0.0 <= p_low <= 1.0:
        raise InvalidParameterError(f"Low-weight probability must lie in [0, 1], got {p_low}.")
    return rng.random(m) < p_low


def assign_uniform_low_high(graph: WeightedBipartiteGraph, p_low: float,
                            seed: int) -> WeightedBipartiteGraph:
    """Low part uniform on {1..1000}, high part uniform on {1001..100000}."""
    rng = make_rng(seed)
    low = _low_mask(rng, graph.m, p_low)
    low_values = rng.integers(1, LOW_WEIGHT_MAX, endpoint=True, size=graph.m)
    high_values = rng.integers(LOW_WEIGHT_MAX + 1, WEIGHT_MAX, endpoint=True, size=graph.m)
    return graph.with_weights(np.where(low, low_values, high_values))


def assign_low_or_high(graph: WeightedBipartiteGraph, p_low: float,
                       seed: int) -> WeightedBipartiteGraph:
    """Every weight is exactly 1 (low part) or exactly 100000 (high part)."""
    rng = make_rng(seed)
    low = _low_mask(rng, graph.m, p_low)
    return graph.with_weights(np.where(low, 1, WEIGHT_MAX))


def generate_instance(spec: GenSpec) -> WeightedBipartiteGraph:
    """Build the weighted instance described by ``spec``."""
    structure_seed, weight_seed = (
        int(x) for x in np.random.SeedSequence(spec.seed).generate_state(2, dtype=np.uint64)
    )
    if spec.model == "erdos_renyi":
        graph = erdos_renyi(spec.n, spec.s, spec.d, structure_seed)
    else:
        graph = dispersed_degree(spec.n, spec.s, spec.d, spec.radius, structure_seed)

    if spec.weight_model == "uniform":
        graph = assign_uniform_weights(graph, weight_seed)
    elif spec.weight_model == "uniform_low_high":
        graph = assign_uniform_low_high(graph, spec.p_low, weight_seed)
    else:
        graph = assign_low_or_high(graph, spec.p_low, weight_seed)

    logger.info("Generated %r (%s, %s, seed=%s)", graph, spec.model, spec.weight_model, spec.seed)
    return graph
