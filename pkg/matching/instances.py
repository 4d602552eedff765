"""Instance text format.

Line 1 is ``n s m``; then ``m`` lines ``u v w`` (0-based, decimal,
whitespace separated, LF line endings). Writing is deterministic: edges come
out in CSR order, so the same graph always produces the same bytes.
"""
import logging
from pathlib import Path

import numpy as np

from .exceptions import InvalidGraphError
from .graph import WeightedBipartiteGraph, build_graph

logger = logging.getLogger(__name__)


def parse_instance(text: str) -> WeightedBipartiteGraph:
    """Parse the instance text format into a graph."""
    lines = text.split("\n", 1)
    header = lines[0].split()
    if len(header) != 3:
        raise InvalidGraphError("Instance header must be 'n s m'.")
    try:
        n, s, m = (int(token) for token in header)
    except ValueError as exc:
        raise InvalidGraphError(f"Instance header is not numeric: {lines[0]!r}") from exc

    body = lines[1] if len(lines) > 1 else ""
    try:
        values = np.array(body.split(), dtype=np.int64)
    except (ValueError, OverflowError) as exc:
        raise InvalidGraphError("Edge lines must contain 64-bit integers only.") from exc
    if values.size != 3 * m:
        raise InvalidGraphError(
            f"Header announces {m} edges but the body holds {values.size / 3:g}."
        )
    return build_graph(n, s, values.reshape(-1, 3))


def read_instance(path) -> WeightedBipartiteGraph:
    path = Path(path)
    try:
        text = path.read_text(encoding="ascii")
    except (OSError, UnicodeDecodeError) as exc:
        raise InvalidGraphError(f"Cannot read instance file '{path}': {exc}") from exc
    graph = parse_instance(text)
    logger.debug("Read %r from %s", graph, path)
    return graph


def format_instance(graph: WeightedBipartiteGraph) -> str:
    rows = np.column_stack((graph.arc_tails, graph.neighbors, graph.weights))
    lines = [f"{graph.n} {graph.s} {graph.m}"]
    lines.extend(f"{u} {v} {w}" for u, v, w in rows.tolist())
    return "\n".join(lines) + "\n"


def write_instance(graph: WeightedBipartiteGraph, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="ascii", newline="\n") as handle:
        handle.write(format_instance(graph))
    logger.info("Wrote %r to %s", graph, path)
