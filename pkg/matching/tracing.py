"""Step traces of the auction and push-relabel solvers, and their comparison.

Both solvers emit one ``TraceEvent`` per bid / double_push. Run under the
same ordering contract (FIFO over unassigned left vertices, ties to the
lowest right index) the two event streams are identical; ``compare_traces``
finds the first place where they are not.

Trace files hold one event per line: the nine comparable fields, tab
separated, decimal integers, ``-1`` for "nobody displaced".
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import zip_longest
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Protocol

from .exceptions import InvalidParameterError

logger = logging.getLogger(__name__)

TRACE_FIELDS = (
    "phase_index",
    "step_index",
    "selected_u",
    "best_v",
    "best_reduced_cost",
    "second_reduced_cost",
    "gamma",
    "new_price_v",
    "displaced_u",
)
TRACED_ALGORITHMS = ("auction", "gk", "gk-lean")


class TraceEvent(NamedTuple):
    phase_index: int
    step_index: int
    selected_u: int
    best_v: int
    best_reduced_cost: int
    second_reduced_cost: int
    gamma: int
    new_price_v: int
    displaced_u: int | None
    # Push-relabel only; not part of the comparable projection.
    left_price: int | None = None

    def comparable(self) -> tuple:
        return tuple(self[: len(TRACE_FIELDS)])

    def to_line(self) -> str:
        fields = list(self.comparable())
        if fields[-1] is None:
            fields[-1] = -1
        return "\t".join(str(value) for value in fields)

    @classmethod
    def from_line(cls, line: str) -> "TraceEvent":
        parts = line.rstrip("\n").split("\t")
        if len(parts) != len(TRACE_FIELDS):
            raise InvalidParameterError(
                f"Trace line has {len(parts)} fields, expected {len(TRACE_FIELDS)}."
            )
        try:
            values = [int(part) for part in parts]
        except ValueError as exc:
            raise InvalidParameterError(f"Trace line holds a non-integer field: {line!r}") from exc
        if values[-1] < 0:
            values[-1] = None
        return cls(*values)


class TraceSink(Protocol):
    def emit(self, event: TraceEvent) -> None: ...


class ListTraceSink:
    """Keep events in memory."""

    def __init__(self):
        self.events: list[TraceEvent] = []

    def emit(self, event: TraceEvent) -> None:
        self.events.append(event)

    def __iter__(self):
        return iter(self.events)

    def __len__(self):
        return len(self.events)


class FileTraceSink:
    """Append events to a trace file as they happen."""

    def __init__(self, path):
        self.path = Path(path)
        self.count = 0
        self._handle = None

    def __enter__(self):
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._handle = self.path.open("w", encoding="ascii", newline="\n")
        return self

    def __exit__(self, *exc_info):
        self._handle.close()
        self._handle = None
        logger.info("Wrote %d trace events to %s", self.count, self.path)

    def emit(self, event: TraceEvent) -> None:
        self._handle.write(event.to_line() + "\n")
        self.count += 1


def read_trace(path) -> Iterator[TraceEvent]:
    """Stream events back from a trace file."""
    with Path(path).open(encoding="ascii") as handle:
        for line in handle:
            if line.strip():
                yield TraceEvent.from_line(line)


def check_event(event: TraceEvent, old_price_v: int, eps: int) -> str | None:
    """Return the broken event invariant, if any."""
    if event.gamma != event.second_reduced_cost - event.best_reduced_cost or event.gamma < 0:
        return f"step {event.step_index}: gamma {event.gamma} is not second - best >= 0"
    if event.new_price_v != old_price_v - event.gamma - eps:
        return f"step {event.step_index}: new price {event.new_price_v} != old - gamma - eps"
    return None


# ---------------------------------------------------------------------------
# Recording and comparison
# ---------------------------------------------------------------------------

def record_trace(algorithm: str, graph, alpha=None, sink: TraceSink | None = None,
                 check_invariants: bool | None = None):
    """Solve ``graph`` with ``algorithm`` and return the recorded events.

    With a ``sink`` the events stream there and the sink is returned;
    otherwise a list of events comes back.
    """
    # Imported here: the solvers import this module for TraceEvent.
    from .auction import eps_scaling_auction  # noqa: PLC0415
    from .goldberg_kennedy import goldberg_kennedy  # noqa: PLC0415

    if algorithm not in TRACED_ALGORITHMS:
        raise InvalidParameterError(f"Cannot trace algorithm {algorithm!r}.")
    target = sink if sink is not None else ListTraceSink()
    if algorithm == "auction":
        eps_scaling_auction(graph, alpha, trace_sink=target, check_invariants=check_invariants)
    else:
        goldberg_kennedy(graph, alpha, trace_sink=target, check_invariants=check_invariants,
                         keep_redundant_state=(algorithm == "gk"))
    return target.events if sink is None else target


@dataclass(frozen=True)
class TraceComparison:
    """Result of comparing two traces; empty when they agree everywhere."""

    compared: int
    divergence_index: int | None = None
    left: TraceEvent | None = None
    right: TraceEvent | None = None

    @property
    def is_empty(self) -> bool:
        return self.divergence_index is None

    def describe(self) -> str:
        if self.is_empty:
            return f"traces identical ({self.compared} events)"
        left = self.left.to_line() if self.left else "<end of trace>"
        right = self.right.to_line() if self.right else "<end of trace>"
        return f"first divergence at event {self.divergence_index}\n< {left}\n> {right}"


def compare_traces(first: Iterable[TraceEvent], second: Iterable[TraceEvent]) -> TraceComparison:
    """Compare two event streams on their comparable projection."""
    index = -1
    for index, (left, right) in enumerate(zip_longest(first, second)):
        if left is None or right is None or left.comparable() != right.comparable():
            logger.info("Traces diverge at event %d", index)
            return TraceComparison(compared=index, divergence_index=index, left=left, right=right)
    return TraceComparison(compared=index + 1)
