"""One entry point for all solvers, plus best-effort persistence of runs."""
from __future__ import annotations

import logging
from dataclasses import dataclass

from .auction import solve_auction
from .exceptions import InvalidParameterError, MatchingError
from .goldberg_kennedy import solve_goldberg_kennedy
from .graph import Matching, WeightedBipartiteGraph, matching_weight, validate_matching
from .hungarian import solve_hungarian
from .scaling import SolveStats
from .tracing import TraceSink

logger = logging.getLogger(__name__)

ALGORITHMS = ("auction", "gk", "gk-lean", "hungarian")


@dataclass
class SolveResult:
    algorithm: str
    graph: WeightedBipartiteGraph
    matching: Matching
    weight: int
    stats: SolveStats

    def lines(self) -> list[str]:
        """``u v`` per matched pair, then ``weight W``."""
        out = [f"{u} {v}" for u, v in self.matching.pairs()]
        out.append(f"weight {self.weight}")
        return out


def run_solver(graph: WeightedBipartiteGraph, algorithm: str, *, alpha=None,
               reduction: str | None = None, scaling: bool = True,
               trace_sink: TraceSink | None = None, check_invariants: bool | None = None,
               deadline=None) -> SolveResult:
    """Solve ``graph`` with ``algorithm`` and check the result covers V."""
    if algorithm == "auction":
        run = solve_auction(graph, alpha, reduction=reduction, scaling=scaling,
                            trace_sink=trace_sink, check_invariants=check_invariants,
                            deadline=deadline)
    elif algorithm in ("gk", "gk-lean"):
        run = solve_goldberg_kennedy(graph, alpha, keep_redundant_state=(algorithm == "gk"),
                                     reduction=reduction, trace_sink=trace_sink,
                                     check_invariants=check_invariants, deadline=deadline)
    elif algorithm == "hungarian":
        if trace_sink is not None:
            raise InvalidParameterError("The Hungarian solver does not emit traces.")
        run = solve_hungarian(graph, check_invariants=check_invariants, deadline=deadline)
    else:
        raise InvalidParameterError(f"Unknown algorithm {algorithm!r}; choose one of {ALGORITHMS}.")

    problem = validate_matching(graph, run.matching, require_perfect=True)
    if problem:
        raise MatchingError(f"{algorithm} returned an invalid matching: {problem}")
    return SolveResult(algorithm=algorithm, graph=graph, matching=run.matching,
                       weight=matching_weight(graph, run.matching), stats=run.stats)


def log_solve(algorithm: str, graph: WeightedBipartiteGraph, *, source: str = "solve",
              label: str = "", result: SolveResult | None = None,
              oracle_weight: int | None = None, failure: str = "",
              latency_ms: int | None = None) -> None:
    """Record a run in ``SolveLog``; never raises."""
    stats = result.stats if result is not None else None
    if latency_ms is None:
        latency_ms = int(stats.seconds * 1000) if stats is not None else 0
    try:
        # Lazy import keeps the solver modules usable without a database.
        from .models import SolveLog  # noqa: PLC0415

        SolveLog.objects.create(
            algorithm=algorithm,
            source=source,
            instance_label=str(label)[:255],
            n=graph.n,
            s=graph.s,
            m=graph.m,
            weight=result.weight if result is not None else None,
            oracle_weight=oracle_weight,
            phases=len(stats.phases) if stats is not None else 0,
            steps=stats.steps if stats is not None else 0,
            latency_ms=latency_ms,
            success=not failure,
            failure_reason=failure[:200],
        )
    except Exception:  # noqa: BLE001
        logger.debug("Could not record %s solve", algorithm, exc_info=True)
